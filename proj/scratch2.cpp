// end-to-end exploration of the continuum pipeline, not part of the build
#include <chrono>
#include <cstdio>

#include "hexwave/continuum.hpp"

using namespace hexwave;

static double secs() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "quick";
  const HoneycombLattice lat = build_lattice(1.0);
  const FourierMedium med = make_reference_medium(lat, 10.0);

  // (a) grid-consistent fiber data
  const MicroFiberData fib = micro_fiber_data(med, 10);
  printf("fiber(P=10): E=%.9f nuF=%.9f mu=(%.6f,%.6f) xi=%.6f split=%.2e structRes=%.2e\n",
         fib.E, fib.nuF, fib.mu.real(), fib.mu.imag(), fib.xi, fib.pairSplit, fib.structResidual);
  const MicroFiberData fib8 = micro_fiber_data(med, 8);
  printf("fiber(P= 8): E=%.9f nuF=%.9f mu=(%.6f,%.6f) xi=%.6f split=%.2e structRes=%.2e\n",
         fib8.E, fib8.nuF, fib8.mu.real(), fib8.mu.imag(), fib8.xi, fib8.pairSplit,
         fib8.structResidual);

  if (mode == "quick" || mode == "eigen") {
    // (b) eps=0 eigenstate evolution
    Deformation none;
    StrainedOperator op0 = build_strained_operator(med, none, 0.0, 18, 18, 10);
    const cvector phi1 = field_on_supercell(fib.Phi1, op0);
    SchrodingerOptions so;
    so.snapshots = 2;
    const double T = 1.0;
    double t0 = secs();
    MicroTrajectory tr = solve_schrodinger(op0, phi1, T, so);
    printf("eps=0 run: %.2fs, steps=%ld drift flat=%.2e weighted=%.2e\n", secs() - t0,
           tr.stepsTaken, tr.normDriftFlat, tr.normDriftWeighted);
    // compare with e^{-iEt} phi0
    cvector ref = phi1;
    const complexd ph = std::exp(complexd(0.0, -fib.E * T));
    for (auto& z : ref) z *= ph;
    cvector diff(ref.size());
    for (size_t i = 0; i < ref.size(); ++i) diff[i] = tr.snapshots.back()[i] - ref[i];
    printf("eigenstate deviation at t=1: %.3e (norm %.6f)\n", micro_norm(op0, diff),
           micro_norm(op0, phi1));
  }

  if (mode == "quick" || mode == "expansion") {
    // (c) expansion residual ratios
    Deformation def;
    def.kind = DeformationKind::RadialBump;
    def.bumpAmp = Vec2(0.2, -0.15);
    def.bumpRadius = 1.4;
    double prev = 0.0;
    for (double eps : {0.1, 0.05, 0.025}) {
      const int cells = int(std::lround(36 * 0.1 / eps));
      StrainedOperator op = build_strained_operator(med, def, eps, cells, cells, 8);
      Deformation none;
      StrainedOperator op0b = build_strained_operator(med, none, 0.0, cells, cells, 8);
      cvector f(op.grid.size());
      for (int j = 0; j < op.grid.n2; ++j)
        for (int i = 0; i < op.grid.n1; ++i) {
          const Vec2 y = op.grid.point_centered(i, j);
          f[op.grid.flat(i, j)] = std::exp(complexd(0.0, lat.K.dot(y))) *
                                  std::exp(-y.squaredNorm() / (2.0 * 3.0 * 3.0));
        }
      auto fft = fft_for(op.grid);
      fft->forward(f);
      for (int j = 0; j < op.grid.n2; ++j)
        for (int i = 0; i < op.grid.n1; ++i)
          if (std::abs(Grid2::centered(i, op.grid.n1)) > op.grid.n1 / 3 ||
              std::abs(Grid2::centered(j, op.grid.n2)) > op.grid.n2 / 3)
            f[op.grid.flat(i, j)] = 0.0;
      fft->inverse(f);
      const double r = expansion_residual(op, op0b, f);
      printf("expansion eps=%.3f cells=%d residual=%.6e ratio=%.3f\n", eps, cells, r,
             prev > 0 ? prev / r : 0.0);
      prev = r;
    }
  }

  if (mode == "validate" || mode == "wave") {
    ConvergenceConfig cfg;
    cfg.flavor = mode == "wave" ? Flavor::Wave : Flavor::Schrodinger;
    cfg.potentialOffset = mode == "wave" ? 30.5 : 0.0;
    cfg.epsilons = {0.1, 0.05};
    cfg.cellsAtFirst = 72;
    cfg.pointsPerCell = 10;
    cfg.snapshots = 12;
    cfg.slowGridN = 240;
    double t0 = secs();
    const ConvergenceReport rep = convergence_study(cfg);
    printf("study (%s) took %.1fs\n", to_string(cfg.flavor), secs() - t0);
    for (const auto& c : rep.cases)
      printf("  eps=%.3f cells=%d sup=%.6e sup/eps=%.6e drift=%.2e/%.2e runtime=%.1fs\n",
             c.epsilon, c.cells, c.supError, c.supNormalized, c.normDrift, c.energyDrift,
             c.runtimeSec);
    for (double r : rep.ratios) printf("  ratio=%.3f\n", r);
    printf("  monotone=%d ratioPass=%d\n", rep.monotone, rep.ratioPass);
  }

  if (mode == "control") {
    ConvergenceConfig cfg;
    cfg.epsilons = {0.1, 0.05};
    cfg.cellsAtFirst = 72;
    cfg.pointsPerCell = 10;
    cfg.snapshots = 12;
    cfg.controlRun = true;
    const ConvergenceReport rep = convergence_study(cfg);
    for (const auto& c : rep.cases)
      printf("  control eps=%.3f sup=%.6e sup/eps=%.6e\n", c.epsilon, c.supError,
             c.supNormalized);
  }
  return 0;
}
