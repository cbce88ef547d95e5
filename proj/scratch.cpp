// scratch exploration, not part of the build
#include <cstdio>

#include "hexwave/bloch.hpp"
#include "hexwave/dirac_point.hpp"
#include "hexwave/medium.hpp"

using namespace hexwave;

int main() {
  auto lat = build_lattice(1.0);
  printf("v1=(%g,%g) v2=(%g,%g)\n", lat.v1.x(), lat.v1.y(), lat.v2.x(), lat.v2.y());
  printf("k1=(%g,%g) k2=(%g,%g)\n", lat.k1.x(), lat.k1.y(), lat.k2.x(), lat.k2.y());
  printf("K=(%g,%g) |K|=%g  cellArea=%g\n", lat.K.x(), lat.K.y(), lat.K.norm(), lat.cellArea);
  printf("R*K-K integer check: ");
  Vec2 d = lat.R * lat.K - lat.K;
  Vec2 t = lat.dual_fractional(d);
  printf("frac=(%g, %g)\n", t.x(), t.y());

  auto med = make_reference_medium(lat, 10.0);
  auto rep = check_symmetries(med, 32, 1e-10);
  printf("symmetry: pass=%d herm=%.2e realV=%.2e pcA=%.2e pV=%.2e rotA=%.2e rotV=%.2e minEig=%g\n",
         rep.pass, rep.hermitianA, rep.realV, rep.pcA, rep.pV, rep.rotationA, rep.rotationV,
         rep.minEigA);

  // free folding at K
  auto bandsFree = compute_bands(make_reference_medium(lat, 0.0), lat.K, 6, 8);
  printf("free at K: ");
  for (double e : bandsFree.eigenvalues) printf("%.6f ", e);
  printf(" (|K|^2=%.6f)\n", lat.K.squaredNorm());

  for (int M : {6, 8, 10, 12, 14}) {
    auto basis = PlaneWaveBasis::corner_symmetrized(lat, M);
    auto b = compute_bands(med, basis, 8);
    printf("M=%2d n=%4d E: ", M, basis.size());
    for (double e : b.eigenvalues) printf("%.9f ", e);
    printf("\n");
  }

  // bands at Gamma: operator positivity check
  auto bG = compute_bands(med, Vec2(0, 0), 4, 12);
  printf("Gamma lowest: %.6f %.6f %.6f\n", bG.eigenvalues[0], bG.eigenvalues[1],
         bG.eigenvalues[2]);

  DiracPipelineOptions opt;
  opt.M = 12;
  auto pipe = dirac_point_pipeline(med, opt);
  auto& dp = pipe.data;
  printf("\nbStar=%d E_D=%.9f nuF=%.9f mu=(%.9f,%.9f) xi=%.9f xiSharp=(%.2e,%.2e)\n", dp.bStar,
         dp.E_D, dp.nuF, dp.mu.real(), dp.mu.imag(), dp.xi, dp.xiSharp.real(), dp.xiSharp.imag());
  printf("shift=(%g,%g)\n", dp.originShift.x(), dp.originShift.y());
  for (auto& [y0, im] : pipe.shiftCandidates)
    printf("  candidate y0=(%.4f,%.4f) |Im mu|=%g\n", y0.x(), y0.y(), im);
  auto& r = pipe.report;
  printf("residuals: calA %0.2e %0.2e %0.2e %0.2e frakA %0.2e %0.2e %0.2e %0.2e max=%0.2e\n",
         r.resCalA11, r.resCalA12, r.resCalA21, r.resCalA22, r.resFrakA11, r.resFrakA12,
         r.resFrakA21, r.resFrakA22, r.maxRelResidual);
  printf("calA12 = (%g,%g) (%g,%g)\n", r.calA12(0).real(), r.calA12(0).imag(),
         r.calA12(1).real(), r.calA12(1).imag());

  auto cone = verify_cone(med, dp, {1e-3, 2e-3}, {Vec2(1, 0), lat.R * Vec2(1, 0),
                          lat.R.transpose() * Vec2(1, 0)}, 12);
  printf("cone: maxRelSlopeErr=%.3e anisotropy=%.3e resRatio=%.3f\n", cone.maxRelSlopeError,
         cone.maxDirectionAnisotropy, cone.residualRatio);

  // Phi1 coefficient shell decay (max-norm shells)
  auto& f = dp.Phi1;
  printf("Phi1 shell decay:\n");
  for (int s = 0; s <= f.box; ++s) {
    double mx = 0;
    for (int m2 = -f.box; m2 <= f.box; ++m2)
      for (int m1 = -f.box; m1 <= f.box; ++m1)
        if (std::max(std::abs(m1), std::abs(m2)) == s) mx = std::max(mx, std::abs(f.at(m1, m2)));
    printf("  shell %2d: %.3e\n", s, mx);
  }
  return 0;
}
