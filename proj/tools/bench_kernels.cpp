// Timing comparison of the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <random>

#include "hexwave/bloch.hpp"
#include "hexwave/continuum.hpp"
#include "hexwave/kernels.hpp"
#include "hexwave/medium.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace hexwave;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_ms(F&& fn, int reps) {
  fn();  // warm
  const double t0 = now_ms();
  for (int r = 0; r < reps; ++r) fn();
  return (now_ms() - t0) / reps;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> dist;

  // grid kernels on a 1024x1024 grid
  const Grid2 g = Grid2::rectangle(40.0, 40.0, 1024, 1024);
  const size_t n = g.size();
  cvector x(n), y(n), o1(n), o2(n);
  dvector wr(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = complexd(dist(rng), dist(rng));
    y[i] = complexd(dist(rng), dist(rng));
    wr[i] = 1.0 + 0.1 * dist(rng);
  }
  kernels::Matrix2Field M;
  M.resize(n);
  for (size_t i = 0; i < n; ++i) {
    M.m00[i] = complexd(dist(rng), 0.0);
    M.m01[i] = complexd(dist(rng), dist(rng));
    M.m10[i] = std::conj(M.m01[i]);
    M.m11[i] = complexd(dist(rng), 0.0);
  }

  report("pointwise_mul",
         time_ms([&] { kernels::pointwise_mul_serial(x, y, o1); }, 10),
         time_ms([&] { kernels::pointwise_mul(x, y, o1); }, 10));
  report("apply_matrix_field",
         time_ms([&] { kernels::apply_matrix_field_serial(M, x, y, o1, o2); }, 10),
         time_ms([&] { kernels::apply_matrix_field(M, x, y, o1, o2); }, 10));
  report("dot",
         time_ms([&] { (void)kernels::dot_serial(x, y); }, 10),
         time_ms([&] { (void)kernels::dot(x, y); }, 10));
  report("gradient_symbol",
         time_ms([&] { kernels::gradient_symbol_serial(g, Vec2::Zero(), x, o1, o2); }, 10),
         time_ms([&] { kernels::gradient_symbol(g, Vec2::Zero(), x, o1, o2); }, 10));

  // fiber assembly at M=10
  const HoneycombLattice lat = build_lattice(1.0);
  const FourierMedium med = make_reference_medium(lat, 10.0);
  const PlaneWaveBasis basis = PlaneWaveBasis::ball(lat, lat.K, 10);
  report("assemble_fiber_matrix",
         time_ms([&] { (void)assemble_fiber_matrix_serial(med, lat.K, basis); }, 3),
         time_ms([&] { (void)assemble_fiber_matrix(med, lat.K, basis); }, 3));

  // strained-operator application on a 72-cell supercell
  Deformation def;
  def.kind = DeformationKind::RadialBump;
  def.bumpAmp = Vec2(0.25, -0.18);
  def.bumpRadius = 2.6;
  StrainedOperator op = build_strained_operator(med, def, 0.1, 72, 72, 10);
  cvector f(op.grid.size()), out;
  for (auto& z : f) z = complexd(dist(rng), dist(rng));
  LepsWorkspace ws;
  report("apply_Leps (720^2)",
         time_ms([&] { apply_Leps_serial(op, f, out, ws); }, 5),
         time_ms([&] { apply_Leps(op, f, out, ws); }, 5));
  return 0;
}
