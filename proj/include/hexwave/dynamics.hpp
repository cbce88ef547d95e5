#ifndef HEXWAVE_DYNAMICS_HPP
#define HEXWAVE_DYNAMICS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "hexwave/kernels.hpp"
#include "hexwave/spinor.hpp"
#include "hexwave/strain.hpp"

namespace hexwave {

// Standard-form Dirac operator D = v[(-i grad - A).sigma] + M(Y), with M a
// pointwise Hermitian 2x2 field (holds Weff*sigma0 and any extra coupling).
struct DiracOperatorSpec {
  Grid2 grid;
  double v = 1.0;
  dvector A1, A2;
  kernels::Matrix2Field M;
  bool hasM = false;

  static DiracOperatorSpec free_op(const Grid2& g, double v);
  static DiracOperatorSpec from_gauge(const Grid2& g, double v, const dvector& A1,
                                      const dvector& A2, const dvector& Weff);
  static DiracOperatorSpec from_fields(const GaugeFieldData& f);
  void validate() const;  // M Hermitian, grids match
};

SpinorField apply_dirac(const DiracOperatorSpec& spec, const SpinorField& psi);

enum class TimeStepper { Strang, RK4 };

struct EvolveOptions {
  double dt = 1e-3;
  double T = 1.0;
  int stride = 100;        // snapshot every `stride` steps
  TimeStepper method = TimeStepper::Strang;
  bool trackEnergy = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpinorField> snapshots;
  std::vector<double> norms;
  std::vector<double> fidelity;  // |<psi0, psi(t)>| / ||psi0||^2
  std::vector<double> energy;    // Re <psi, D psi>
  double maxNormDrift = 0.0;     // max |norm - norm0| / norm0
  long stepsTaken = 0;
};

Trajectory evolve(const DiracOperatorSpec& spec, const SpinorField& psi0,
                  const EvolveOptions& opt);

// Landau-level analytics for constant B0 in the linear gauge.
struct LandauSpec {
  double B0 = 1.0;
  int n = 0;
  double k = 0.0;
  int sign = 0;  // +1/-1 for n>=1; must be 0 for n=0
};

double landau_energy(double v, double B0, int n, int sign);
double hermite(int n, double x);

// Eigenmode spinor on a periodic box; k must be commensurate with the box and
// the Gaussian factor must clear the boundary (BoxTooSmall otherwise).
SpinorField landau_mode(const Grid2& box, const LandauSpec& spec);

// Zero mode of the erf gauge fiber, normalized on the box; requires |k| < 1.
SpinorField erf_zero_mode(const Grid2& box, double k);

// 1D fiber spectrum of D(k) = v[-i d1 sigma1 + (k - A2(Y1)) sigma2] + W sigma0
// on a periodic interval of length L1 with n points (dense eigensolve).
struct FiberSpectrumOptions {
  double L1 = 25.6;
  int n = 512;
  int maxN = 1024;  // memory guard
};
std::vector<double> dirac_fiber_spectrum(double v, const std::function<double(double)>& A2,
                                         const std::function<double(double)>& W, double k,
                                         const FiberSpectrumOptions& opt);

// Reduce a Y2-independent 2D spec to its 1D fiber and diagonalize; returns the
// `count` eigenvalues nearest `window`.
std::vector<double> dirac_spectrum(const DiracOperatorSpec& spec, double k, int count,
                                   double window, int maxFiber = 1024);

// Trapezoid superposition over k of a mode family, weighted by
// G(k) = exp(-(k-k0)^2/w^2); returns the normalized packet and the constant.
struct SuperpositionResult {
  SpinorField packet;
  double normalization = 0.0;
};
SuperpositionResult wavepacket_superposition(const std::function<SpinorField(double)>& family,
                                             double k0, double w,
                                             const std::vector<double>& nodes);
std::vector<double> superposition_nodes(double k0, double w, int count, double lo, double hi);

std::vector<double> fidelity_series(const Trajectory& t);

}  // namespace hexwave

#endif
