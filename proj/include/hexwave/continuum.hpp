#ifndef HEXWAVE_CONTINUUM_HPP
#define HEXWAVE_CONTINUUM_HPP

#include <string>
#include <vector>

#include "hexwave/dirac_point.hpp"
#include "hexwave/dynamics.hpp"
#include "hexwave/medium.hpp"
#include "hexwave/strain.hpp"

namespace hexwave {

// Strained operator L^(eps) = -detJ div( (J A J^T/detJ) grad ) + V on a
// periodic supercell of N1 x N2 lattice cells with P points per cell.
// J(y) = (Id + eps U(eps y))^{-1}, evaluated exactly.
struct StrainedOperator {
  FourierMedium medium;
  Deformation deformation;
  double epsilon = 0.0;
  int cells1 = 0, cells2 = 0, pointsPerCell = 0;
  Grid2 grid;

  dvector detJ, Vgrid;
  kernels::Matrix2Field C;      // J A J^T / detJ
  kernels::Matrix2Field Agrid;  // A(y) samples (used by the eps-expansion check)
  std::vector<Mat2> Ugrid;      // U(eps y) samples
  double minDetJ = 0.0;
};

StrainedOperator build_strained_operator(const FourierMedium& medium, const Deformation& def,
                                         double epsilon, int cells1, int cells2,
                                         int pointsPerCell);

struct LepsWorkspace {
  cvector fhat, gx, gy, hx, hy;
  void ensure(size_t n);
};

void apply_Leps(const StrainedOperator& op, const cvector& f, cvector& out, LepsWorkspace& ws);
void apply_Leps_serial(const StrainedOperator& op, const cvector& f, cvector& out,
                       LepsWorkspace& ws);
cvector apply_Leps(const StrainedOperator& op, const cvector& f);

double micro_norm(const StrainedOperator& op, const cvector& f);
complexd micro_inner(const StrainedOperator& op, const cvector& f, const cvector& g);
complexd micro_inner_weighted(const StrainedOperator& op, const cvector& f, const cvector& g);

// Tr(U(eps y) frakA f) evaluated spectrally on the grid.
cvector trace_U_frakA(const StrainedOperator& op, const cvector& f);

// || L^eps f - L^0 f - eps Tr(U frakA f) ||_L2; op0 must be the eps=0 twin.
double expansion_residual(const StrainedOperator& op, const StrainedOperator& op0,
                          const cvector& f);

double estimate_lambda_max(const StrainedOperator& op, int iterations = 40, uint64_t seed = 7);

// Supercell-consistent corner-fiber data: eigenpair of the fiber restricted to
// the index set the (N,P) grid can hold, with coefficients and Rayleigh-exact
// energy. Parameterizes the effective model consistently with the grid.
struct MicroFiberData {
  double E = 0.0;
  double nuF = 0.0;
  complexd mu{0.0, 0.0};
  double xi = 0.0;
  complexd xiSharp{0.0, 0.0};
  QuasiPeriodicField Phi1, Phi2;
  double pairSplit = 0.0;
  double structResidual = 0.0;

  DiracPointData as_dirac_point_data() const;
};

MicroFiberData micro_fiber_data(const FourierMedium& medium, int pointsPerCell);

// Values of a corner-fiber field on the supercell grid (spectral placement).
cvector field_on_supercell(const QuasiPeriodicField& f, const StrainedOperator& op);

// Fourier (zero-pad) interpolation of slow-grid data onto the micro grid:
// result[y] = data(eps * y). Slow grid must span eps * (micro torus).
cvector envelope_to_micro(const Grid2& slowGrid, const cvector& data, const Grid2& microGrid,
                          double epsilon);

struct EnvelopeInitial {
  cvector phi0;
  cvector phiT0;  // wave flavor only
  double tailRatio = 0.0;
};

// phi0 = eps [beta1(eps y) Phi1 + beta2(eps y) Phi2]; wave adds
// phi_t(0) = i sqrt(E) phi0. SupportOverflow if the envelope tail at the
// supercell boundary exceeds 1e-8 of its max.
EnvelopeInitial build_envelope_initial(const StrainedOperator& op, const MicroFiberData& fiber,
                                       const Grid2& slowGrid, const SpinorField& beta0,
                                       double epsilon, Flavor flavor);

struct MicroTrajectory {
  std::vector<double> times;
  std::vector<cvector> snapshots;
  double normDriftFlat = 0.0;      // Schrodinger
  double normDriftWeighted = 0.0;  // Schrodinger
  double energyDrift = 0.0;        // wave
  long stepsTaken = 0;
  double dtUsed = 0.0;
};

struct SchrodingerOptions {
  double dt = 0.5;
  double krylovTol = 1e-9;
  int mMax = 40;
  int snapshots = 20;
  double shift = 0.0;  // 0 -> use the Rayleigh quotient of the initial state
};

MicroTrajectory solve_schrodinger(const StrainedOperator& op, const cvector& phi0, double T,
                                  const SchrodingerOptions& opt);

struct WaveOptions {
  double dtSafety = 0.9;
  int snapshots = 20;
  double lambdaMax = 0.0;  // 0 -> power iteration
};

MicroTrajectory solve_wave(const StrainedOperator& op, const cvector& phi0, const cvector& phiT0,
                           double T, const WaveOptions& opt);

struct EnvelopeTrajectory {
  std::vector<double> timesSlow;
  std::vector<SpinorField> beta;  // effective-equation frame components
  Grid2 slowGrid;
};

// Effective envelope evolution on the slow torus; general complex mu handled
// through the gauge coupling. Snapshot times land on T_j = j * (Tslow/snapshots).
EnvelopeTrajectory solve_effective_envelope(const MicroFiberData& fiber,
                                            const Deformation& def, const Grid2& slowGrid,
                                            const SpinorField& beta0, double Tslow, Flavor flavor,
                                            double dtTarget, int snapshots);

struct EnvelopeErrorSeries {
  std::vector<double> times;
  std::vector<double> error;     // ||phi - phi_eff||_L2
  double sup = 0.0;
  double supNormalized = 0.0;    // sup / eps
  double phi0Norm = 0.0;
};

EnvelopeErrorSeries envelope_error(const StrainedOperator& op, const MicroFiberData& fiber,
                                   const MicroTrajectory& micro, const EnvelopeTrajectory& env,
                                   double epsilon, Flavor flavor);

struct ValidationCase {
  double epsilon = 0.1;
  int cells = 72;      // per dimension at this epsilon
  double supError = 0.0;
  double supNormalized = 0.0;
  double runtimeSec = 0.0;
  double normDrift = 0.0;
  double energyDrift = 0.0;
};

struct ConvergenceConfig {
  std::vector<double> epsilons{0.1, 0.05};
  int cellsAtFirst = 72;  // scaled as eps_first/eps
  int pointsPerCell = 10;
  int slowGridN = 240;
  double rho = 2.0;
  Flavor flavor = Flavor::Schrodinger;
  double envelopeWidth = 0.55;
  Vec2 bumpAmp = Vec2(0.25, -0.18);
  double bumpRadius = 2.6;
  double potentialOffset = 0.0;  // added to V (wave runs)
  double V0 = 10.0;
  double dtSlowTarget = 0.004;
  int snapshots = 20;
  SchrodingerOptions schrodinger;
  bool controlRun = false;  // U = 0 control
};

struct ConvergenceReport {
  std::vector<ValidationCase> cases;
  std::vector<double> ratios;  // supError(eps_i) / supError(eps_{i+1})
  bool monotone = false;
  bool ratioPass = false;  // ratios within [1.5, 2.6] (Schrodinger gate)
  Flavor flavor = Flavor::Schrodinger;
};

ConvergenceReport convergence_study(const ConvergenceConfig& cfg);

}  // namespace hexwave

#endif
