#ifndef HEXWAVE_DIRAC_POINT_HPP
#define HEXWAVE_DIRAC_POINT_HPP

#include <string>
#include <vector>

#include "hexwave/bloch.hpp"
#include "hexwave/medium.hpp"

namespace hexwave {

// Complete coefficient set of the effective model at the corner fiber.
struct DiracPointData {
  Vec2 K = Vec2::Zero();
  double E_D = 0.0;
  int bStar = 0;  // 1-based index of the lower touching band
  QuasiPeriodicField Phi1, Phi2;
  double nuF = 0.0;
  complexd mu{0.0, 0.0};
  double xi = 0.0;
  complexd xiSharp{0.0, 0.0};
  double coneFitResidual = 0.0;
  Vec2 originShift = Vec2::Zero();  // translation applied to the medium, if any
};

// The eight measured inner products and their deviations from the sigma
// structure; deviations are reported, never clamped.
struct BifurcationReport {
  Eigen::Vector2cd calA11, calA12, calA21, calA22;
  Matrix2c frakA11, frakA12, frakA21, frakA22;
  double resCalA11 = 0.0, resCalA12 = 0.0, resCalA21 = 0.0, resCalA22 = 0.0;
  double resFrakA11 = 0.0, resFrakA12 = 0.0, resFrakA21 = 0.0, resFrakA22 = 0.0;
  double xiImag = 0.0;        // |Im Tr<Phi1,frakA Phi1>|/2
  double xiSharpReal = 0.0;   // |Re xiSharp|
  double maxRelResidual = 0.0;
};

struct LocateResult {
  int bStar = 0;
  double E_D = 0.0;
  QuasiPeriodicField u1, u2;  // orthonormal basis of the 2D eigenspace
  double gapBelow = 0.0, gapAbove = 0.0;
};

LocateResult locate_dirac_point(const FourierMedium& m, int M, double degTol = 1e-8);

// Diagonalize the restricted rotation; Phi1 is the tau eigenvector, Phi2 = PC Phi1.
std::pair<QuasiPeriodicField, QuasiPeriodicField> symmetry_adapted_basis(
    const QuasiPeriodicField& u1, const QuasiPeriodicField& u2, double tol = 1e-6);

struct PhaseFixResult {
  QuasiPeriodicField Phi1, Phi2;
  double nuF = 0.0;
  double theta = 0.0;  // applied phase
};

PhaseFixResult fix_phase(const QuasiPeriodicField& Phi1, const QuasiPeriodicField& Phi2,
                         const FourierMedium& m, double velTol = 1e-8);

struct CoefficientResult {
  complexd mu{0.0, 0.0};
  double xi = 0.0;
  complexd xiSharp{0.0, 0.0};
  BifurcationReport report;
};

CoefficientResult compute_coefficients(const QuasiPeriodicField& Phi1,
                                       const QuasiPeriodicField& Phi2, const FourierMedium& m,
                                       double structTol = 1e-6, bool throwOnViolation = true);

struct DiracPipelineOptions {
  int M = 12;
  double degTol = 1e-8;
  double structTol = 1e-6;
  double velTol = 1e-8;
  bool originShiftSearch = true;  // minimize |Im mu| over high-symmetry shifts
};

struct DiracPipelineResult {
  DiracPointData data;
  BifurcationReport report;
  std::vector<std::pair<Vec2, double>> shiftCandidates;  // (y0, |Im mu|) tried
};

DiracPipelineResult dirac_point_pipeline(const FourierMedium& m, const DiracPipelineOptions& opt);

struct ConeSample {
  double radius = 0.0;
  Vec2 direction = Vec2::Zero();
  double slope = 0.0;           // (E_+ - E_-)/(2 r)
  double slopeMinus = 0.0;      // (E_D - E_-)/r
  double slopePlus = 0.0;       // (E_+ - E_D)/r
  double projectionResidual = 0.0;  // distance of Phi_+- to span{e^{ik y}Phi_1,2}
};

struct ConeReport {
  std::vector<ConeSample> samples;
  double maxRelSlopeError = 0.0;   // |slope - nuF|/nuF over samples
  double maxDirectionAnisotropy = 0.0;  // max |slope(d) - slope(Rd)| / nuF
  double residualRatio = 0.0;      // projection residual ratio between radii
};

ConeReport verify_cone(const FourierMedium& m, const DiracPointData& dpd,
                       const std::vector<double>& radii, const std::vector<Vec2>& directions,
                       int M);

std::string dirac_point_to_json(const DiracPointData& d);
std::string bifurcation_report_to_json(const BifurcationReport& r);

}  // namespace hexwave

#endif
