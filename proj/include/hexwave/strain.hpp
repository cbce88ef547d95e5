#ifndef HEXWAVE_STRAIN_HPP
#define HEXWAVE_STRAIN_HPP

#include <functional>
#include <string>
#include <vector>

#include "hexwave/dirac_point.hpp"
#include "hexwave/grid2.hpp"

namespace hexwave {

// C-infinity window: 1 on |x| <= rc, 0 on |x| >= rc + wc, built from the
// standard exp(-1/x) partition.
double smooth_window(double x, double rc, double wc);
// C-infinity radial bump profile: 1 at 0, 0 for r >= 1.
double radial_bump(double r);

enum class DeformationKind { Constant, LinearGauge, ErfGauge, RadialBump, Gridded };

// Slow-variable deformation u(Y); U = D_Y u is what the effective model sees.
struct Deformation {
  DeformationKind kind = DeformationKind::Constant;

  Vec2 u0 = Vec2::Zero();                      // constant
  double beta = 0.0, rc = 8.0, wc = 4.0;       // linear-gauge u=(0, beta Y1^2 chi(Y1))
  double erfAmp = 0.0;                         // erf-gauge: d1 u2 = erfAmp * erf(Y1)
  Vec2 bumpAmp = Vec2::Zero();                 // radial-bump u = bumpAmp * zeta(|Y|/ru)
  double bumpRadius = 1.0;

  Grid2 sampleGrid;                            // gridded
  std::vector<Vec2> samples;

  bool analytic() const { return kind != DeformationKind::Gridded; }
  Vec2 displacement(const Vec2& Y) const;
  Mat2 jacobian(const Vec2& Y) const;          // U_ij = d_j u_i, analytic kinds
  // Reported bound on |U| over the deformation's active region.
  double jacobian_bound() const;
};

struct StrainGrid {
  Grid2 grid;
  std::vector<Mat2> U;

  const Mat2& at(int i, int j) const { return U[grid.flat(i, j)]; }
};

// Analytic derivatives for catalog kinds; 4th-order central differences for
// the gridded kind (grid must match the stored samples).
StrainGrid jacobian_U(const Deformation& d, const Grid2& g);

enum class Flavor { Wave, Schrodinger };
inline const char* to_string(Flavor f) { return f == Flavor::Wave ? "wave" : "schrodinger"; }

struct GaugeFieldData {
  Grid2 grid;
  dvector A1, A2, Weff;
  dvector B;       // d1 A2 - d2 A1
  double v = 0.0;
  Flavor flavor = Flavor::Schrodinger;
  bool generalMu = false;  // general complex-mu coupling absorbed into A
};

// Strain -> effective gauge/potential fields. The simplified (real-mu) map is
//   A1 = -(mu/nuF) Tr(U sigma3),  A2 = (mu/nuF) Tr(U sigma1),
// guarded by ComplexMu; with allowComplexMu the exact general coupling
//   A1 = -(Re mu t3 + Im mu t1)/nuF,  A2 = (Re mu t1 - Im mu t3)/nuF
// is used instead (identical when Im mu = 0). Wave flavor:
//   v = nuF/(2 sqrt(E_D)), Weff = -(xi t0 + xiSharp t2)/(2 sqrt(E_D));
// Schrodinger flavor: v = nuF, Weff = xi t0 + xiSharp t2.
GaugeFieldData pseudo_fields(const StrainGrid& sg, const DiracPointData& dpd, Flavor flavor,
                             bool allowComplexMu = false, double imMuTol = 1e-8);

// Spectral curl on the periodic grid.
dvector magnetic_field(const Grid2& g, const dvector& A1, const dvector& A2);

// u = (0, u2(Y1)) with d1 u2 = (nuF/mu) erf(Y1); requires real mu != 0.
Deformation erf_gauge_deformation(const DiracPointData& dpd, double imMuTol = 1e-8);

void write_gauge_csv(const std::string& path, const GaugeFieldData& g);

}  // namespace hexwave

#endif
