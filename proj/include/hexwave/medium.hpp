#ifndef HEXWAVE_MEDIUM_HPP
#define HEXWAVE_MEDIUM_HPP

#include <string>
#include <utility>
#include <vector>

#include "hexwave/field.hpp"
#include "hexwave/lattice.hpp"
#include "hexwave/pauli.hpp"

namespace hexwave {

// Medium pair (A, V) as truncated reciprocal-lattice Fourier series.
// A(y) = sum_G Ahat(G) e^{iG.y} (Hermitian-valued in real space),
// V(y) = sum_G Vhat(G) e^{iG.y} (real-valued).
struct FourierMedium {
  HoneycombLattice lat;
  int cutoff = 0;
  std::vector<Matrix2c> Ahat;
  std::vector<complexd> Vhat;
  double ellipticityFloor = 1e-6;

  int side() const { return 2 * cutoff + 1; }
  bool contains(int m1, int m2) const {
    return std::abs(m1) <= cutoff && std::abs(m2) <= cutoff;
  }
  size_t flat(int m1, int m2) const {
    return size_t(m2 + cutoff) * size_t(side()) + size_t(m1 + cutoff);
  }
  Matrix2c A_at(int m1, int m2) const {
    return contains(m1, m2) ? Ahat[flat(m1, m2)] : Matrix2c::Zero();
  }
  complexd V_at(int m1, int m2) const {
    return contains(m1, m2) ? Vhat[flat(m1, m2)] : complexd(0.0);
  }
  Matrix2c& A_ref(int m1, int m2) { return Ahat[flat(m1, m2)]; }
  complexd& V_ref(int m1, int m2) { return Vhat[flat(m1, m2)]; }

  // Real-space samples on the fractional n x n cell grid.
  std::vector<Matrix2c> sample_A(int n) const;
  std::vector<complexd> sample_V(int n) const;

  // Conjugate the medium by the translation y -> y + y0 (coefficient phases).
  FourierMedium translated(const Vec2& y0) const;
};

FourierMedium make_empty_medium(const HoneycombLattice& lat, int cutoff);

// A = Id, V = V0 [cos(k1.y) + cos(k2.y) + cos((k1+k2).y)] + offset.
// The constant offset shifts the spectrum only; it is used to make V > 0
// pointwise for wave runs.
FourierMedium make_reference_medium(const HoneycombLattice& lat, double V0, double offset = 0.0);

struct SymmetryReport {
  double hermitianA = 0.0;     // max ||A - A^*|| over grid
  double realV = 0.0;          // max |Im V|
  double pcA = 0.0;            // max ||A(-y) - conj(A(y))||
  double pV = 0.0;             // max |V(-y) - V(y)|
  double rotationA = 0.0;      // max ||A(R^-1 y) - R^T A(y) R||
  double rotationV = 0.0;      // max |V(R^-1 y) - V(y)|
  double minEigA = 0.0;        // smallest eigenvalue of A over grid
  bool aliased = false;
  bool pass = false;
  double tol = 0.0;

  double max_violation() const;
};

SymmetryReport check_symmetries(const FourierMedium& m, int gridSize, double tol);

// (A f)(y) = (1/i)[ A grad f + div(A f) ], exact Fourier-space evaluation.
std::pair<QuasiPeriodicField, QuasiPeriodicField> apply_calA(const FourierMedium& m,
                                                             const QuasiPeriodicField& f);

// (frakA f)_ij = d_l(a_li d_j f) + d_j(a_il d_l f), as a 2x2 block of fields.
struct FrakAResult {
  QuasiPeriodicField e11, e12, e21, e22;
  const QuasiPeriodicField& at(int i, int j) const {
    return i == 0 ? (j == 0 ? e11 : e12) : (j == 0 ? e21 : e22);
  }
};
FrakAResult apply_frakA(const FourierMedium& m, const QuasiPeriodicField& f);

// L0 f = -div(A grad f) + V f.
QuasiPeriodicField apply_L0(const FourierMedium& m, const QuasiPeriodicField& f);

// <Phi, calA Psi> as a 2-vector and <Phi, frakA Psi> as a 2x2 matrix.
Eigen::Vector2cd inner_calA(const FourierMedium& m, const QuasiPeriodicField& phi,
                            const QuasiPeriodicField& psi);
Matrix2c inner_frakA(const FourierMedium& m, const QuasiPeriodicField& phi,
                     const QuasiPeriodicField& psi);

std::string medium_to_json(const FourierMedium& m);
FourierMedium medium_from_json(const std::string& text);

}  // namespace hexwave

#endif
