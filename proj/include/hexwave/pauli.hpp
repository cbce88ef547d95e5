#ifndef HEXWAVE_PAULI_HPP
#define HEXWAVE_PAULI_HPP

#include <Eigen/Dense>
#include <complex>

namespace hexwave {

using complexd = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

// The four constant 2x2 matrices sigma_0..sigma_3.
struct PauliBasis {
  Matrix2c sigma0, sigma1, sigma2, sigma3;

  PauliBasis() {
    const complexd I(0.0, 1.0);
    sigma0 << 1, 0, 0, 1;
    sigma1 << 0, 1, 1, 0;
    sigma2 << 0, -I, I, 0;
    sigma3 << 1, 0, 0, -1;
  }

  const Matrix2c& operator[](int i) const {
    switch (i) {
      case 0: return sigma0;
      case 1: return sigma1;
      case 2: return sigma2;
      default: return sigma3;
    }
  }
};

inline const PauliBasis& pauli() {
  static const PauliBasis basis;
  return basis;
}

// Frobenius product A : B = Tr(A^T B), paper notation convention.
inline complexd frobenius(const Matrix2c& a, const Matrix2c& b) {
  return (a.transpose() * b).trace();
}

// Tr(U sigma_i) for a real 2x2 strain differential U.
inline complexd trace_sigma(const Eigen::Matrix2d& u, int i) {
  return (u.cast<complexd>() * pauli()[i]).trace();
}

}  // namespace hexwave

#endif
