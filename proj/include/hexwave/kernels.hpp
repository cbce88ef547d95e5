#ifndef HEXWAVE_KERNELS_HPP
#define HEXWAVE_KERNELS_HPP

#include <span>

#include "hexwave/grid2.hpp"

namespace hexwave {

// Data-parallel grid kernels. Each has a serial reference twin used by the
// tests and the benchmark; the OpenMP versions are the production path and
// must agree bitwise (disjoint writes, fixed-block reductions).
namespace kernels {

// out[i] += s * x[i]
void axpy(complexd s, std::span<const complexd> x, std::span<complexd> out);
void axpy_serial(complexd s, std::span<const complexd> x, std::span<complexd> out);

// out[i] = x[i] * w[i]
void pointwise_mul(std::span<const complexd> x, std::span<const complexd> w,
                   std::span<complexd> out);
void pointwise_mul_serial(std::span<const complexd> x, std::span<const complexd> w,
                          std::span<complexd> out);

void pointwise_mul_real(std::span<const complexd> x, std::span<const double> w,
                        std::span<complexd> out);
void pointwise_mul_real_serial(std::span<const complexd> x, std::span<const double> w,
                               std::span<complexd> out);

// Deterministic blocked reduction: result independent of thread count.
complexd dot(std::span<const complexd> a, std::span<const complexd> b);
complexd dot_serial(std::span<const complexd> a, std::span<const complexd> b);
complexd dot_weighted(std::span<const complexd> a, std::span<const complexd> b,
                      std::span<const double> w);
double norm_sq(std::span<const complexd> a);

// Apply a field of 2x2 matrices to a two-component field:
// (o1,o2)[i] = M[i] * (x1,x2)[i], M stored as 4 arrays m00,m01,m10,m11.
struct Matrix2Field {
  cvector m00, m01, m10, m11;
  size_t size() const { return m00.size(); }
  void resize(size_t n) {
    m00.assign(n, complexd(0.0));
    m01.assign(n, complexd(0.0));
    m10.assign(n, complexd(0.0));
    m11.assign(n, complexd(0.0));
  }
};

void apply_matrix_field(const Matrix2Field& m, std::span<const complexd> x1,
                        std::span<const complexd> x2, std::span<complexd> o1,
                        std::span<complexd> o2);
void apply_matrix_field_serial(const Matrix2Field& m, std::span<const complexd> x1,
                               std::span<const complexd> x2, std::span<complexd> o1,
                               std::span<complexd> o2);

// Multiply by i*(k+shift) componentwise in Fourier space (gradient symbol).
void gradient_symbol(const Grid2& g, const Vec2& shift, std::span<const complexd> fhat,
                     std::span<complexd> gx, std::span<complexd> gy);
void gradient_symbol_serial(const Grid2& g, const Vec2& shift, std::span<const complexd> fhat,
                            std::span<complexd> gx, std::span<complexd> gy);

// dhat[i] = i*(k+shift)_x hx[i] + i*(k+shift)_y hy[i] (divergence symbol).
void divergence_symbol(const Grid2& g, const Vec2& shift, std::span<const complexd> hx,
                       std::span<const complexd> hy, std::span<complexd> dhat);
void divergence_symbol_serial(const Grid2& g, const Vec2& shift, std::span<const complexd> hx,
                              std::span<const complexd> hy, std::span<complexd> dhat);

}  // namespace kernels

}  // namespace hexwave

#endif
