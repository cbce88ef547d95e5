#include "hexwave/kernels.hpp"

#include <cassert>

namespace hexwave::kernels {

namespace {
constexpr size_t kReduceBlocks = 1024;
}

void axpy_serial(complexd s, std::span<const complexd> x, std::span<complexd> out) {
  for (size_t i = 0; i < x.size(); ++i) out[i] += s * x[i];
}

void axpy(complexd s, std::span<const complexd> x, std::span<complexd> out) {
  const int64_t n = int64_t(x.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] += s * x[i];
}

void pointwise_mul_serial(std::span<const complexd> x, std::span<const complexd> w,
                          std::span<complexd> out) {
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] * w[i];
}

void pointwise_mul(std::span<const complexd> x, std::span<const complexd> w,
                   std::span<complexd> out) {
  const int64_t n = int64_t(x.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = x[i] * w[i];
}

void pointwise_mul_real_serial(std::span<const complexd> x, std::span<const double> w,
                               std::span<complexd> out) {
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] * w[i];
}

void pointwise_mul_real(std::span<const complexd> x, std::span<const double> w,
                        std::span<complexd> out) {
  const int64_t n = int64_t(x.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = x[i] * w[i];
}

complexd dot_serial(std::span<const complexd> a, std::span<const complexd> b) {
  complexd s(0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Fixed-block two-level sum: identical result for any thread count.
complexd dot(std::span<const complexd> a, std::span<const complexd> b) {
  const size_t n = a.size();
  const size_t nb = std::min(kReduceBlocks, std::max<size_t>(n, 1));
  std::vector<complexd> partial(nb, complexd(0.0));
  const size_t chunk = (n + nb - 1) / nb;
#pragma omp parallel for schedule(static)
  for (int64_t blk = 0; blk < int64_t(nb); ++blk) {
    const size_t lo = size_t(blk) * chunk;
    const size_t hi = std::min(n, lo + chunk);
    complexd s(0.0);
    for (size_t i = lo; i < hi; ++i) s += std::conj(a[i]) * b[i];
    partial[blk] = s;
  }
  complexd s(0.0);
  for (const auto& p : partial) s += p;
  return s;
}

complexd dot_weighted(std::span<const complexd> a, std::span<const complexd> b,
                      std::span<const double> w) {
  const size_t n = a.size();
  const size_t nb = std::min(kReduceBlocks, std::max<size_t>(n, 1));
  std::vector<complexd> partial(nb, complexd(0.0));
  const size_t chunk = (n + nb - 1) / nb;
#pragma omp parallel for schedule(static)
  for (int64_t blk = 0; blk < int64_t(nb); ++blk) {
    const size_t lo = size_t(blk) * chunk;
    const size_t hi = std::min(n, lo + chunk);
    complexd s(0.0);
    for (size_t i = lo; i < hi; ++i) s += std::conj(a[i]) * b[i] * w[i];
    partial[blk] = s;
  }
  complexd s(0.0);
  for (const auto& p : partial) s += p;
  return s;
}

double norm_sq(std::span<const complexd> a) { return dot(a, a).real(); }

void apply_matrix_field_serial(const Matrix2Field& m, std::span<const complexd> x1,
                               std::span<const complexd> x2, std::span<complexd> o1,
                               std::span<complexd> o2) {
  for (size_t i = 0; i < x1.size(); ++i) {
    const complexd a = x1[i], b = x2[i];
    o1[i] = m.m00[i] * a + m.m01[i] * b;
    o2[i] = m.m10[i] * a + m.m11[i] * b;
  }
}

void apply_matrix_field(const Matrix2Field& m, std::span<const complexd> x1,
                        std::span<const complexd> x2, std::span<complexd> o1,
                        std::span<complexd> o2) {
  const int64_t n = int64_t(x1.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    const complexd a = x1[i], b = x2[i];
    o1[i] = m.m00[i] * a + m.m01[i] * b;
    o2[i] = m.m10[i] * a + m.m11[i] * b;
  }
}

void gradient_symbol_serial(const Grid2& g, const Vec2& shift, std::span<const complexd> fhat,
                            std::span<complexd> gx, std::span<complexd> gy) {
  for (int j = 0; j < g.n2; ++j) {
    const double ky = double(Grid2::centered(j, g.n2));
    for (int i = 0; i < g.n1; ++i) {
      const double kx = double(Grid2::centered(i, g.n1));
      const Vec2 k = kx * g.G1 + ky * g.G2 + shift;
      const size_t idx = g.flat(i, j);
      const complexd v = complexd(0.0, 1.0) * fhat[idx];
      gx[idx] = v * k.x();
      gy[idx] = v * k.y();
    }
  }
}

void gradient_symbol(const Grid2& g, const Vec2& shift, std::span<const complexd> fhat,
                     std::span<complexd> gx, std::span<complexd> gy) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.n2; ++j) {
    const double ky = double(Grid2::centered(j, g.n2));
    for (int i = 0; i < g.n1; ++i) {
      const double kx = double(Grid2::centered(i, g.n1));
      const Vec2 k = kx * g.G1 + ky * g.G2 + shift;
      const size_t idx = g.flat(i, j);
      const complexd v = complexd(0.0, 1.0) * fhat[idx];
      gx[idx] = v * k.x();
      gy[idx] = v * k.y();
    }
  }
}

void divergence_symbol_serial(const Grid2& g, const Vec2& shift, std::span<const complexd> hx,
                              std::span<const complexd> hy, std::span<complexd> dhat) {
  for (int j = 0; j < g.n2; ++j) {
    const double ky = double(Grid2::centered(j, g.n2));
    for (int i = 0; i < g.n1; ++i) {
      const double kx = double(Grid2::centered(i, g.n1));
      const Vec2 k = kx * g.G1 + ky * g.G2 + shift;
      const size_t idx = g.flat(i, j);
      dhat[idx] = complexd(0.0, 1.0) * (k.x() * hx[idx] + k.y() * hy[idx]);
    }
  }
}

void divergence_symbol(const Grid2& g, const Vec2& shift, std::span<const complexd> hx,
                       std::span<const complexd> hy, std::span<complexd> dhat) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.n2; ++j) {
    const double ky = double(Grid2::centered(j, g.n2));
    for (int i = 0; i < g.n1; ++i) {
      const double kx = double(Grid2::centered(i, g.n1));
      const Vec2 k = kx * g.G1 + ky * g.G2 + shift;
      const size_t idx = g.flat(i, j);
      dhat[idx] = complexd(0.0, 1.0) * (k.x() * hx[idx] + k.y() * hy[idx]);
    }
  }
}

}  // namespace hexwave::kernels
