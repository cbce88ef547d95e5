#ifndef HEXWAVE_GRID2_HPP
#define HEXWAVE_GRID2_HPP

#include <complex>
#include <memory>
#include <vector>

#include "hexwave/lattice.hpp"
#include "hexwave/pauli.hpp"

namespace hexwave {

// Periodic grid on the torus spanned by W1, W2 (rectangles are the special
// case W1 = (L1,0), W2 = (0,L2)). Points y = (i/n1) W1 + (j/n2) W2, stored
// row-major with i fastest. Mode (a,b) has wavevector a*G1 + b*G2 where
// G1, G2 are the torus duals; FFT index (a mod n1, b mod n2).
struct Grid2 {
  Vec2 W1 = Vec2::Zero(), W2 = Vec2::Zero();
  int n1 = 0, n2 = 0;
  Vec2 G1 = Vec2::Zero(), G2 = Vec2::Zero();
  double area = 0.0;

  Grid2() = default;
  Grid2(const Vec2& w1, const Vec2& w2, int nx, int ny);
  static Grid2 rectangle(double L1, double L2, int nx, int ny);

  size_t size() const { return size_t(n1) * size_t(n2); }
  size_t flat(int i, int j) const { return size_t(j) * size_t(n1) + size_t(i); }
  Vec2 point(int i, int j) const {
    return (double(i) / n1) * W1 + (double(j) / n2) * W2;
  }
  // Same grid point in the centered fundamental domain (torus cut at +-1/2).
  Vec2 point_centered(int i, int j) const {
    return (double(centered(i, n1)) / n1) * W1 + (double(centered(j, n2)) / n2) * W2;
  }
  // Centered mode integer for FFT index i in [0, n).
  static int centered(int i, int n) { return (i < n - i) ? i : i - n; }
  Vec2 wavevector(int i, int j) const {
    return double(centered(i, n1)) * G1 + double(centered(j, n2)) * G2;
  }
  double cellWeight() const { return area / double(size()); }

  bool same_as(const Grid2& o) const {
    return n1 == o.n1 && n2 == o.n2 && (W1 - o.W1).norm() < 1e-12 && (W2 - o.W2).norm() < 1e-12;
  }
};

using cvector = std::vector<complexd>;
using dvector = std::vector<double>;

// FFTW-backed in-place 2D transforms with cached plans. Forward applies no
// normalization; inverse divides by n1*n2.
class Fft2 {
 public:
  explicit Fft2(const Grid2& g);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  void forward(cvector& data) const;
  void inverse(cvector& data) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n1_ = 0, n2_ = 0;
};

// Shared plan cache keyed by grid dimensions.
std::shared_ptr<Fft2> fft_for(const Grid2& g);

}  // namespace hexwave

#endif
