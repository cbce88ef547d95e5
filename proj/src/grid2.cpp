#include "hexwave/grid2.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "hexwave/errors.hpp"

namespace hexwave {

Grid2::Grid2(const Vec2& w1, const Vec2& w2, int nx, int ny) : W1(w1), W2(w2), n1(nx), n2(ny) {
  const double cross = W1.x() * W2.y() - W1.y() * W2.x();
  if (std::abs(cross) < 1e-14) throw Error(ErrorKind::Config, "degenerate torus basis");
  area = std::abs(cross);
  const double twoPi = 2.0 * std::numbers::pi;
  // W_i . G_j = 2 pi delta_ij
  Mat2 W;
  W.row(0) = W1.transpose();
  W.row(1) = W2.transpose();
  Mat2 G = W.inverse() * (twoPi * Mat2::Identity());
  G1 = G.col(0);
  G2 = G.col(1);
}

Grid2 Grid2::rectangle(double L1, double L2, int nx, int ny) {
  return Grid2(Vec2(L1, 0.0), Vec2(0.0, L2), nx, ny);
}

struct Fft2::Impl {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

Fft2::Fft2(const Grid2& g) : impl_(new Impl), n1_(g.n1), n2_(g.n2) {
  // Plan on a scratch buffer; FFTW_ESTIMATE keeps plans deterministic.
  cvector scratch(g.size());
  fftw_complex* p = reinterpret_cast<fftw_complex*>(scratch.data());
  impl_->fwd = fftw_plan_dft_2d(n2_, n1_, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_2d(n2_, n1_, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->inv) throw Error(ErrorKind::Numerical, "fftw plan creation failed");
}

Fft2::~Fft2() = default;

void Fft2::forward(cvector& data) const {
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->fwd, p, p);
}

void Fft2::inverse(cvector& data) const {
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->inv, p, p);
  const double s = 1.0 / (double(n1_) * double(n2_));
  for (auto& z : data) z *= s;
}

std::shared_ptr<Fft2> fft_for(const Grid2& g) {
  static std::map<std::pair<int, int>, std::weak_ptr<Fft2>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{g.n1, g.n2}];
  if (auto p = slot.lock()) return p;
  auto p = std::make_shared<Fft2>(g);
  slot = p;
  return p;
}

}  // namespace hexwave
