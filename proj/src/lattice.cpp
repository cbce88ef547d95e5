#include "hexwave/lattice.hpp"

#include <cmath>
#include <numbers>

#include "hexwave/errors.hpp"

namespace hexwave {

namespace {
Mat2 rotation(double angle) {
  Mat2 r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}
}  // namespace

HoneycombLattice build_lattice(double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::Config, "lattice scale must be > 0");
  const double pi = std::numbers::pi;
  HoneycombLattice lat;
  lat.scale = scale;
  lat.v1 = scale * Vec2(std::sqrt(3.0) / 2.0, 0.5);
  lat.v2 = rotation(-pi / 3.0) * lat.v1;
  lat.R = rotation(2.0 * pi / 3.0);
  lat.tau = std::exp(std::complex<double>(0.0, 2.0 * pi / 3.0));

  // Duals from the 2x2 linear system v_i . k_j = 2*pi*delta_ij.
  Mat2 V;
  V.row(0) = lat.v1.transpose();
  V.row(1) = lat.v2.transpose();
  Mat2 Kcols = V.inverse() * (2.0 * pi * Mat2::Identity());
  lat.k1 = Kcols.col(0);
  lat.k2 = Kcols.col(1);

  lat.cellArea = std::abs(lat.v1.x() * lat.v2.y() - lat.v1.y() * lat.v2.x());
  lat.bzArea = (2.0 * pi) * (2.0 * pi) / lat.cellArea;
  lat.K = (lat.k1 - lat.k2) / 3.0;
  lat.Kprime = -lat.K;
  return lat;
}

Vec2 HoneycombLattice::dual_fractional(const Vec2& k) const {
  Mat2 B;
  B.col(0) = k1;
  B.col(1) = k2;
  return B.inverse() * k;
}

Vec2 reduce_to_bz(const HoneycombLattice& lat, const Vec2& k) {
  const Vec2 t = lat.dual_fractional(k);
  const int c1 = int(std::lround(t.x()));
  const int c2 = int(std::lround(t.y()));
  double best = std::numeric_limits<double>::infinity();
  int bm1 = c1, bm2 = c2;
  for (int m1 = c1 - 2; m1 <= c1 + 2; ++m1) {
    for (int m2 = c2 - 2; m2 <= c2 + 2; ++m2) {
      const Vec2 cand = k - lat.dual(ReciprocalIndex{m1, m2});
      const double d = cand.squaredNorm();
      if (d < best - 1e-14 * (1.0 + best)) {
        best = d;
        bm1 = m1;
        bm2 = m2;
      }
    }
  }
  return k - lat.dual(ReciprocalIndex{bm1, bm2});
}

ReciprocalIndex rotation_linear_index(const ReciprocalIndex& g) {
  // R k1 = -(k1+k2), R k2 = k1.
  return ReciprocalIndex{-g.m1 + g.m2, -g.m1};
}

RotationImage rotation_image_index(const HoneycombLattice& lat, const ReciprocalIndex& g) {
  // R(K+G) in thirds-integer dual coordinates: K = (1/3, -1/3).
  RotationImage out;
  out.index = ReciprocalIndex{g.m2 - g.m1 - 1, -g.m1};
  const Vec2 lhs = lat.R * (lat.K + lat.dual(g));
  const Vec2 rhs = lat.K + lat.dual(out.index);
  out.defect = (lhs - rhs).norm();
  out.exact = out.defect < 1e-10 * (1.0 + lhs.norm());
  if (!out.exact)
    throw Error(ErrorKind::Numerical, "rotation image of K+G is not a lattice translate of K");
  return out;
}

}  // namespace hexwave
