#include "hexwave/field.hpp"

#include <cmath>

#include "hexwave/errors.hpp"

namespace hexwave {

complexd inner(const QuasiPeriodicField& f, const QuasiPeriodicField& g) {
  if ((f.k - g.k).norm() > 1e-9 * (1.0 + f.k.norm()))
    throw Error(ErrorKind::GridMismatch, "inner product of fields at different momenta");
  // The smaller field vanishes outside its box, so the shared box is enough.
  const int b = std::min(f.box, g.box);
  complexd s(0.0);
  for (int m2 = -b; m2 <= b; ++m2)
    for (int m1 = -b; m1 <= b; ++m1) s += std::conj(f.at(m1, m2)) * g.at(m1, m2);
  return f.lat.cellArea * s;
}

double norm(const QuasiPeriodicField& f) {
  double s = 0.0;
  for (const auto& z : f.c) s += std::norm(z);
  return std::sqrt(f.lat.cellArea * s);
}

QuasiPeriodicField operator*(complexd s, const QuasiPeriodicField& f) {
  QuasiPeriodicField out = f;
  for (auto& z : out.c) z *= s;
  return out;
}

namespace {
QuasiPeriodicField combine(const QuasiPeriodicField& f, const QuasiPeriodicField& g, double sign) {
  if ((f.k - g.k).norm() > 1e-9 * (1.0 + f.k.norm()))
    throw Error(ErrorKind::GridMismatch, "combining fields at different momenta");
  QuasiPeriodicField out(f.lat, f.k, std::max(f.box, g.box));
  for (int m2 = -out.box; m2 <= out.box; ++m2)
    for (int m1 = -out.box; m1 <= out.box; ++m1)
      out.ref(m1, m2) = f.at(m1, m2) + sign * g.at(m1, m2);
  return out;
}
}  // namespace

QuasiPeriodicField operator+(const QuasiPeriodicField& f, const QuasiPeriodicField& g) {
  return combine(f, g, 1.0);
}
QuasiPeriodicField operator-(const QuasiPeriodicField& f, const QuasiPeriodicField& g) {
  return combine(f, g, -1.0);
}

std::vector<complexd> eval_on_cell_grid(const QuasiPeriodicField& f, int n) {
  std::vector<complexd> out(size_t(n) * size_t(n), complexd(0.0));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 y = (double(i) / n) * f.lat.v1 + (double(j) / n) * f.lat.v2;
      complexd s(0.0);
      for (int m2 = -f.box; m2 <= f.box; ++m2)
        for (int m1 = -f.box; m1 <= f.box; ++m1) {
          const complexd cc = f.at(m1, m2);
          if (cc == complexd(0.0)) continue;
          s += cc * std::exp(complexd(0.0, f.momentum_of(m1, m2).dot(y)));
        }
      out[size_t(j) * n + i] = s;
    }
  }
  return out;
}

}  // namespace hexwave
