#ifndef HEXWAVE_FIELD_HPP
#define HEXWAVE_FIELD_HPP

#include <complex>
#include <vector>

#include "hexwave/lattice.hpp"
#include "hexwave/pauli.hpp"

namespace hexwave {

// f(y) = sum_G c_G e^{i(k+G).y}, coefficients stored on the dense index box
// max(|m1|,|m2|) <= box.
struct QuasiPeriodicField {
  HoneycombLattice lat;
  Vec2 k = Vec2::Zero();  // base momentum
  int box = 0;
  std::vector<complexd> c;

  QuasiPeriodicField() = default;
  QuasiPeriodicField(const HoneycombLattice& lattice, const Vec2& momentum, int halfwidth)
      : lat(lattice), k(momentum), box(halfwidth),
        c(size_t(2 * halfwidth + 1) * size_t(2 * halfwidth + 1), complexd(0.0)) {}

  int side() const { return 2 * box + 1; }
  bool contains(int m1, int m2) const {
    return std::abs(m1) <= box && std::abs(m2) <= box;
  }
  size_t flat(int m1, int m2) const {
    return size_t(m2 + box) * size_t(side()) + size_t(m1 + box);
  }
  complexd at(int m1, int m2) const { return contains(m1, m2) ? c[flat(m1, m2)] : complexd(0.0); }
  complexd& ref(int m1, int m2) { return c[flat(m1, m2)]; }

  Vec2 momentum_of(int m1, int m2) const { return k + lat.dual(ReciprocalIndex{m1, m2}); }
};

// L^2(cell) inner product by Parseval; fields must share a base momentum.
complexd inner(const QuasiPeriodicField& f, const QuasiPeriodicField& g);
double norm(const QuasiPeriodicField& f);

QuasiPeriodicField operator*(complexd s, const QuasiPeriodicField& f);
QuasiPeriodicField operator+(const QuasiPeriodicField& f, const QuasiPeriodicField& g);
QuasiPeriodicField operator-(const QuasiPeriodicField& f, const QuasiPeriodicField& g);

// Values on the fractional n x n cell grid y = (i/n) v1 + (j/n) v2, row-major
// with i fastest. Direct summation; intended for modest boxes.
std::vector<complexd> eval_on_cell_grid(const QuasiPeriodicField& f, int n);

}  // namespace hexwave

#endif
