#ifndef HEXWAVE_SPINOR_HPP
#define HEXWAVE_SPINOR_HPP

#include <string>

#include "hexwave/grid2.hpp"

namespace hexwave {

// Two-component complex field on a periodic grid.
struct SpinorField {
  Grid2 grid;
  cvector a1, a2;

  SpinorField() = default;
  explicit SpinorField(const Grid2& g) : grid(g), a1(g.size(), complexd(0.0)),
                                         a2(g.size(), complexd(0.0)) {}
};

complexd inner(const SpinorField& f, const SpinorField& g);
double norm(const SpinorField& f);
void scale(SpinorField& f, complexd s);

void write_spinor_csv(const std::string& path, const SpinorField& f);
// Density |a1|^2 + |a2|^2 as a binary PGM (P5), max-normalized.
void write_density_pgm(const std::string& path, const SpinorField& f);

}  // namespace hexwave

#endif
