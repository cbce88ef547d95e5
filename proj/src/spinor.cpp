#include "hexwave/spinor.hpp"

#include <cmath>
#include <cstdio>

#include "hexwave/errors.hpp"
#include "hexwave/kernels.hpp"

namespace hexwave {

complexd inner(const SpinorField& f, const SpinorField& g) {
  if (!f.grid.same_as(g.grid)) throw Error(ErrorKind::GridMismatch, "spinor grids differ");
  return f.grid.cellWeight() * (kernels::dot(f.a1, g.a1) + kernels::dot(f.a2, g.a2));
}

double norm(const SpinorField& f) {
  return std::sqrt(f.grid.cellWeight() * (kernels::norm_sq(f.a1) + kernels::norm_sq(f.a2)));
}

void scale(SpinorField& f, complexd s) {
  for (auto& z : f.a1) z *= s;
  for (auto& z : f.a2) z *= s;
}

void write_spinor_csv(const std::string& path, const SpinorField& f) {
  FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw Error(ErrorKind::Config, "cannot open " + path);
  std::fprintf(fp, "Y1,Y2,re_a1,im_a1,re_a2,im_a2\n");
  // centered traversal so the origin sits mid-domain in plots
  for (int jj = 0; jj < f.grid.n2; ++jj)
    for (int ii = 0; ii < f.grid.n1; ++ii) {
      const int i = (ii + f.grid.n1 - f.grid.n1 / 2) % f.grid.n1;
      const int j = (jj + f.grid.n2 - f.grid.n2 / 2) % f.grid.n2;
      const Vec2 Y = f.grid.point_centered(i, j);
      const size_t idx = f.grid.flat(i, j);
      std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", Y.x(), Y.y(),
                   f.a1[idx].real(), f.a1[idx].imag(), f.a2[idx].real(), f.a2[idx].imag());
    }
  std::fclose(fp);
}

void write_density_pgm(const std::string& path, const SpinorField& f) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw Error(ErrorKind::Config, "cannot open " + path);
  double mx = 0.0;
  for (size_t i = 0; i < f.grid.size(); ++i)
    mx = std::max(mx, std::norm(f.a1[i]) + std::norm(f.a2[i]));
  std::fprintf(fp, "P5\n%d %d\n255\n", f.grid.n1, f.grid.n2);
  for (int jj = f.grid.n2 - 1; jj >= 0; --jj)
    for (int ii = 0; ii < f.grid.n1; ++ii) {
      const int i = (ii + f.grid.n1 - f.grid.n1 / 2) % f.grid.n1;
      const int j = (jj + f.grid.n2 - f.grid.n2 / 2) % f.grid.n2;
      const size_t idx = f.grid.flat(i, j);
      const double d = (std::norm(f.a1[idx]) + std::norm(f.a2[idx])) / (mx > 0 ? mx : 1.0);
      const unsigned char c = static_cast<unsigned char>(std::lround(255.0 * d));
      std::fwrite(&c, 1, 1, fp);
    }
  std::fclose(fp);
}

}  // namespace hexwave
