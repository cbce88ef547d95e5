#include "hexwave/strain.hpp"

#include <cmath>
#include <cstdio>

#include "hexwave/errors.hpp"
#include "hexwave/kernels.hpp"

namespace hexwave {

namespace {
double bump_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_exp_d(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

// smoothstep s(t): 0 for t<=0, 1 for t>=1
double smoothstep(double t) {
  const double a = bump_exp(t);
  const double b = bump_exp(1.0 - t);
  return a / (a + b);
}

double smoothstep_d(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = bump_exp(t), b = bump_exp(1.0 - t);
  const double da = bump_exp_d(t), db = -bump_exp_d(1.0 - t);
  const double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}
}  // namespace

double smooth_window(double x, double rc, double wc) {
  const double ax = std::abs(x);
  if (ax <= rc) return 1.0;
  if (ax >= rc + wc) return 0.0;
  return smoothstep(1.0 - (ax - rc) / wc);
}

double radial_bump(double r) {
  if (r <= 0.0) return 1.0;
  if (r >= 1.0) return 0.0;
  return smoothstep(1.0 - r);
}

namespace {
double dwindow(double x, double rc, double wc) {
  const double ax = std::abs(x);
  if (ax <= rc || ax >= rc + wc) return 0.0;
  const double sgn = x >= 0.0 ? 1.0 : -1.0;
  return smoothstep_d(1.0 - (ax - rc) / wc) * (-sgn / wc);
}
double dbump(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return -smoothstep_d(1.0 - r);
}
}  // namespace

Vec2 Deformation::displacement(const Vec2& Y) const {
  switch (kind) {
    case DeformationKind::Constant:
      return u0;
    case DeformationKind::LinearGauge:
      return Vec2(0.0, beta * Y.x() * Y.x() * smooth_window(Y.x(), rc, wc));
    case DeformationKind::ErfGauge: {
      // antiderivative of erf: x erf(x) + (e^{-x^2} - 1)/sqrt(pi)
      const double x = Y.x();
      const double integral = x * std::erf(x) + (std::exp(-x * x) - 1.0) / std::sqrt(M_PI);
      return Vec2(0.0, erfAmp * integral);
    }
    case DeformationKind::RadialBump:
      return bumpAmp * radial_bump(Y.norm() / bumpRadius);
    case DeformationKind::Gridded:
      throw Error(ErrorKind::Config, "gridded deformation has no closed-form displacement");
  }
  return Vec2::Zero();
}

Mat2 Deformation::jacobian(const Vec2& Y) const {
  Mat2 U = Mat2::Zero();
  switch (kind) {
    case DeformationKind::Constant:
      break;
    case DeformationKind::LinearGauge: {
      const double x = Y.x();
      const double chi = smooth_window(x, rc, wc);
      U(1, 0) = beta * (2.0 * x * chi + x * x * dwindow(x, rc, wc));
      break;
    }
    case DeformationKind::ErfGauge:
      U(1, 0) = erfAmp * std::erf(Y.x());
      break;
    case DeformationKind::RadialBump: {
      const double r = Y.norm();
      if (r > 1e-14 && r < bumpRadius) {
        const double d = dbump(r / bumpRadius) / bumpRadius;
        U(0, 0) = bumpAmp.x() * d * Y.x() / r;
        U(0, 1) = bumpAmp.x() * d * Y.y() / r;
        U(1, 0) = bumpAmp.y() * d * Y.x() / r;
        U(1, 1) = bumpAmp.y() * d * Y.y() / r;
      }
      break;
    }
    case DeformationKind::Gridded:
      throw Error(ErrorKind::Config, "gridded deformation has no analytic jacobian");
  }
  return U;
}

double Deformation::jacobian_bound() const {
  double mx = 0.0;
  switch (kind) {
    case DeformationKind::Constant:
      return 0.0;
    case DeformationKind::LinearGauge: {
      for (double x = -(rc + wc); x <= rc + wc; x += (rc + wc) / 400.0)
        mx = std::max(mx, jacobian(Vec2(x, 0.0)).cwiseAbs().maxCoeff());
      return mx;
    }
    case DeformationKind::ErfGauge:
      return std::abs(erfAmp);
    case DeformationKind::RadialBump: {
      for (double r = 0.0; r <= bumpRadius; r += bumpRadius / 400.0)
        mx = std::max(mx, jacobian(Vec2(r, 0.0)).cwiseAbs().maxCoeff() +
                              jacobian(Vec2(0.0, r)).cwiseAbs().maxCoeff());
      return mx;
    }
    case DeformationKind::Gridded: {
      (void)0;
      break;
    }
  }
  return mx;
}

StrainGrid jacobian_U(const Deformation& d, const Grid2& g) {
  StrainGrid out;
  out.grid = g;
  out.U.assign(g.size(), Mat2::Zero());

  if (d.analytic()) {
    // Sample with the torus wrap so windowed profiles stay exactly periodic.
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        const double t1 = double(Grid2::centered(i, g.n1)) / g.n1;
        const double t2 = double(Grid2::centered(j, g.n2)) / g.n2;
        const Vec2 Y = t1 * g.W1 + t2 * g.W2;
        out.U[g.flat(i, j)] = d.jacobian(Y);
      }
    return out;
  }

  if (!g.same_as(d.sampleGrid))
    throw Error(ErrorKind::GridMismatch, "gridded deformation evaluated on a different grid");
  // 4th-order central differences along the two lattice directions, then map
  // to Cartesian derivatives through the dual basis.
  auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
  const double twoPi = 2.0 * M_PI;
  const Mat2 toCart = (Mat2() << g.G1.x() / twoPi, g.G2.x() / twoPi, g.G1.y() / twoPi,
                       g.G2.y() / twoPi)
                          .finished();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      Mat2 dfrac;  // d u_i / d theta_a, theta = fractional coordinate * n
      for (int comp = 0; comp < 2; ++comp) {
        auto u1 = [&](int a, int b) { return d.samples[g.flat(wrap(a, g.n1), wrap(b, g.n2))][comp]; };
        const double d1 = (-u1(i + 2, j) + 8.0 * u1(i + 1, j) - 8.0 * u1(i - 1, j) + u1(i - 2, j)) / 12.0;
        const double d2 = (-u1(i, j + 2) + 8.0 * u1(i, j + 1) - 8.0 * u1(i, j - 1) + u1(i, j - 2)) / 12.0;
        dfrac(comp, 0) = d1 * g.n1;
        dfrac(comp, 1) = d2 * g.n2;
      }
      // y = (theta1/n1) W1 + ... ; d theta_a / d y = G_a/(2 pi) * n_a
      out.U[g.flat(i, j)] = dfrac * toCart.transpose();
    }
  return out;
}

GaugeFieldData pseudo_fields(const StrainGrid& sg, const DiracPointData& dpd, Flavor flavor,
                             bool allowComplexMu, double imMuTol) {
  const double reMu = dpd.mu.real(), imMu = dpd.mu.imag();
  if (!allowComplexMu && std::abs(imMu) > imMuTol * std::max(1.0, std::abs(dpd.mu)))
    throw Error(ErrorKind::ComplexMu,
                "medium has complex mu; request the general coupling explicitly");
  if (dpd.nuF <= 0.0) throw Error(ErrorKind::Numerical, "nuF must be positive");

  GaugeFieldData out;
  out.grid = sg.grid;
  out.flavor = flavor;
  out.generalMu = allowComplexMu && std::abs(imMu) > 0.0;
  const size_t n = sg.grid.size();
  out.A1.resize(n);
  out.A2.resize(n);
  out.Weff.resize(n);

  double wScale = 1.0;
  if (flavor == Flavor::Wave) {
    if (dpd.E_D <= 0.0) throw Error(ErrorKind::Numerical, "wave flavor requires E_D > 0");
    out.v = dpd.nuF / (2.0 * std::sqrt(dpd.E_D));
    wScale = -1.0 / (2.0 * std::sqrt(dpd.E_D));
  } else {
    out.v = dpd.nuF;
    wScale = 1.0;
  }

#pragma omp parallel for schedule(static)
  for (int64_t idx = 0; idx < int64_t(n); ++idx) {
    const Mat2& U = sg.U[idx];
    const double t0 = U(0, 0) + U(1, 1);
    const double t3 = U(0, 0) - U(1, 1);
    const double t1 = U(0, 1) + U(1, 0);
    const complexd t2 = complexd(0.0, 1.0) * (U(0, 1) - U(1, 0));
    out.A1[idx] = -(reMu * t3 + imMu * t1) / dpd.nuF;
    out.A2[idx] = (reMu * t1 - imMu * t3) / dpd.nuF;
    out.Weff[idx] = wScale * (dpd.xi * t0 + (dpd.xiSharp * t2).real());
  }
  out.B = magnetic_field(sg.grid, out.A1, out.A2);
  return out;
}

dvector magnetic_field(const Grid2& g, const dvector& A1, const dvector& A2) {
  auto fft = fft_for(g);
  cvector a1(g.size()), a2(g.size());
  for (size_t i = 0; i < g.size(); ++i) {
    a1[i] = A1[i];
    a2[i] = A2[i];
  }
  fft->forward(a1);
  fft->forward(a2);
  cvector bhat(g.size());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const Vec2 k = g.wavevector(i, j);
      const size_t idx = g.flat(i, j);
      bhat[idx] = complexd(0.0, 1.0) * (k.x() * a2[idx] - k.y() * a1[idx]);
    }
  fft->inverse(bhat);
  dvector B(g.size());
  for (size_t i = 0; i < g.size(); ++i) B[i] = bhat[i].real();
  return B;
}

Deformation erf_gauge_deformation(const DiracPointData& dpd, double imMuTol) {
  if (std::abs(dpd.mu.imag()) > imMuTol * std::max(1.0, std::abs(dpd.mu)))
    throw Error(ErrorKind::ComplexMu, "erf gauge deformation requires real mu");
  if (std::abs(dpd.mu.real()) == 0.0)
    throw Error(ErrorKind::ComplexMu, "erf gauge deformation requires mu != 0");
  Deformation d;
  d.kind = DeformationKind::ErfGauge;
  d.erfAmp = dpd.nuF / dpd.mu.real();
  return d;
}

void write_gauge_csv(const std::string& path, const GaugeFieldData& g) {
  FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::Config, "cannot open " + path);
  std::fprintf(f, "Y1,Y2,A1,A2,Weff,B\n");
  for (int j = 0; j < g.grid.n2; ++j)
    for (int i = 0; i < g.grid.n1; ++i) {
      const Vec2 Y = g.grid.point(i, j);
      const size_t idx = g.grid.flat(i, j);
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", Y.x(), Y.y(), g.A1[idx],
                   g.A2[idx], g.Weff[idx], g.B[idx]);
    }
  std::fclose(f);
}

}  // namespace hexwave
