#include "hexwave/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "hexwave/errors.hpp"

namespace hexwave {

DiracOperatorSpec DiracOperatorSpec::free_op(const Grid2& g, double v) {
  DiracOperatorSpec s;
  s.grid = g;
  s.v = v;
  s.A1.assign(g.size(), 0.0);
  s.A2.assign(g.size(), 0.0);
  return s;
}

DiracOperatorSpec DiracOperatorSpec::from_gauge(const Grid2& g, double v, const dvector& A1,
                                                const dvector& A2, const dvector& Weff) {
  DiracOperatorSpec s;
  s.grid = g;
  s.v = v;
  s.A1 = A1;
  s.A2 = A2;
  s.M.resize(g.size());
  for (size_t i = 0; i < g.size(); ++i) {
    s.M.m00[i] = Weff[i];
    s.M.m11[i] = Weff[i];
  }
  s.hasM = true;
  return s;
}

DiracOperatorSpec DiracOperatorSpec::from_fields(const GaugeFieldData& f) {
  return from_gauge(f.grid, f.v, f.A1, f.A2, f.Weff);
}

void DiracOperatorSpec::validate() const {
  if (A1.size() != grid.size() || A2.size() != grid.size())
    throw Error(ErrorKind::GridMismatch, "gauge grids do not match the spinor grid");
  if (hasM) {
    if (M.size() != grid.size())
      throw Error(ErrorKind::GridMismatch, "matrix field does not match the grid");
    double worst = 0.0;
    for (size_t i = 0; i < M.size(); ++i) {
      worst = std::max(worst, std::abs(std::imag(M.m00[i])));
      worst = std::max(worst, std::abs(std::imag(M.m11[i])));
      worst = std::max(worst, std::abs(M.m01[i] - std::conj(M.m10[i])));
    }
    if (worst > 1e-12)
      throw Error(ErrorKind::Config, "matrix field is not Hermitian: " + std::to_string(worst));
  }
}

SpinorField apply_dirac(const DiracOperatorSpec& spec, const SpinorField& psi) {
  if (!spec.grid.same_as(psi.grid))
    throw Error(ErrorKind::GridMismatch, "operator and field grids differ");
  const Grid2& g = spec.grid;
  auto fft = fft_for(g);
  const size_t n = g.size();

  // spectral gradients of both components
  cvector h1 = psi.a1, h2 = psi.a2;
  fft->forward(h1);
  fft->forward(h2);
  cvector d1x(n), d1y(n), d2x(n), d2y(n);
  kernels::gradient_symbol(g, Vec2::Zero(), h1, d1x, d1y);
  kernels::gradient_symbol(g, Vec2::Zero(), h2, d2x, d2y);
  fft->inverse(d1x);
  fft->inverse(d1y);
  fft->inverse(d2x);
  fft->inverse(d2y);

  SpinorField out(g);
  const complexd I(0.0, 1.0);
  const double v = spec.v;
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < int64_t(n); ++i) {
    // pi_j = -i d_j - A_j acting on each component
    const complexd p1a1 = -I * d1x[i] - spec.A1[i] * psi.a1[i];
    const complexd p2a1 = -I * d1y[i] - spec.A2[i] * psi.a1[i];
    const complexd p1a2 = -I * d2x[i] - spec.A1[i] * psi.a2[i];
    const complexd p2a2 = -I * d2y[i] - spec.A2[i] * psi.a2[i];
    // (pi . sigma) psi = [[0, pi1 - i pi2],[pi1 + i pi2, 0]] psi
    out.a1[i] = v * (p1a2 - I * p2a2);
    out.a2[i] = v * (p1a1 + I * p2a1);
  }
  if (spec.hasM) {
    cvector t1(n), t2(n);
    kernels::apply_matrix_field(spec.M, psi.a1, psi.a2, t1, t2);
    kernels::axpy(complexd(1.0), t1, out.a1);
    kernels::axpy(complexd(1.0), t2, out.a2);
  }
  return out;
}

namespace {

// Cached Strang multipliers: kinetic half step in Fourier space, local full
// step in real space, both exact 2x2 exponentials of Hermitian matrices.
struct StrangCache {
  kernels::Matrix2Field kineticHalf;  // exp(-i dt/2 v k.sigma) per mode
  kernels::Matrix2Field localFull;    // exp(-i dt (-v A.sigma + M)) per point

  StrangCache(const DiracOperatorSpec& spec, double dt) {
    const Grid2& g = spec.grid;
    const size_t n = g.size();
    kineticHalf.resize(n);
    const complexd I(0.0, 1.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        const Vec2 k = g.wavevector(i, j);
        const size_t idx = g.flat(i, j);
        const double kn = k.norm();
        const double th = spec.v * kn * dt * 0.5;
        const double c = std::cos(th), s = std::sin(th);
        // k.sigma has eigen-pair structure via khat
        if (kn < 1e-300) {
          kineticHalf.m00[idx] = 1.0;
          kineticHalf.m11[idx] = 1.0;
          continue;
        }
        const double kx = k.x() / kn, ky = k.y() / kn;
        kineticHalf.m00[idx] = c;
        kineticHalf.m11[idx] = c;
        kineticHalf.m01[idx] = -I * s * complexd(kx, -ky);
        kineticHalf.m10[idx] = -I * s * complexd(kx, ky);
      }

    localFull.resize(n);
#pragma omp parallel for schedule(static)
    for (int64_t idx = 0; idx < int64_t(n); ++idx) {
      // X = -v A.sigma + M = a sigma0 + b.sigma
      double a = 0.0, b1 = -spec.v * spec.A1[idx], b2 = -spec.v * spec.A2[idx], b3 = 0.0;
      if (spec.hasM) {
        const double m00 = spec.M.m00[idx].real(), m11 = spec.M.m11[idx].real();
        a += 0.5 * (m00 + m11);
        b3 += 0.5 * (m00 - m11);
        b1 += spec.M.m01[idx].real();
        b2 += -spec.M.m01[idx].imag();
      }
      const double bn = std::sqrt(b1 * b1 + b2 * b2 + b3 * b3);
      const complexd phase = std::exp(complexd(0.0, -a * dt));
      const double c = std::cos(bn * dt);
      const double s = bn > 1e-300 ? std::sin(bn * dt) / bn : dt;
      const complexd I(0.0, 1.0);
      localFull.m00[idx] = phase * complexd(c, -s * b3 * 1.0);
      localFull.m11[idx] = phase * complexd(c, +s * b3 * 1.0);
      localFull.m01[idx] = phase * (-I * s * complexd(b1, -b2));
      localFull.m10[idx] = phase * (-I * s * complexd(b1, b2));
    }
  }
};

void strang_step(const DiracOperatorSpec& spec, const StrangCache& cache, SpinorField& psi,
                 cvector& w1, cvector& w2) {
  const Grid2& g = spec.grid;
  auto fft = fft_for(g);
  // half kinetic
  fft->forward(psi.a1);
  fft->forward(psi.a2);
  kernels::apply_matrix_field(cache.kineticHalf, psi.a1, psi.a2, w1, w2);
  std::swap(psi.a1, w1);
  std::swap(psi.a2, w2);
  fft->inverse(psi.a1);
  fft->inverse(psi.a2);
  // full local
  kernels::apply_matrix_field(cache.localFull, psi.a1, psi.a2, w1, w2);
  std::swap(psi.a1, w1);
  std::swap(psi.a2, w2);
  // half kinetic
  fft->forward(psi.a1);
  fft->forward(psi.a2);
  kernels::apply_matrix_field(cache.kineticHalf, psi.a1, psi.a2, w1, w2);
  std::swap(psi.a1, w1);
  std::swap(psi.a2, w2);
  fft->inverse(psi.a1);
  fft->inverse(psi.a2);
}

void rk4_step(const DiracOperatorSpec& spec, double dt, SpinorField& psi) {
  const complexd mi(0.0, -1.0);
  auto rhs = [&](const SpinorField& f) {
    SpinorField d = apply_dirac(spec, f);
    scale(d, mi);
    return d;
  };
  SpinorField k1 = rhs(psi);
  SpinorField t = psi;
  kernels::axpy(0.5 * dt, k1.a1, t.a1);
  kernels::axpy(0.5 * dt, k1.a2, t.a2);
  SpinorField k2 = rhs(t);
  t = psi;
  kernels::axpy(0.5 * dt, k2.a1, t.a1);
  kernels::axpy(0.5 * dt, k2.a2, t.a2);
  SpinorField k3 = rhs(t);
  t = psi;
  kernels::axpy(dt, k3.a1, t.a1);
  kernels::axpy(dt, k3.a2, t.a2);
  SpinorField k4 = rhs(t);
  const double s = dt / 6.0;
  for (size_t i = 0; i < psi.a1.size(); ++i) {
    psi.a1[i] += s * (k1.a1[i] + 2.0 * k2.a1[i] + 2.0 * k3.a1[i] + k4.a1[i]);
    psi.a2[i] += s * (k1.a2[i] + 2.0 * k2.a2[i] + 2.0 * k3.a2[i] + k4.a2[i]);
  }
}

}  // namespace

Trajectory evolve(const DiracOperatorSpec& spec, const SpinorField& psi0,
                  const EvolveOptions& opt) {
  spec.validate();
  if (!spec.grid.same_as(psi0.grid))
    throw Error(ErrorKind::GridMismatch, "initial field grid mismatch");
  if (!(opt.dt > 0.0)) throw Error(ErrorKind::Config, "dt must be positive");

  const long nsteps = std::lround(opt.T / opt.dt);
  Trajectory out;
  SpinorField psi = psi0;
  const double n0 = norm(psi0);
  const double n0sq = n0 * n0;

  auto record = [&](double t) {
    out.times.push_back(t);
    out.norms.push_back(norm(psi));
    out.fidelity.push_back(std::abs(inner(psi0, psi)) / n0sq);
    if (opt.trackEnergy) out.energy.push_back(std::real(inner(psi, apply_dirac(spec, psi))));
    out.snapshots.push_back(psi);
    out.maxNormDrift = std::max(out.maxNormDrift, std::abs(out.norms.back() - n0) / n0);
  };

  record(0.0);
  std::optional<StrangCache> cache;
  cvector w1, w2;
  if (opt.method == TimeStepper::Strang) {
    cache.emplace(spec, opt.dt);
    w1.resize(spec.grid.size());
    w2.resize(spec.grid.size());
  }
  for (long s = 1; s <= nsteps; ++s) {
    if (opt.method == TimeStepper::Strang)
      strang_step(spec, *cache, psi, w1, w2);
    else
      rk4_step(spec, opt.dt, psi);
    if (s % opt.stride == 0 || s == nsteps) record(double(s) * opt.dt);
  }
  out.stepsTaken = nsteps;
  return out;
}

double landau_energy(double v, double B0, int n, int sign) {
  if (n < 0) throw Error(ErrorKind::Config, "level index must be >= 0");
  if (n == 0) return 0.0;
  if (sign != 1 && sign != -1) throw Error(ErrorKind::Config, "sign must be +-1 for n >= 1");
  return double(sign) * v * std::sqrt(2.0 * double(n) * std::abs(B0));
}

double hermite(int n, double x) {
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * x;
  for (int m = 1; m < n; ++m) {
    const double h2 = 2.0 * x * h1 - 2.0 * double(m) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

namespace {
// psi_{n,k}(Y1,Y2) normalized along Y1.
complexd landau_scalar(double B0, int n, double k, const Vec2& Y) {
  const double aB = std::abs(B0);
  const double xi = std::sqrt(aB) * (Y.x() - k / B0);
  double logNf = 0.25 * std::log(aB / M_PI) - 0.5 * (double(n) * std::log(2.0) + std::lgamma(n + 1.0));
  const double amp = std::exp(logNf - 0.5 * xi * xi);
  return std::exp(complexd(0.0, k * Y.y())) * hermite(n, xi) * amp;
}
}  // namespace

SpinorField landau_mode(const Grid2& box, const LandauSpec& spec) {
  if (spec.n < 0) throw Error(ErrorKind::Config, "level index must be >= 0");
  if (spec.n == 0 && spec.sign != 0)
    throw Error(ErrorKind::Config, "the n=0 level admits no sign");
  if (spec.n >= 1 && spec.sign != 1 && spec.sign != -1)
    throw Error(ErrorKind::Config, "sign must be +-1 for n >= 1");
  if (std::abs(spec.B0) < 1e-300) throw Error(ErrorKind::Config, "B0 must be nonzero");
  if (std::abs(box.W1.y()) > 1e-12 || std::abs(box.W2.x()) > 1e-12)
    throw Error(ErrorKind::Config, "landau modes are built on rectangular boxes");

  // k must be commensurate with the box: k = 2 pi j / L2.
  const double L2 = box.W2.y();
  const double jreal = spec.k * L2 / (2.0 * M_PI);
  if (std::abs(jreal - std::lround(jreal)) > 1e-9)
    throw Error(ErrorKind::Config, "transverse momentum not commensurate with the box");

  // Gaussian tail at the Y1 boundary (box is centered via wrapping).
  const double L1 = box.W1.x();
  const double aB = std::abs(spec.B0);
  const double center = spec.k / spec.B0;
  const double reach = std::min(L1 / 2.0 - center, L1 / 2.0 + center);
  const double xiEdge = std::sqrt(aB) * reach;
  if (0.5 * xiEdge * xiEdge < std::log(1e12))
    throw Error(ErrorKind::BoxTooSmall, "Gaussian tail exceeds 1e-12 at the box boundary");

  SpinorField out(box);
  const double inv2 = 1.0 / std::sqrt(2.0);
  const complexd I(0.0, 1.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < box.n2; ++j)
    for (int i = 0; i < box.n1; ++i) {
      const double t1 = double(Grid2::centered(i, box.n1)) / box.n1;
      const double t2 = double(Grid2::centered(j, box.n2)) / box.n2;
      const Vec2 Y = t1 * box.W1 + t2 * box.W2;
      const size_t idx = box.flat(i, j);
      if (spec.n == 0) {
        const complexd psi0 = landau_scalar(spec.B0, 0, spec.k, Y);
        if (spec.B0 > 0) {
          out.a1[idx] = psi0;
        } else {
          out.a2[idx] = psi0;
        }
      } else {
        const complexd psin = landau_scalar(spec.B0, spec.n, spec.k, Y);
        const complexd psinm1 = landau_scalar(spec.B0, spec.n - 1, spec.k, Y);
        if (spec.B0 > 0) {
          out.a1[idx] = inv2 * I * psin;
          out.a2[idx] = inv2 * double(spec.sign) * psinm1;
        } else {
          out.a1[idx] = inv2 * double(spec.sign) * psinm1;
          out.a2[idx] = inv2 * I * psin;
        }
      }
    }
  return out;
}

SpinorField erf_zero_mode(const Grid2& box, double k) {
  if (std::abs(k) >= 1.0)
    throw Error(ErrorKind::Config, "erf zero mode requires |k| < 1 for normalizability");
  if (std::abs(box.W1.y()) > 1e-12 || std::abs(box.W2.x()) > 1e-12)
    throw Error(ErrorKind::Config, "erf zero mode is built on rectangular boxes");

  SpinorField out(box);
  // exponent(Y1) = integral_0^{Y1} (k - erf) = k Y1 - [Y1 erf(Y1) + (e^{-Y1^2}-1)/sqrt(pi)]
  std::vector<double> expo(box.n1);
  for (int i = 0; i < box.n1; ++i) {
    const double x = (double(Grid2::centered(i, box.n1)) / box.n1) * box.W1.x();
    expo[i] = k * x - (x * std::erf(x) + (std::exp(-x * x) - 1.0) / std::sqrt(M_PI));
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < box.n2; ++j)
    for (int i = 0; i < box.n1; ++i) {
      const double y = (double(Grid2::centered(j, box.n2)) / box.n2) * box.W2.y();
      out.a1[box.flat(i, j)] = std::exp(complexd(0.0, k * y)) * std::exp(expo[i]);
    }
  const double n = norm(out);
  scale(out, complexd(1.0 / n, 0.0));
  return out;
}

std::vector<double> dirac_fiber_spectrum(double v, const std::function<double(double)>& A2,
                                         const std::function<double(double)>& W, double k,
                                         const FiberSpectrumOptions& opt) {
  const int n = opt.n;
  if (n > opt.maxN)
    throw Error(ErrorKind::Config, "fiber size exceeds the configured memory guard");
  // spectral derivative matrix: P = IDFT(diag(i xi)) as a circulant
  std::vector<complexd> col(n, complexd(0.0));
  for (int m = 0; m < n; ++m) {
    const double xi = 2.0 * M_PI * double(Grid2::centered(m, n)) / opt.L1;
    for (int d = 0; d < n; ++d) {
      col[d] += complexd(0.0, xi) * std::exp(complexd(0.0, 2.0 * M_PI * double(m) * d / n)) /
                double(n);
    }
  }
  MatrixXc H = MatrixXc::Zero(2 * n, 2 * n);
  const complexd I(0.0, 1.0);
  for (int a = 0; a < n; ++a) {
    const double x = (double(Grid2::centered(a, n)) / n) * opt.L1;
    const double q = v * (k - A2(x));
    const double w = W(x);
    H(a, a) += w;
    H(n + a, n + a) += w;
    // sigma2 part: [[0, -i q],[i q, 0]]
    H(a, n + a) += -I * q;
    H(n + a, a) += I * q;
    for (int b = 0; b < n; ++b) {
      const complexd p = col[((a - b) % n + n) % n];  // P(a,b)
      // v(-i P) sigma1
      H(a, n + b) += v * (-I) * p;
      H(n + a, b) += v * (-I) * p;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::Numerical, "fiber eigensolve failed");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 2 * n);
  return ev;
}

std::vector<double> dirac_spectrum(const DiracOperatorSpec& spec, double k, int count,
                                   double window, int maxFiber) {
  spec.validate();
  const Grid2& g = spec.grid;
  // Require a Y2-independent gauge with A1 = 0 and scalar M.
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const size_t idx = g.flat(i, j);
      if (std::abs(spec.A1[idx]) > 1e-12)
        throw Error(ErrorKind::Config, "fiber reduction requires A1 = 0");
      if (std::abs(spec.A2[idx] - spec.A2[g.flat(i, 0)]) > 1e-12)
        throw Error(ErrorKind::Config, "fiber reduction requires a Y2-independent gauge");
      if (spec.hasM && (std::abs(spec.M.m01[idx]) > 1e-12 ||
                        std::abs(spec.M.m00[idx] - spec.M.m11[idx]) > 1e-12))
        throw Error(ErrorKind::Config, "fiber reduction requires a scalar potential");
    }

  FiberSpectrumOptions opt;
  opt.L1 = g.W1.x();
  opt.n = g.n1;
  opt.maxN = maxFiber;
  dvector a2(g.n1), w(g.n1, 0.0);
  for (int i = 0; i < g.n1; ++i) {
    a2[i] = spec.A2[g.flat(i, 0)];
    if (spec.hasM) w[i] = spec.M.m00[g.flat(i, 0)].real();
  }
  // fiber profiles are stored on centered coordinates
  auto a2f = [&](double x) {
    const double h = opt.L1 / opt.n;
    int i = int(std::lround(x / h));
    i = ((i % opt.n) + opt.n) % opt.n;
    return a2[i];
  };
  auto wf = [&](double x) {
    const double h = opt.L1 / opt.n;
    int i = int(std::lround(x / h));
    i = ((i % opt.n) + opt.n) % opt.n;
    return w[i];
  };
  std::vector<double> all = dirac_fiber_spectrum(spec.v, a2f, wf, k, opt);
  std::sort(all.begin(), all.end(),
            [window](double a, double b) { return std::abs(a - window) < std::abs(b - window); });
  all.resize(std::min<size_t>(count, all.size()));
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<double> superposition_nodes(double k0, double w, int count, double lo, double hi) {
  std::vector<double> nodes;
  const double a = std::max(lo, k0 - 4.0 * w);
  const double b = std::min(hi, k0 + 4.0 * w);
  for (int i = 0; i < count; ++i) nodes.push_back(a + (b - a) * double(i) / double(count - 1));
  return nodes;
}

SuperpositionResult wavepacket_superposition(const std::function<SpinorField(double)>& family,
                                             double k0, double w,
                                             const std::vector<double>& nodes) {
  if (nodes.empty()) throw Error(ErrorKind::Config, "superposition needs at least one node");
  SuperpositionResult out;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double k = nodes[i];
    double weight = std::exp(-(k - k0) * (k - k0) / (w * w));
    if (nodes.size() > 1) {
      const double h = (i == 0)                  ? nodes[1] - nodes[0]
                       : (i + 1 == nodes.size()) ? nodes[i] - nodes[i - 1]
                                                 : nodes[i + 1] - nodes[i - 1];
      weight *= 0.5 * h;
    }
    SpinorField mode = family(k);
    if (i == 0) out.packet = SpinorField(mode.grid);
    kernels::axpy(complexd(weight), mode.a1, out.packet.a1);
    kernels::axpy(complexd(weight), mode.a2, out.packet.a2);
  }
  const double n = norm(out.packet);
  if (n == 0.0) throw Error(ErrorKind::Numerical, "superposition vanished");
  out.normalization = 1.0 / n;
  scale(out.packet, complexd(out.normalization, 0.0));
  return out;
}

std::vector<double> fidelity_series(const Trajectory& t) { return t.fidelity; }

}  // namespace hexwave
