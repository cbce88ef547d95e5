#include "hexwave/continuum.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "hexwave/errors.hpp"

namespace hexwave {

namespace {

// Place lattice-Fourier data (index box) on the supercell spectral array.
// Mode G = g1 k1 + g2 k2 sits at supercell index (g1*N1, g2*N2); a fiber
// field at K adds the offset (N1/3, -N2/3).
void place_modes(const Grid2& g, int N1, int N2, int off1, int off2,
                 const std::vector<std::pair<ReciprocalIndex, complexd>>& modes, cvector& spec) {
  std::fill(spec.begin(), spec.end(), complexd(0.0));
  for (const auto& [idx, c] : modes) {
    const int a = idx.m1 * N1 + off1;
    const int b = idx.m2 * N2 + off2;
    if (2 * std::abs(a) >= g.n1 || 2 * std::abs(b) >= g.n2) continue;  // not representable
    spec[g.flat(((a % g.n1) + g.n1) % g.n1, ((b % g.n2) + g.n2) % g.n2)] = c;
  }
}

cvector modes_to_grid(const Grid2& g, int N1, int N2, int off1, int off2,
                      const std::vector<std::pair<ReciprocalIndex, complexd>>& modes) {
  cvector spec(g.size());
  place_modes(g, N1, N2, off1, off2, modes, spec);
  // values = sum c e^{i k.y}: unnormalized inverse needs the n1*n2 factor
  for (auto& z : spec) z *= double(g.size());
  fft_for(g)->inverse(spec);
  return spec;
}

std::vector<std::pair<ReciprocalIndex, complexd>> medium_V_modes(const FourierMedium& m) {
  std::vector<std::pair<ReciprocalIndex, complexd>> out;
  for (int m2 = -m.cutoff; m2 <= m.cutoff; ++m2)
    for (int m1 = -m.cutoff; m1 <= m.cutoff; ++m1)
      if (m.V_at(m1, m2) != complexd(0.0)) out.push_back({{m1, m2}, m.V_at(m1, m2)});
  return out;
}

}  // namespace

StrainedOperator build_strained_operator(const FourierMedium& medium, const Deformation& def,
                                         double epsilon, int cells1, int cells2,
                                         int pointsPerCell) {
  if (cells1 % 3 != 0 || cells2 % 3 != 0)
    throw Error(ErrorKind::Config, "supercell cell counts must be divisible by 3");
  StrainedOperator op;
  op.medium = medium;
  op.deformation = def;
  op.epsilon = epsilon;
  op.cells1 = cells1;
  op.cells2 = cells2;
  op.pointsPerCell = pointsPerCell;
  const Vec2 W1 = double(cells1) * medium.lat.v1;
  const Vec2 W2 = double(cells2) * medium.lat.v2;
  op.grid = Grid2(W1, W2, cells1 * pointsPerCell, cells2 * pointsPerCell);

  const size_t n = op.grid.size();
  op.detJ.assign(n, 1.0);
  op.Vgrid.assign(n, 0.0);
  op.C.resize(n);
  op.Agrid.resize(n);
  op.Ugrid.assign(n, Mat2::Zero());

  // V and A sampled spectrally (exact for band-limited media).
  {
    const cvector v = modes_to_grid(op.grid, cells1, cells2, 0, 0, medium_V_modes(medium));
    for (size_t i = 0; i < n; ++i) op.Vgrid[i] = v[i].real();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        std::vector<std::pair<ReciprocalIndex, complexd>> modes;
        for (int m2 = -medium.cutoff; m2 <= medium.cutoff; ++m2)
          for (int m1 = -medium.cutoff; m1 <= medium.cutoff; ++m1) {
            const complexd c = medium.A_at(m1, m2)(i, j);
            if (c != complexd(0.0)) modes.push_back({{m1, m2}, c});
          }
        const cvector a = modes_to_grid(op.grid, cells1, cells2, 0, 0, modes);
        cvector& slot = (i == 0) ? (j == 0 ? op.Agrid.m00 : op.Agrid.m01)
                                 : (j == 0 ? op.Agrid.m10 : op.Agrid.m11);
        slot = a;
      }
  }

  // Deformation quantities at the wrapped slow coordinate eps * y.
  double minDet = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : minDet)
  for (int j = 0; j < op.grid.n2; ++j)
    for (int i = 0; i < op.grid.n1; ++i) {
      const size_t idx = op.grid.flat(i, j);
      const Vec2 Y = epsilon * op.grid.point_centered(i, j);
      Mat2 U = Mat2::Zero();
      if (epsilon > 0.0) U = def.jacobian(Y);
      op.Ugrid[idx] = U;
      const Mat2 jac = (Mat2::Identity() + epsilon * U).inverse();
      const double dj = jac.determinant();
      minDet = std::min(minDet, dj);
      op.detJ[idx] = dj;
      Matrix2c A;
      A << op.Agrid.m00[idx], op.Agrid.m01[idx], op.Agrid.m10[idx], op.Agrid.m11[idx];
      const Matrix2c Cm = (jac.cast<complexd>() * A * jac.transpose().cast<complexd>()) / dj;
      op.C.m00[idx] = Cm(0, 0);
      op.C.m01[idx] = Cm(0, 1);
      op.C.m10[idx] = Cm(1, 0);
      op.C.m11[idx] = Cm(1, 1);
    }
  op.minDetJ = minDet;
  if (!(minDet > 0.0))
    throw Error(ErrorKind::Numerical, "deformation is not invertible at this epsilon");
  return op;
}

void LepsWorkspace::ensure(size_t n) {
  if (fhat.size() != n) {
    fhat.resize(n);
    gx.resize(n);
    gy.resize(n);
    hx.resize(n);
    hy.resize(n);
  }
}

void apply_Leps(const StrainedOperator& op, const cvector& f, cvector& out, LepsWorkspace& ws) {
  const Grid2& g = op.grid;
  const size_t n = g.size();
  if (f.size() != n) throw Error(ErrorKind::GridMismatch, "field size mismatch");
  ws.ensure(n);
  auto fft = fft_for(g);

  ws.fhat = f;
  fft->forward(ws.fhat);
  kernels::gradient_symbol(g, Vec2::Zero(), ws.fhat, ws.gx, ws.gy);
  fft->inverse(ws.gx);
  fft->inverse(ws.gy);
  kernels::apply_matrix_field(op.C, ws.gx, ws.gy, ws.hx, ws.hy);
  fft->forward(ws.hx);
  fft->forward(ws.hy);
  kernels::divergence_symbol(g, Vec2::Zero(), ws.hx, ws.hy, ws.fhat);
  fft->inverse(ws.fhat);

  out.resize(n);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < int64_t(n); ++i)
    out[i] = -op.detJ[i] * ws.fhat[i] + op.Vgrid[i] * f[i];
}

void apply_Leps_serial(const StrainedOperator& op, const cvector& f, cvector& out,
                       LepsWorkspace& ws) {
  const Grid2& g = op.grid;
  const size_t n = g.size();
  ws.ensure(n);
  auto fft = fft_for(g);
  ws.fhat = f;
  fft->forward(ws.fhat);
  kernels::gradient_symbol_serial(g, Vec2::Zero(), ws.fhat, ws.gx, ws.gy);
  fft->inverse(ws.gx);
  fft->inverse(ws.gy);
  kernels::apply_matrix_field_serial(op.C, ws.gx, ws.gy, ws.hx, ws.hy);
  fft->forward(ws.hx);
  fft->forward(ws.hy);
  kernels::divergence_symbol_serial(g, Vec2::Zero(), ws.hx, ws.hy, ws.fhat);
  fft->inverse(ws.fhat);
  out.resize(n);
  for (size_t i = 0; i < n; ++i) out[i] = -op.detJ[i] * ws.fhat[i] + op.Vgrid[i] * f[i];
}

cvector apply_Leps(const StrainedOperator& op, const cvector& f) {
  LepsWorkspace ws;
  cvector out;
  apply_Leps(op, f, out, ws);
  return out;
}

double micro_norm(const StrainedOperator& op, const cvector& f) {
  return std::sqrt(op.grid.cellWeight() * kernels::norm_sq(f));
}

complexd micro_inner(const StrainedOperator& op, const cvector& f, const cvector& g) {
  return op.grid.cellWeight() * kernels::dot(f, g);
}

complexd micro_inner_weighted(const StrainedOperator& op, const cvector& f, const cvector& g) {
  static thread_local dvector w;
  w.resize(op.detJ.size());
  for (size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / op.detJ[i];
  return op.grid.cellWeight() * kernels::dot_weighted(f, g, w);
}

cvector trace_U_frakA(const StrainedOperator& op, const cvector& f) {
  const Grid2& g = op.grid;
  const size_t n = g.size();
  auto fft = fft_for(g);

  cvector fhat = f;
  fft->forward(fhat);
  cvector gx(n), gy(n);
  kernels::gradient_symbol(g, Vec2::Zero(), fhat, gx, gy);
  fft->inverse(gx);
  fft->inverse(gy);
  const cvector* grad[2] = {&gx, &gy};

  // (frakA f)_ij = d_l(a_li g_j) + d_j(q_i), q_i = a_il g_l
  cvector q[2];
  for (int i = 0; i < 2; ++i) {
    q[i].assign(n, complexd(0.0));
    for (size_t p = 0; p < n; ++p) {
      const complexd a0 = (i == 0) ? op.Agrid.m00[p] : op.Agrid.m10[p];
      const complexd a1 = (i == 0) ? op.Agrid.m01[p] : op.Agrid.m11[p];
      q[i][p] = a0 * gx[p] + a1 * gy[p];
    }
  }

  cvector out(n, complexd(0.0));
  cvector w1(n), w2(n), dhat(n);
  for (int i = 0; i < 2; ++i) {
    // d_j q_i for j=0,1
    w1 = q[i];
    fft->forward(w1);
    kernels::gradient_symbol(g, Vec2::Zero(), w1, w2, dhat);
    fft->inverse(w2);   // d_0 q_i
    fft->inverse(dhat); // d_1 q_i
    const cvector* dq[2] = {&w2, &dhat};
    for (int j = 0; j < 2; ++j) {
      // term1 = d_l (a_li g_j): divergence of (a_0i g_j, a_1i g_j)
      cvector t1(n), t2(n);
      for (size_t p = 0; p < n; ++p) {
        const complexd a0i = (i == 0) ? op.Agrid.m00[p] : op.Agrid.m01[p];
        const complexd a1i = (i == 0) ? op.Agrid.m10[p] : op.Agrid.m11[p];
        t1[p] = a0i * (*grad[j])[p];
        t2[p] = a1i * (*grad[j])[p];
      }
      fft->forward(t1);
      fft->forward(t2);
      cvector div(n);
      kernels::divergence_symbol(g, Vec2::Zero(), t1, t2, div);
      fft->inverse(div);
      // Tr(U M) = sum_{ij} U_ji M_ij with M = frakA f
#pragma omp parallel for schedule(static)
      for (int64_t p = 0; p < int64_t(n); ++p) {
        const complexd frak = div[p] + (*dq[j])[p];
        out[p] += op.Ugrid[p](j, i) * frak;
      }
    }
  }
  return out;
}

double expansion_residual(const StrainedOperator& op, const StrainedOperator& op0,
                          const cvector& f) {
  LepsWorkspace ws;
  cvector le, l0;
  apply_Leps(op, f, le, ws);
  apply_Leps(op0, f, l0, ws);
  const cvector tr = trace_U_frakA(op, f);
  cvector r(f.size());
  for (size_t i = 0; i < f.size(); ++i) r[i] = le[i] - l0[i] - op.epsilon * tr[i];
  return micro_norm(op, r);
}

double estimate_lambda_max(const StrainedOperator& op, int iterations, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  cvector v(op.grid.size());
  for (auto& z : v) z = complexd(dist(rng), dist(rng));
  LepsWorkspace ws;
  cvector w;
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nv = std::sqrt(kernels::norm_sq(v));
    for (auto& z : v) z /= nv;
    apply_Leps(op, v, w, ws);
    lambda = std::abs(kernels::dot(v, w).real());
    std::swap(v, w);
  }
  return lambda;
}

DiracPointData MicroFiberData::as_dirac_point_data() const {
  DiracPointData d;
  d.K = Phi1.lat.K;
  d.E_D = E;
  d.Phi1 = Phi1;
  d.Phi2 = Phi2;
  d.nuF = nuF;
  d.mu = mu;
  d.xi = xi;
  d.xiSharp = xiSharp;
  return d;
}

MicroFiberData micro_fiber_data(const FourierMedium& medium, int pointsPerCell) {
  // The corner fiber of the pseudo-spectral supercell operator: P x P mode
  // labels g with N g + K-offset inside the grid's centered index range, and
  // couplings wrapped cyclically exactly as the grid wraps them. Eigenvectors
  // of this matrix are grid-exact (residual at roundoff under apply_Leps with
  // eps = 0), which keeps the Krylov propagator's content window narrow.
  const int P = pointsPerCell;
  const int g1lo = int(std::ceil(-P / 2.0 - 1.0 / 3.0));
  const int g2lo = int(std::ceil(-P / 2.0 + 1.0 / 3.0));
  const HoneycombLattice& lat = medium.lat;

  std::vector<ReciprocalIndex> labels;
  labels.reserve(size_t(P) * size_t(P));
  for (int j = 0; j < P; ++j)
    for (int i = 0; i < P; ++i) labels.push_back({g1lo + i, g2lo + j});
  auto pos = [&](int g1, int g2) {
    const int i = ((g1 - g1lo) % P + P) % P;
    const int j = ((g2 - g2lo) % P + P) % P;
    return j * P + i;
  };
  auto wavevec = [&](int flat) {
    return lat.K + lat.dual(labels[flat]);
  };

  const int nsz = P * P;
  MatrixXc H = MatrixXc::Zero(nsz, nsz);
  for (int col = 0; col < nsz; ++col) {
    const Vec2 kc = wavevec(col);
    for (int d2 = -medium.cutoff; d2 <= medium.cutoff; ++d2)
      for (int d1 = -medium.cutoff; d1 <= medium.cutoff; ++d1) {
        const Matrix2c a = medium.A_at(d1, d2);
        const complexd v = medium.V_at(d1, d2);
        if (a.norm() == 0.0 && v == complexd(0.0)) continue;
        const int row = pos(labels[col].m1 + d1, labels[col].m2 + d2);
        const Vec2 kr = wavevec(row);
        complexd quad(0.0);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) quad += kr[i] * a(i, j) * kc[j];
        H(row, col) += quad + v;
      }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(H);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::Numerical, "grid fiber eigensolve failed");

  // nearly degenerate Dirac pair: smallest consecutive gap among the low bands
  int b = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < std::min(nsz, 8); ++i) {
    const double gap = es.eigenvalues()(i + 1) - es.eigenvalues()(i);
    if (gap < best) {
      best = gap;
      b = i;
    }
  }
  MicroFiberData out;
  out.pairSplit = best;
  out.E = 0.5 * (es.eigenvalues()(b) + es.eigenvalues()(b + 1));

  const int box = std::max(std::abs(g1lo) + P - 1, std::abs(g2lo) + P - 1);
  auto unpack = [&](int column) {
    QuasiPeriodicField f(lat, lat.K, box);
    const double cellNorm = 1.0 / std::sqrt(lat.cellArea);
    for (int i = 0; i < nsz; ++i)
      f.ref(labels[i].m1, labels[i].m2) = es.eigenvectors()(i, column) * cellNorm;
    return f;
  };
  auto [p1, p2] = symmetry_adapted_basis(unpack(b), unpack(b + 1), 1e-3);
  const PhaseFixResult pf = fix_phase(p1, p2, medium);
  out.Phi1 = pf.Phi1;
  out.Phi2 = pf.Phi2;
  out.nuF = pf.nuF;
  const CoefficientResult co =
      compute_coefficients(pf.Phi1, pf.Phi2, medium, 1e-3, /*throwOnViolation=*/false);
  out.mu = co.mu;
  out.xi = co.xi;
  out.xiSharp = co.xiSharp;
  out.structResidual = co.report.maxRelResidual;
  return out;
}

cvector field_on_supercell(const QuasiPeriodicField& f, const StrainedOperator& op) {
  std::vector<std::pair<ReciprocalIndex, complexd>> modes;
  for (int m2 = -f.box; m2 <= f.box; ++m2)
    for (int m1 = -f.box; m1 <= f.box; ++m1) {
      const complexd c = f.at(m1, m2);
      if (c != complexd(0.0)) modes.push_back({{m1, m2}, c});
    }
  return modes_to_grid(op.grid, op.cells1, op.cells2, op.cells1 / 3, -op.cells2 / 3, modes);
}

cvector envelope_to_micro(const Grid2& slowGrid, const cvector& data, const Grid2& microGrid,
                          double epsilon) {
  if ((slowGrid.W1 - epsilon * microGrid.W1).norm() > 1e-9 ||
      (slowGrid.W2 - epsilon * microGrid.W2).norm() > 1e-9)
    throw Error(ErrorKind::GridMismatch, "slow grid does not span eps * micro torus");
  cvector spec = data;
  fft_for(slowGrid)->forward(spec);
  cvector out(microGrid.size(), complexd(0.0));
  const double scale = double(microGrid.size()) / double(slowGrid.size());
  for (int b = 0; b < slowGrid.n2; ++b) {
    const int bc = Grid2::centered(b, slowGrid.n2);
    if (2 * std::abs(bc) >= slowGrid.n2) continue;
    for (int a = 0; a < slowGrid.n1; ++a) {
      const int ac = Grid2::centered(a, slowGrid.n1);
      if (2 * std::abs(ac) >= slowGrid.n1) continue;
      const size_t src = slowGrid.flat(a, b);
      const size_t dst = microGrid.flat(((ac % microGrid.n1) + microGrid.n1) % microGrid.n1,
                                        ((bc % microGrid.n2) + microGrid.n2) % microGrid.n2);
      out[dst] = spec[src] * scale;
    }
  }
  fft_for(microGrid)->inverse(out);
  return out;
}

EnvelopeInitial build_envelope_initial(const StrainedOperator& op, const MicroFiberData& fiber,
                                       const Grid2& slowGrid, const SpinorField& beta0,
                                       double epsilon, Flavor flavor) {
  // Tail check on the torus cut ring.
  double mx = 0.0, edge = 0.0;
  for (int j = 0; j < slowGrid.n2; ++j)
    for (int i = 0; i < slowGrid.n1; ++i) {
      const double v = std::sqrt(std::norm(beta0.a1[slowGrid.flat(i, j)]) +
                                 std::norm(beta0.a2[slowGrid.flat(i, j)]));
      mx = std::max(mx, v);
      if (i == slowGrid.n1 / 2 || j == slowGrid.n2 / 2) edge = std::max(edge, v);
    }
  EnvelopeInitial out;
  out.tailRatio = (mx > 0.0) ? edge / mx : 0.0;
  if (out.tailRatio > 1e-8)
    throw Error(ErrorKind::SupportOverflow,
                "envelope tail at the supercell boundary: " + std::to_string(out.tailRatio));

  const cvector b1 = envelope_to_micro(slowGrid, beta0.a1, op.grid, epsilon);
  const cvector b2 = envelope_to_micro(slowGrid, beta0.a2, op.grid, epsilon);
  const cvector phi1 = field_on_supercell(fiber.Phi1, op);
  const cvector phi2 = field_on_supercell(fiber.Phi2, op);

  out.phi0.resize(op.grid.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < int64_t(op.grid.size()); ++i)
    out.phi0[i] = epsilon * (b1[i] * phi1[i] + b2[i] * phi2[i]);

  if (flavor == Flavor::Wave) {
    if (fiber.E <= 0.0) throw Error(ErrorKind::Numerical, "wave flavor requires E > 0");
    const complexd isq(0.0, std::sqrt(fiber.E));
    out.phiT0.resize(op.grid.size());
    for (size_t i = 0; i < op.grid.size(); ++i) out.phiT0[i] = isq * out.phi0[i];
  }
  return out;
}

MicroTrajectory solve_schrodinger(const StrainedOperator& op, const cvector& phi0, double T,
                                  const SchrodingerOptions& opt) {
  const size_t n = op.grid.size();
  dvector w(n);
  for (size_t i = 0; i < n; ++i) w[i] = 1.0 / op.detJ[i];
  const double cw = op.grid.cellWeight();
  auto wdot = [&](const cvector& a, const cvector& b) {
    return cw * kernels::dot_weighted(a, b, w);
  };
  auto wnorm = [&](const cvector& a) { return std::sqrt(std::real(wdot(a, a))); };

  LepsWorkspace ws;
  cvector tmp;
  double shift = opt.shift;
  if (shift == 0.0) {
    apply_Leps(op, phi0, tmp, ws);
    shift = std::real(wdot(phi0, tmp)) / std::pow(wnorm(phi0), 2);
  }

  MicroTrajectory out;
  const double flat0 = micro_norm(op, phi0);
  const double weighted0 = wnorm(phi0);
  cvector psi = phi0;
  out.times.push_back(0.0);
  out.snapshots.push_back(psi);

  const int snaps = std::max(1, opt.snapshots);
  const double dtSnap = T / snaps;
  const int stepsPerSnap = std::max(1, int(std::ceil(dtSnap / opt.dt)));
  const double dt = dtSnap / stepsPerSnap;
  out.dtUsed = dt;

  // Lanczos basis storage
  std::vector<cvector> V;
  V.reserve(opt.mMax + 1);
  std::vector<double> alpha(opt.mMax), betav(opt.mMax + 1);

  double tNow = 0.0;
  for (int snap = 1; snap <= snaps; ++snap) {
    for (int s = 0; s < stepsPerSnap; ++s) {
      const double beta0 = wnorm(psi);
      V.clear();
      V.push_back(psi);
      for (auto& z : V[0]) z /= beta0;
      betav[0] = 0.0;
      int m = 0;
      Eigen::VectorXcd weights;
      bool converged = false;
      while (m < opt.mMax && !converged) {
        apply_Leps(op, V[m], tmp, ws);
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < int64_t(n); ++i) tmp[i] -= shift * V[m][i];
        if (m > 0) kernels::axpy(complexd(-betav[m]), V[m - 1], tmp);
        alpha[m] = std::real(wdot(V[m], tmp));
        kernels::axpy(complexd(-alpha[m]), V[m], tmp);
        betav[m + 1] = 0.0;
        const double nb = wnorm(tmp);
        betav[m + 1] = nb;
        ++m;
        const bool lucky = nb < 1e-14 * (std::abs(alpha[m - 1]) + 1.0);
        if (!lucky) {
          V.push_back(tmp);
          for (auto& z : V.back()) z /= nb;
        }
        if (m >= 4 || lucky) {
          // exp(-i dt T_m) e1 via the small tridiagonal eigensolve
          Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(m, m);
          for (int i = 0; i < m; ++i) {
            Tm(i, i) = alpha[i];
            if (i + 1 < m) Tm(i, i + 1) = Tm(i + 1, i) = betav[i + 1];
          }
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);
          Eigen::VectorXcd phases(m);
          for (int i = 0; i < m; ++i)
            phases(i) = std::exp(complexd(0.0, -dt * es.eigenvalues()(i)));
          weights = es.eigenvectors().cast<complexd>() *
                    (phases.array() * es.eigenvectors().row(0).transpose().cast<complexd>().array())
                        .matrix();
          const double err = lucky ? 0.0 : std::abs(betav[m] * dt * std::abs(weights(m - 1)));
          if (lucky || err < opt.krylovTol) converged = true;
        }
      }
      if (!converged)
        throw Error(ErrorKind::Numerical,
                    "Krylov propagator did not converge at step t=" + std::to_string(tNow));
      // psi = beta0 * V * weights
#pragma omp parallel for schedule(static)
      for (int64_t i = 0; i < int64_t(n); ++i) {
        complexd acc(0.0);
        for (int q = 0; q < m; ++q) acc += weights(q) * V[q][i];
        psi[i] = beta0 * acc;
      }
      tNow += dt;
      ++out.stepsTaken;
    }
    // undo the shift phase at snapshot times
    cvector snapData = psi;
    const complexd ph = std::exp(complexd(0.0, -shift * tNow));
    for (auto& z : snapData) z *= ph;
    out.times.push_back(tNow);
    out.snapshots.push_back(std::move(snapData));
    out.normDriftFlat =
        std::max(out.normDriftFlat, std::abs(micro_norm(op, psi) - flat0) / flat0);
    out.normDriftWeighted =
        std::max(out.normDriftWeighted, std::abs(wnorm(psi) - weighted0) / weighted0);
  }
  return out;
}

MicroTrajectory solve_wave(const StrainedOperator& op, const cvector& phi0, const cvector& phiT0,
                           double T, const WaveOptions& opt) {
  const size_t n = op.grid.size();
  const double lmax = opt.lambdaMax > 0.0 ? opt.lambdaMax : estimate_lambda_max(op);
  const double dtStable = opt.dtSafety * 2.0 / std::sqrt(lmax);

  MicroTrajectory out;
  const int snaps = std::max(1, opt.snapshots);
  const double dtSnap = T / snaps;
  const int stepsPerSnap = std::max(1, int(std::ceil(dtSnap / dtStable)));
  const double dt = dtSnap / stepsPerSnap;
  out.dtUsed = dt;

  LepsWorkspace ws;
  cvector lcur(n), prev(n), cur = phi0, next(n);
  apply_Leps(op, cur, lcur, ws);
  // phi^1 = phi^0 + dt phi_t^0 - dt^2/2 L phi^0
  cvector first(n);
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < int64_t(n); ++i)
    first[i] = cur[i] + dt * phiT0[i] - 0.5 * dt * dt * lcur[i];

  out.times.push_back(0.0);
  out.snapshots.push_back(cur);

  dvector w(n);
  for (size_t i = 0; i < n; ++i) w[i] = 1.0 / op.detJ[i];
  const double cw = op.grid.cellWeight();
  auto energy = [&](const cvector& a, const cvector& b, const cvector& lb) {
    // a = phi^{n+1}, b = phi^n, lb = L phi^n
    cvector vel(n);
    for (size_t i = 0; i < n; ++i) vel[i] = (a[i] - b[i]) / dt;
    const double kin = std::real(cw * kernels::dot_weighted(vel, vel, w));
    const double pot = std::real(cw * kernels::dot_weighted(a, lb, w));
    return kin + pot;
  };

  prev = cur;
  cur = first;
  double e0 = 0.0;
  bool haveE0 = false;
  long total = 0;
  double tNow = 0.0;
  for (int snap = 1; snap <= snaps; ++snap) {
    for (int s = 0; s < stepsPerSnap; ++s) {
      // skip the very first step which was taken analytically
      if (!(snap == 1 && s == 0)) {
        apply_Leps(op, cur, lcur, ws);
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < int64_t(n); ++i)
          next[i] = 2.0 * cur[i] - prev[i] - dt * dt * lcur[i];
        if (!haveE0) {
          e0 = energy(next, cur, lcur);
          haveE0 = true;
        } else if (total % 64 == 0) {
          const double e = energy(next, cur, lcur);
          out.energyDrift = std::max(out.energyDrift, std::abs(e - e0) / std::abs(e0));
          if (std::abs(e - e0) > 0.10 * std::abs(e0))
            throw Error(ErrorKind::Numerical, "leapfrog energy grew by more than 10%");
        }
        std::swap(prev, cur);
        std::swap(cur, next);
      }
      ++total;
    }
    tNow = double(snap) * dtSnap;
    out.times.push_back(tNow);
    out.snapshots.push_back(cur);
  }
  out.stepsTaken = total;
  return out;
}

EnvelopeTrajectory solve_effective_envelope(const MicroFiberData& fiber, const Deformation& def,
                                            const Grid2& slowGrid, const SpinorField& beta0,
                                            double Tslow, Flavor flavor, double dtTarget,
                                            int snapshots) {
  const StrainGrid sg = jacobian_U(def, slowGrid);
  const DiracPointData dpd = fiber.as_dirac_point_data();
  const GaugeFieldData fields = pseudo_fields(sg, dpd, flavor, /*allowComplexMu=*/true);
  DiracOperatorSpec spec = DiracOperatorSpec::from_fields(fields);

  // Conjugate to the standard frame: schrodinger gamma = sigma1 beta,
  // wave gamma = sigma3 sigma1 alpha.
  SpinorField gamma0(slowGrid);
  if (flavor == Flavor::Schrodinger) {
    gamma0.a1 = beta0.a2;
    gamma0.a2 = beta0.a1;
  } else {
    for (size_t i = 0; i < slowGrid.size(); ++i) {
      gamma0.a1[i] = beta0.a2[i];
      gamma0.a2[i] = -beta0.a1[i];
    }
  }

  EvolveOptions opt;
  const double dtSnap = Tslow / snapshots;
  const int stepsPerSnap = std::max(1, int(std::ceil(dtSnap / dtTarget)));
  opt.dt = dtSnap / stepsPerSnap;
  opt.T = Tslow;
  opt.stride = stepsPerSnap;
  opt.trackEnergy = false;
  Trajectory traj = evolve(spec, gamma0, opt);

  EnvelopeTrajectory out;
  out.slowGrid = slowGrid;
  out.timesSlow = traj.times;
  for (auto& snap : traj.snapshots) {
    SpinorField beta(slowGrid);
    if (flavor == Flavor::Schrodinger) {
      beta.a1 = snap.a2;
      beta.a2 = snap.a1;
    } else {
      for (size_t i = 0; i < slowGrid.size(); ++i) {
        beta.a1[i] = -snap.a2[i];
        beta.a2[i] = snap.a1[i];
      }
    }
    out.beta.push_back(std::move(beta));
  }
  return out;
}

EnvelopeErrorSeries envelope_error(const StrainedOperator& op, const MicroFiberData& fiber,
                                   const MicroTrajectory& micro, const EnvelopeTrajectory& env,
                                   double epsilon, Flavor flavor) {
  if (micro.times.size() != env.timesSlow.size())
    throw Error(ErrorKind::GridMismatch, "snapshot counts differ between micro and envelope");
  const cvector phi1 = field_on_supercell(fiber.Phi1, op);
  const cvector phi2 = field_on_supercell(fiber.Phi2, op);
  EnvelopeErrorSeries out;
  const size_t n = op.grid.size();
  cvector eff(n);
  for (size_t j = 0; j < micro.times.size(); ++j) {
    const double t = micro.times[j];
    if (std::abs(env.timesSlow[j] - epsilon * t) > 1e-9 * (1.0 + std::abs(t)))
      throw Error(ErrorKind::GridMismatch, "snapshot times differ between micro and envelope");
    const complexd carrier = (flavor == Flavor::Wave)
                                 ? std::exp(complexd(0.0, std::sqrt(fiber.E) * t))
                                 : std::exp(complexd(0.0, -fiber.E * t));
    const cvector b1 = envelope_to_micro(env.slowGrid, env.beta[j].a1, op.grid, epsilon);
    const cvector b2 = envelope_to_micro(env.slowGrid, env.beta[j].a2, op.grid, epsilon);
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < int64_t(n); ++i)
      eff[i] = micro.snapshots[j][i] -
               epsilon * carrier * (b1[i] * phi1[i] + b2[i] * phi2[i]);
    const double err = micro_norm(op, eff);
    out.times.push_back(t);
    out.error.push_back(err);
    out.sup = std::max(out.sup, err);
  }
  out.supNormalized = out.sup / epsilon;
  out.phi0Norm = micro_norm(op, micro.snapshots.front());
  return out;
}

ConvergenceReport convergence_study(const ConvergenceConfig& cfg) {
  ConvergenceReport rep;
  rep.flavor = cfg.flavor;
  if (cfg.epsilons.size() < 1) throw Error(ErrorKind::Config, "epsilon list is empty");
  for (size_t i = 0; i + 1 < cfg.epsilons.size(); ++i)
    if (cfg.epsilons[i] <= cfg.epsilons[i + 1])
      throw Error(ErrorKind::Config, "epsilon list must be strictly descending");

  const HoneycombLattice lat = build_lattice(1.0);
  const FourierMedium medium = make_reference_medium(lat, cfg.V0, cfg.potentialOffset);
  const MicroFiberData fiber = micro_fiber_data(medium, cfg.pointsPerCell);

  Deformation def;
  if (cfg.controlRun) {
    def.kind = DeformationKind::Constant;
  } else {
    def.kind = DeformationKind::RadialBump;
    def.bumpAmp = cfg.bumpAmp;
    def.bumpRadius = cfg.bumpRadius;
  }

  // Slow torus fixed across the ladder; envelope solved once.
  const double eps0 = cfg.epsilons.front();
  const int cells0 = cfg.cellsAtFirst;
  const Grid2 slowGrid(eps0 * double(cells0) * lat.v1, eps0 * double(cells0) * lat.v2,
                       cfg.slowGridN, cfg.slowGridN);

  SpinorField beta0(slowGrid);
  for (int j = 0; j < slowGrid.n2; ++j)
    for (int i = 0; i < slowGrid.n1; ++i) {
      const Vec2 Y = slowGrid.point_centered(i, j);
      beta0.a1[slowGrid.flat(i, j)] =
          std::exp(-Y.squaredNorm() / (2.0 * cfg.envelopeWidth * cfg.envelopeWidth));
    }

  const EnvelopeTrajectory env = solve_effective_envelope(
      fiber, def, slowGrid, beta0, cfg.rho, cfg.flavor, cfg.dtSlowTarget, cfg.snapshots);

  for (double eps : cfg.epsilons) {
    const auto t0 = std::chrono::steady_clock::now();
    const double scale = eps0 / eps;
    const int cells = int(std::lround(cells0 * scale));
    if (std::abs(cells0 * scale - cells) > 1e-9)
      throw Error(ErrorKind::Config, "epsilon ladder must scale the supercell to integer cells");
    StrainedOperator op =
        build_strained_operator(medium, def, eps, cells, cells, cfg.pointsPerCell);
    const EnvelopeInitial init =
        build_envelope_initial(op, fiber, slowGrid, beta0, eps, cfg.flavor);

    MicroTrajectory micro;
    ValidationCase vc;
    vc.epsilon = eps;
    vc.cells = cells;
    const double T = cfg.rho / eps;
    if (cfg.flavor == Flavor::Schrodinger) {
      SchrodingerOptions so = cfg.schrodinger;
      so.snapshots = cfg.snapshots;
      micro = solve_schrodinger(op, init.phi0, T, so);
      vc.normDrift = micro.normDriftFlat;
    } else {
      WaveOptions wo;
      wo.snapshots = cfg.snapshots;
      micro = solve_wave(op, init.phi0, init.phiT0, T, wo);
      vc.energyDrift = micro.energyDrift;
    }
    const EnvelopeErrorSeries err = envelope_error(op, fiber, micro, env, eps, cfg.flavor);
    vc.supError = err.sup;
    vc.supNormalized = err.supNormalized;
    vc.runtimeSec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.cases.push_back(vc);
  }

  rep.monotone = true;
  for (size_t i = 0; i + 1 < rep.cases.size(); ++i) {
    rep.ratios.push_back(rep.cases[i].supError / rep.cases[i + 1].supError);
    if (rep.cases[i + 1].supError >= rep.cases[i].supError) rep.monotone = false;
  }
  rep.ratioPass = !rep.ratios.empty();
  for (double r : rep.ratios)
    if (r < 1.5 || r > 2.6) rep.ratioPass = false;
  return rep;
}

}  // namespace hexwave
