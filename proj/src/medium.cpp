#include "hexwave/medium.hpp"

#include <algorithm>
#include <cmath>

#include "hexwave/errors.hpp"
#include "json.hpp"

namespace hexwave {

FourierMedium make_empty_medium(const HoneycombLattice& lat, int cutoff) {
  FourierMedium m;
  m.lat = lat;
  m.cutoff = cutoff;
  const size_t n = size_t(m.side()) * size_t(m.side());
  m.Ahat.assign(n, Matrix2c::Zero());
  m.Vhat.assign(n, complexd(0.0));
  return m;
}

FourierMedium make_reference_medium(const HoneycombLattice& lat, double V0, double offset) {
  FourierMedium m = make_empty_medium(lat, 1);
  m.A_ref(0, 0) = Matrix2c::Identity();
  m.V_ref(0, 0) = offset;
  const double half = 0.5 * V0;
  const int shell[3][2] = {{1, 0}, {0, 1}, {1, 1}};
  for (auto& g : shell) {
    m.V_ref(g[0], g[1]) += half;
    m.V_ref(-g[0], -g[1]) += half;
  }
  return m;
}

std::vector<Matrix2c> FourierMedium::sample_A(int n) const {
  std::vector<Matrix2c> out(size_t(n) * size_t(n), Matrix2c::Zero());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      // G.y depends only on fractional coordinates: G = m1 k1 + m2 k2,
      // y = (i/n) v1 + (j/n) v2 gives G.y = 2*pi*(m1 i + m2 j)/n.
      Matrix2c a = Matrix2c::Zero();
      for (int m2 = -cutoff; m2 <= cutoff; ++m2)
        for (int m1 = -cutoff; m1 <= cutoff; ++m1) {
          const double phase = 2.0 * M_PI * (double(m1) * i + double(m2) * j) / n;
          a += A_at(m1, m2) * std::exp(complexd(0.0, phase));
        }
      out[size_t(j) * n + i] = a;
    }
  return out;
}

std::vector<complexd> FourierMedium::sample_V(int n) const {
  std::vector<complexd> out(size_t(n) * size_t(n), complexd(0.0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      complexd v(0.0);
      for (int m2 = -cutoff; m2 <= cutoff; ++m2)
        for (int m1 = -cutoff; m1 <= cutoff; ++m1) {
          const double phase = 2.0 * M_PI * (double(m1) * i + double(m2) * j) / n;
          v += V_at(m1, m2) * std::exp(complexd(0.0, phase));
        }
      out[size_t(j) * n + i] = v;
    }
  return out;
}

FourierMedium FourierMedium::translated(const Vec2& y0) const {
  FourierMedium out = *this;
  for (int m2 = -cutoff; m2 <= cutoff; ++m2)
    for (int m1 = -cutoff; m1 <= cutoff; ++m1) {
      const complexd ph = std::exp(complexd(0.0, lat.dual(ReciprocalIndex{m1, m2}).dot(y0)));
      out.A_ref(m1, m2) = A_at(m1, m2) * ph;
      out.V_ref(m1, m2) = V_at(m1, m2) * ph;
    }
  return out;
}

double SymmetryReport::max_violation() const {
  return std::max({hermitianA, realV, pcA, pV, rotationA, rotationV});
}

SymmetryReport check_symmetries(const FourierMedium& m, int gridSize, double tol) {
  SymmetryReport rep;
  rep.tol = tol;
  if (gridSize < 2 * m.cutoff + 2) {
    rep.aliased = true;
    rep.pass = false;
    return rep;
  }
  const int n = gridSize;
  const auto A = m.sample_A(n);
  const auto V = m.sample_V(n);
  const Mat2 R = m.lat.R;
  const Eigen::Matrix2cd Rc = R.cast<complexd>();

  auto idx = [n](int i, int j) {
    const int ii = ((i % n) + n) % n;
    const int jj = ((j % n) + n) % n;
    return size_t(jj) * n + ii;
  };

  double minEig = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Matrix2c& a = A[idx(i, j)];
      const complexd v = V[idx(i, j)];
      rep.hermitianA = std::max(rep.hermitianA, (a - a.adjoint().eval()).norm());
      rep.realV = std::max(rep.realV, std::abs(v.imag()));
      rep.pcA = std::max(rep.pcA, (A[idx(-i, -j)] - a.conjugate()).norm());
      rep.pV = std::max(rep.pV, std::abs(V[idx(-i, -j)] - v));
      // R^-1 maps fractional (i,j) to (-i-j, i)
      rep.rotationA = std::max(rep.rotationA,
                               (A[idx(-i - j, i)] - Rc.transpose() * a * Rc).norm());
      rep.rotationV = std::max(rep.rotationV, std::abs(V[idx(-i - j, i)] - v));
      const Matrix2c h = 0.5 * (a + a.adjoint().eval());
      const double tr = h.trace().real();
      const double det = (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).real();
      const double disc = std::max(0.0, tr * tr - 4.0 * det);
      minEig = std::min(minEig, 0.5 * (tr - std::sqrt(disc)));
    }
  rep.minEigA = minEig;
  rep.pass = rep.max_violation() < tol && minEig >= m.ellipticityFloor;
  return rep;
}

std::pair<QuasiPeriodicField, QuasiPeriodicField> apply_calA(const FourierMedium& m,
                                                             const QuasiPeriodicField& f) {
  const int bo = f.box + m.cutoff;
  QuasiPeriodicField o1(f.lat, f.k, bo), o2(f.lat, f.k, bo);
  for (int n2 = -bo; n2 <= bo; ++n2)
    for (int n1 = -bo; n1 <= bo; ++n1) {
      const Vec2 kG = f.k + f.lat.dual(ReciprocalIndex{n1, n2});
      complexd s0(0.0), s1(0.0);
      const int lo2 = std::max(-f.box, n2 - m.cutoff), hi2 = std::min(f.box, n2 + m.cutoff);
      const int lo1 = std::max(-f.box, n1 - m.cutoff), hi1 = std::min(f.box, n1 + m.cutoff);
      for (int p2 = lo2; p2 <= hi2; ++p2)
        for (int p1 = lo1; p1 <= hi1; ++p1) {
          const complexd cf = f.at(p1, p2);
          if (cf == complexd(0.0)) continue;
          const Matrix2c a = m.A_at(n1 - p1, n2 - p2);
          const Vec2 kGp = f.k + f.lat.dual(ReciprocalIndex{p1, p2});
          // (calA f)_a = (1/i)[A_ab d_b f + d_b(A_ba f)]
          for (int b = 0; b < 2; ++b) {
            s0 += (a(0, b) * kGp[b] + kG[b] * a(b, 0)) * cf;
            s1 += (a(1, b) * kGp[b] + kG[b] * a(b, 1)) * cf;
          }
        }
      o1.ref(n1, n2) = s0;
      o2.ref(n1, n2) = s1;
    }
  return {std::move(o1), std::move(o2)};
}

FrakAResult apply_frakA(const FourierMedium& m, const QuasiPeriodicField& f) {
  const int bo = f.box + m.cutoff;
  FrakAResult out{QuasiPeriodicField(f.lat, f.k, bo), QuasiPeriodicField(f.lat, f.k, bo),
                  QuasiPeriodicField(f.lat, f.k, bo), QuasiPeriodicField(f.lat, f.k, bo)};
  QuasiPeriodicField* slots[2][2] = {{&out.e11, &out.e12}, {&out.e21, &out.e22}};
  for (int n2 = -bo; n2 <= bo; ++n2)
    for (int n1 = -bo; n1 <= bo; ++n1) {
      const Vec2 kG = f.k + f.lat.dual(ReciprocalIndex{n1, n2});
      Matrix2c acc = Matrix2c::Zero();
      const int lo2 = std::max(-f.box, n2 - m.cutoff), hi2 = std::min(f.box, n2 + m.cutoff);
      const int lo1 = std::max(-f.box, n1 - m.cutoff), hi1 = std::min(f.box, n1 + m.cutoff);
      for (int p2 = lo2; p2 <= hi2; ++p2)
        for (int p1 = lo1; p1 <= hi1; ++p1) {
          const complexd cf = f.at(p1, p2);
          if (cf == complexd(0.0)) continue;
          const Matrix2c a = m.A_at(n1 - p1, n2 - p2);
          const Vec2 kGp = f.k + f.lat.dual(ReciprocalIndex{p1, p2});
          // (frakA f)_ij = d_l(a_li d_j f) + d_j(a_il d_l f)
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
              complexd t(0.0);
              for (int l = 0; l < 2; ++l)
                t += kG[l] * a(l, i) * kGp[j] + kG[j] * a(i, l) * kGp[l];
              acc(i, j) -= t * cf;
            }
        }
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) slots[i][j]->ref(n1, n2) = acc(i, j);
    }
  return out;
}

QuasiPeriodicField apply_L0(const FourierMedium& m, const QuasiPeriodicField& f) {
  const int bo = f.box + m.cutoff;
  QuasiPeriodicField out(f.lat, f.k, bo);
  for (int n2 = -bo; n2 <= bo; ++n2)
    for (int n1 = -bo; n1 <= bo; ++n1) {
      const Vec2 kG = f.k + f.lat.dual(ReciprocalIndex{n1, n2});
      complexd s(0.0);
      const int lo2 = std::max(-f.box, n2 - m.cutoff), hi2 = std::min(f.box, n2 + m.cutoff);
      const int lo1 = std::max(-f.box, n1 - m.cutoff), hi1 = std::min(f.box, n1 + m.cutoff);
      for (int p2 = lo2; p2 <= hi2; ++p2)
        for (int p1 = lo1; p1 <= hi1; ++p1) {
          const complexd cf = f.at(p1, p2);
          if (cf == complexd(0.0)) continue;
          const Matrix2c a = m.A_at(n1 - p1, n2 - p2);
          const Vec2 kGp = f.k + f.lat.dual(ReciprocalIndex{p1, p2});
          complexd quad(0.0);
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) quad += kG[i] * a(i, j) * kGp[j];
          s += (quad + m.V_at(n1 - p1, n2 - p2)) * cf;
        }
      out.ref(n1, n2) = s;
    }
  return out;
}

Eigen::Vector2cd inner_calA(const FourierMedium& m, const QuasiPeriodicField& phi,
                            const QuasiPeriodicField& psi) {
  auto [a1, a2] = apply_calA(m, psi);
  return Eigen::Vector2cd(inner(phi, a1), inner(phi, a2));
}

Matrix2c inner_frakA(const FourierMedium& m, const QuasiPeriodicField& phi,
                     const QuasiPeriodicField& psi) {
  const FrakAResult r = apply_frakA(m, psi);
  Matrix2c out;
  out << inner(phi, r.e11), inner(phi, r.e12), inner(phi, r.e21), inner(phi, r.e22);
  return out;
}

std::string medium_to_json(const FourierMedium& m) {
  nlohmann::json j;
  j["lattice"] = {{"scale", m.lat.scale}};
  j["cutoff"] = m.cutoff;
  j["ellipticity_floor"] = m.ellipticityFloor;
  nlohmann::json ahat = nlohmann::json::array();
  nlohmann::json vhat = nlohmann::json::array();
  for (int m2 = -m.cutoff; m2 <= m.cutoff; ++m2)
    for (int m1 = -m.cutoff; m1 <= m.cutoff; ++m1) {
      const Matrix2c a = m.A_at(m1, m2);
      const complexd v = m.V_at(m1, m2);
      if (a.norm() == 0.0 && v == complexd(0.0)) continue;
      nlohmann::json row = {m1, m2};
      for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj) {
          row.push_back(a(i, jj).real());
          row.push_back(a(i, jj).imag());
        }
      ahat.push_back(row);
      vhat.push_back({m1, m2, v.real(), v.imag()});
    }
  j["Ahat"] = ahat;
  j["Vhat"] = vhat;
  return j.dump(2);
}

FourierMedium medium_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const double scale = j.at("lattice").at("scale").get<double>();
  FourierMedium m = make_empty_medium(build_lattice(scale), j.at("cutoff").get<int>());
  if (j.contains("ellipticity_floor")) m.ellipticityFloor = j["ellipticity_floor"].get<double>();
  for (const auto& row : j.at("Ahat")) {
    const int m1 = row.at(0).get<int>(), m2 = row.at(1).get<int>();
    if (!m.contains(m1, m2)) throw Error(ErrorKind::Config, "Ahat index outside cutoff");
    Matrix2c a;
    for (int i = 0; i < 2; ++i)
      for (int jj = 0; jj < 2; ++jj)
        a(i, jj) = complexd(row.at(2 + 2 * (2 * i + jj)).get<double>(),
                            row.at(3 + 2 * (2 * i + jj)).get<double>());
    m.A_ref(m1, m2) = a;
  }
  for (const auto& row : j.at("Vhat")) {
    const int m1 = row.at(0).get<int>(), m2 = row.at(1).get<int>();
    if (!m.contains(m1, m2)) throw Error(ErrorKind::Config, "Vhat index outside cutoff");
    m.V_ref(m1, m2) = complexd(row.at(2).get<double>(), row.at(3).get<double>());
  }
  return m;
}

}  // namespace hexwave
