#include "hexwave/dirac_point.hpp"

#include <algorithm>
#include <cmath>

#include "hexwave/errors.hpp"
#include "json.hpp"

namespace hexwave {

namespace {

complexd restricted_entry(const QuasiPeriodicField& a, const QuasiPeriodicField& b) {
  return inner(a, apply_rotation_R(b));
}

QuasiPeriodicField normalized(const QuasiPeriodicField& f) {
  const double n = norm(f);
  if (n == 0.0) throw Error(ErrorKind::Numerical, "normalizing a zero field");
  return complexd(1.0 / n, 0.0) * f;
}

}  // namespace

LocateResult locate_dirac_point(const FourierMedium& m, int M, double degTol) {
  const auto basis = PlaneWaveBasis::corner_symmetrized(m.lat, M);
  const int nb = std::min(basis.size(), 10);
  BandResult bands = compute_bands(m, basis, nb);
  const auto& E = bands.eigenvalues;

  auto close = [degTol](double a, double b) { return std::abs(b - a) < degTol * (1.0 + std::abs(a)); };

  for (int b = 0; b + 1 < int(E.size()); ++b) {
    if (!close(E[b], E[b + 1])) continue;
    const bool tripleAbove = (b + 2 < int(E.size())) && close(E[b], E[b + 2]);
    const bool tripleBelow = (b > 0) && close(E[b - 1], E[b]);
    if (tripleAbove || tripleBelow)
      throw Error(ErrorKind::HigherDegeneracy,
                  "eigenvalue cluster of multiplicity > 2 at the corner fiber");
    LocateResult out;
    out.bStar = b + 1;
    out.E_D = 0.5 * (E[b] + E[b + 1]);
    out.u1 = bands.eigenvectors[b];
    out.u2 = bands.eigenvectors[b + 1];
    out.gapBelow = (b > 0) ? E[b] - E[b - 1] : std::numeric_limits<double>::infinity();
    out.gapAbove = (b + 2 < int(E.size())) ? E[b + 2] - E[b + 1]
                                           : std::numeric_limits<double>::infinity();
    // Gram-Schmidt guard; the eigensolver already returns an orthonormal pair.
    const complexd ov = inner(out.u1, out.u2);
    out.u2 = normalized(out.u2 - ov * out.u1);
    return out;
  }
  throw Error(ErrorKind::NoDegeneracyFound, "no double eigenvalue at the corner fiber");
}

std::pair<QuasiPeriodicField, QuasiPeriodicField> symmetry_adapted_basis(
    const QuasiPeriodicField& u1, const QuasiPeriodicField& u2, double tol) {
  Matrix2c Q;
  Q << restricted_entry(u1, u1), restricted_entry(u1, u2), restricted_entry(u2, u1),
      restricted_entry(u2, u2);

  Eigen::ComplexEigenSolver<Matrix2c> es(Q);
  const complexd tau = u1.lat.tau;
  int tauIdx = -1, tauBarIdx = -1;
  for (int i = 0; i < 2; ++i) {
    if (std::abs(es.eigenvalues()(i) - tau) < tol) tauIdx = i;
    if (std::abs(es.eigenvalues()(i) - std::conj(tau)) < tol) tauBarIdx = i;
  }
  if (tauIdx < 0 || tauBarIdx < 0 || tauIdx == tauBarIdx)
    throw Error(ErrorKind::SymmetryMismatch,
                "restricted rotation eigenvalues are not {tau, conj(tau)}");

  const Eigen::Vector2cd w = es.eigenvectors().col(tauIdx);
  QuasiPeriodicField Phi1 = normalized(w(0) * u1 + w(1) * u2);
  QuasiPeriodicField Phi2 = apply_PC(Phi1);

  // Verify R Phi2 = conj(tau) Phi2 and near-orthogonality.
  const QuasiPeriodicField r2 = apply_rotation_R(Phi2);
  const double res2 = norm(r2 - std::conj(tau) * Phi2);
  const double ortho = std::abs(inner(Phi1, Phi2));
  if (res2 > 1e3 * tol || ortho > 1e3 * tol)
    throw Error(ErrorKind::SymmetryMismatch, "PC partner is not the conj(tau) eigenvector");
  return {std::move(Phi1), std::move(Phi2)};
}

PhaseFixResult fix_phase(const QuasiPeriodicField& Phi1, const QuasiPeriodicField& Phi2,
                         const FourierMedium& m, double velTol) {
  const Eigen::Vector2cd w = inner_calA(m, Phi1, Phi2);
  const complexd nu0 = 0.5 * (std::conj(w(0)) + complexd(0.0, 1.0) * std::conj(w(1)));
  if (std::abs(nu0) < velTol)
    throw Error(ErrorKind::DegenerateVelocity, " |<Phi1, A Phi2>.(1,i)| below velTol");
  const double theta = -0.5 * std::arg(nu0);
  PhaseFixResult out;
  out.theta = theta;
  out.Phi1 = std::exp(complexd(0.0, theta)) * Phi1;
  out.Phi2 = apply_PC(out.Phi1);
  out.nuF = std::abs(nu0);
  return out;
}

CoefficientResult compute_coefficients(const QuasiPeriodicField& Phi1,
                                       const QuasiPeriodicField& Phi2, const FourierMedium& m,
                                       double structTol, bool throwOnViolation) {
  const auto& P = pauli();
  CoefficientResult out;
  BifurcationReport& rep = out.report;

  rep.calA11 = inner_calA(m, Phi1, Phi1);
  rep.calA12 = inner_calA(m, Phi1, Phi2);
  rep.calA21 = inner_calA(m, Phi2, Phi1);
  rep.calA22 = inner_calA(m, Phi2, Phi2);
  rep.frakA11 = inner_frakA(m, Phi1, Phi1);
  rep.frakA12 = inner_frakA(m, Phi1, Phi2);
  rep.frakA21 = inner_frakA(m, Phi2, Phi1);
  rep.frakA22 = inner_frakA(m, Phi2, Phi2);

  const complexd I(0.0, 1.0);
  const double nuF = 0.5 * std::real(std::conj(rep.calA12(0)) + I * std::conj(rep.calA12(1)));
  out.mu = 0.25 * frobenius(rep.frakA12, P.sigma3 + I * P.sigma1);
  const complexd trF11 = rep.frakA11.trace();
  out.xi = 0.5 * trF11.real();
  rep.xiImag = 0.5 * std::abs(trF11.imag());
  out.xiSharp = 0.5 * (P.sigma2 * rep.frakA11).trace();
  rep.xiSharpReal = std::abs(out.xiSharp.real());

  const double scaleA = std::max(rep.calA12.norm(), 1e-300);
  const double scaleF = std::max({rep.frakA12.norm(), rep.frakA11.norm(), 1e-300});
  const Eigen::Vector2cd oneI(complexd(1.0, 0.0), I);
  const Eigen::Vector2cd oneMinusI(complexd(1.0, 0.0), -I);
  rep.resCalA11 = rep.calA11.norm() / scaleA;
  rep.resCalA22 = rep.calA22.norm() / scaleA;
  rep.resCalA12 = (rep.calA12 - nuF * oneI).norm() / scaleA;
  rep.resCalA21 = (rep.calA21 - nuF * oneMinusI).norm() / scaleA;
  rep.resFrakA12 = (rep.frakA12 - out.mu * (P.sigma3 - I * P.sigma1)).norm() / scaleF;
  rep.resFrakA21 = (rep.frakA21 - std::conj(out.mu) * (P.sigma3 + I * P.sigma1)).norm() / scaleF;
  const Matrix2c diag = out.xi * P.sigma0 + out.xiSharp * P.sigma2;
  rep.resFrakA11 = (rep.frakA11 - diag).norm() / scaleF;
  rep.resFrakA22 = (rep.frakA22 - diag).norm() / scaleF;

  rep.maxRelResidual =
      std::max({rep.resCalA11, rep.resCalA12, rep.resCalA21, rep.resCalA22, rep.resFrakA11,
                rep.resFrakA12, rep.resFrakA21, rep.resFrakA22});
  if (throwOnViolation && rep.maxRelResidual > structTol)
    throw Error(ErrorKind::StructureViolation,
                "bifurcation inner products deviate from the sigma structure by " +
                    std::to_string(rep.maxRelResidual));
  return out;
}

DiracPipelineResult dirac_point_pipeline(const FourierMedium& m, const DiracPipelineOptions& opt) {
  std::vector<Vec2> shifts{Vec2::Zero()};
  if (opt.originShiftSearch) {
    const Vec2 c3Center = (m.lat.v1 + m.lat.v2) / 3.0;
    shifts.push_back(c3Center);
    shifts.push_back(-c3Center);
  }

  DiracPipelineResult best;
  bool haveBest = false;
  std::vector<std::pair<Vec2, double>> tried;
  std::string lastError;
  for (const Vec2& y0 : shifts) {
    try {
      const FourierMedium mm = (y0.norm() == 0.0) ? m : m.translated(y0);
      const SymmetryReport sym = check_symmetries(mm, std::max(16, 2 * mm.cutoff + 2), 1e-10);
      if (!sym.pass) {
        tried.push_back({y0, std::numeric_limits<double>::quiet_NaN()});
        continue;
      }
      const LocateResult loc = locate_dirac_point(mm, opt.M, opt.degTol);
      auto [p1, p2] = symmetry_adapted_basis(loc.u1, loc.u2);
      const PhaseFixResult pf = fix_phase(p1, p2, mm, opt.velTol);
      const CoefficientResult co = compute_coefficients(pf.Phi1, pf.Phi2, mm, opt.structTol);
      tried.push_back({y0, std::abs(co.mu.imag())});
      if (!haveBest || std::abs(co.mu.imag()) < std::abs(best.data.mu.imag())) {
        best.data.K = mm.lat.K;
        best.data.E_D = loc.E_D;
        best.data.bStar = loc.bStar;
        best.data.Phi1 = pf.Phi1;
        best.data.Phi2 = pf.Phi2;
        best.data.nuF = pf.nuF;
        best.data.mu = co.mu;
        best.data.xi = co.xi;
        best.data.xiSharp = co.xiSharp;
        best.data.originShift = y0;
        best.report = co.report;
        haveBest = true;
      }
    } catch (const Error& e) {
      lastError = e.what();
      tried.push_back({y0, std::numeric_limits<double>::quiet_NaN()});
    }
  }
  if (!haveBest)
    throw Error(ErrorKind::Numerical,
                "dirac point pipeline failed for all origin candidates; last: " + lastError);
  best.shiftCandidates = std::move(tried);
  return best;
}

ConeReport verify_cone(const FourierMedium& m, const DiracPointData& dpd,
                       const std::vector<double>& radii, const std::vector<Vec2>& directions,
                       int M) {
  ConeReport rep;
  const int nbNeeded = dpd.bStar + 1;
  std::vector<double> slopesByDir;

  for (const Vec2& dRaw : directions) {
    const Vec2 d = dRaw.normalized();
    for (double r : radii) {
      const Vec2 kappa = r * d;
      BandResult b = compute_bands(m, dpd.K + kappa, nbNeeded + 2, M);
      ConeSample s;
      s.radius = r;
      s.direction = d;
      const double Eminus = b.eigenvalues[dpd.bStar - 1];
      const double Eplus = b.eigenvalues[dpd.bStar];
      s.slope = (Eplus - Eminus) / (2.0 * r);
      s.slopeMinus = (dpd.E_D - Eminus) / r;
      s.slopePlus = (Eplus - dpd.E_D) / r;

      // Projection onto span{e^{i kappa.y} Phi1, e^{i kappa.y} Phi2}: the
      // modulated pair has the same coefficients on the shifted fiber, so the
      // projection is a plain coefficient-space Gram step.
      auto project = [&](const QuasiPeriodicField& psi) {
        QuasiPeriodicField e1 = dpd.Phi1, e2 = dpd.Phi2;
        e1.k = psi.k;
        e2.k = psi.k;
        const complexd c1 = inner(e1, psi), c2 = inner(e2, psi);
        const QuasiPeriodicField res = psi - (c1 * e1 + c2 * e2);
        return norm(res);
      };
      const double res = std::max(project(b.eigenvectors[dpd.bStar - 1]),
                                  project(b.eigenvectors[dpd.bStar]));
      s.projectionResidual = res;
      rep.samples.push_back(s);
      rep.maxRelSlopeError =
          std::max(rep.maxRelSlopeError, std::abs(s.slope - dpd.nuF) / dpd.nuF);
    }
  }

  // Direction anisotropy at the smallest radius.
  if (!radii.empty() && directions.size() > 1) {
    const double r0 = radii.front();
    std::vector<double> s0;
    for (const auto& s : rep.samples)
      if (s.radius == r0) s0.push_back(s.slope);
    for (size_t i = 0; i + 1 < s0.size(); ++i)
      rep.maxDirectionAnisotropy =
          std::max(rep.maxDirectionAnisotropy, std::abs(s0[i] - s0[i + 1]) / dpd.nuF);
  }
  if (radii.size() >= 2) {
    // ratio of projection residuals between the two smallest radii (first direction)
    double rA = 0.0, rB = 0.0;
    for (const auto& s : rep.samples) {
      if ((s.direction - directions.front().normalized()).norm() > 1e-12) continue;
      if (s.radius == radii[0]) rA = s.projectionResidual;
      if (s.radius == radii[1]) rB = s.projectionResidual;
    }
    rep.residualRatio = (rA > 0.0) ? rB / rA : 0.0;
  }
  return rep;
}

namespace {
nlohmann::json field_to_json(const QuasiPeriodicField& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int m2 = -f.box; m2 <= f.box; ++m2)
    for (int m1 = -f.box; m1 <= f.box; ++m1) {
      const complexd c = f.at(m1, m2);
      if (std::abs(c) < 1e-300) continue;
      coeffs.push_back({m1, m2, c.real(), c.imag()});
    }
  return {{"k", {f.k.x(), f.k.y()}}, {"box", f.box}, {"coefficients", coeffs}};
}
}  // namespace

std::string dirac_point_to_json(const DiracPointData& d) {
  nlohmann::json j;
  j["K"] = {d.K.x(), d.K.y()};
  j["E_D"] = d.E_D;
  j["b_star"] = d.bStar;
  j["nu_F"] = d.nuF;
  j["mu"] = {d.mu.real(), d.mu.imag()};
  j["xi"] = d.xi;
  j["xi_sharp"] = {d.xiSharp.real(), d.xiSharp.imag()};
  j["cone_fit_residual"] = d.coneFitResidual;
  j["origin_shift"] = {d.originShift.x(), d.originShift.y()};
  j["Phi1"] = field_to_json(d.Phi1);
  j["Phi2"] = field_to_json(d.Phi2);
  return j.dump(2);
}

std::string bifurcation_report_to_json(const BifurcationReport& r) {
  nlohmann::json j;
  auto vec = [](const Eigen::Vector2cd& v) {
    return nlohmann::json{{v(0).real(), v(0).imag()}, {v(1).real(), v(1).imag()}};
  };
  auto mat = [](const Matrix2c& m) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < 2; ++i)
      for (int jj = 0; jj < 2; ++jj) out.push_back({m(i, jj).real(), m(i, jj).imag()});
    return out;
  };
  j["calA"] = {{"11", vec(r.calA11)}, {"12", vec(r.calA12)}, {"21", vec(r.calA21)},
               {"22", vec(r.calA22)}};
  j["frakA"] = {{"11", mat(r.frakA11)}, {"12", mat(r.frakA12)}, {"21", mat(r.frakA21)},
                {"22", mat(r.frakA22)}};
  j["residuals"] = {{"calA11", r.resCalA11},   {"calA12", r.resCalA12},
                    {"calA21", r.resCalA21},   {"calA22", r.resCalA22},
                    {"frakA11", r.resFrakA11}, {"frakA12", r.resFrakA12},
                    {"frakA21", r.resFrakA21}, {"frakA22", r.resFrakA22},
                    {"xi_imag", r.xiImag},     {"xi_sharp_real", r.xiSharpReal},
                    {"max", r.maxRelResidual}};
  return j.dump(2);
}

}  // namespace hexwave
