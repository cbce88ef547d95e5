#include "hexwave/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hexwave/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hexwave {

namespace {
void finalize(PlaneWaveBasis& b) {
  std::sort(b.indices.begin(), b.indices.end());
  b.position.clear();
  for (int i = 0; i < int(b.indices.size()); ++i) b.position[b.indices[i]] = i;
}
}  // namespace

PlaneWaveBasis PlaneWaveBasis::ball(const HoneycombLattice& lat, const Vec2& k, int M) {
  PlaneWaveBasis b;
  b.lat = lat;
  b.k = k;
  b.M = M;
  for (int m2 = -M; m2 <= M; ++m2)
    for (int m1 = -M; m1 <= M; ++m1) b.indices.push_back({m1, m2});
  finalize(b);
  return b;
}

PlaneWaveBasis PlaneWaveBasis::corner_symmetrized(const HoneycombLattice& lat, int M) {
  PlaneWaveBasis b;
  b.lat = lat;
  b.k = lat.K;
  b.M = M;
  b.rotationClosed = true;
  std::set<std::pair<int, int>> seen;
  for (int m2 = -M; m2 <= M; ++m2)
    for (int m1 = -M; m1 <= M; ++m1) {
      ReciprocalIndex g{m1, m2};
      for (int r = 0; r < 3; ++r) {
        seen.insert({g.m1, g.m2});
        g = rotation_image_index(lat, g).index;
      }
    }
  for (auto& [m1, m2] : seen) b.indices.push_back({m1, m2});
  finalize(b);
  return b;
}

MatrixXc assemble_fiber_matrix_serial(const FourierMedium& m, const Vec2& k,
                                      const PlaneWaveBasis& basis) {
  const int n = basis.size();
  MatrixXc H(n, n);
  for (int col = 0; col < n; ++col) {
    const Vec2 kGp = k + basis.lat.dual(basis.indices[col]);
    for (int row = 0; row < n; ++row) {
      const ReciprocalIndex d{basis.indices[row].m1 - basis.indices[col].m1,
                              basis.indices[row].m2 - basis.indices[col].m2};
      if (!m.contains(d.m1, d.m2)) {
        H(row, col) = complexd(0.0);
        continue;
      }
      const Vec2 kG = k + basis.lat.dual(basis.indices[row]);
      const Matrix2c a = m.A_at(d.m1, d.m2);
      complexd quad(0.0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) quad += kG[i] * a(i, j) * kGp[j];
      H(row, col) = quad + m.V_at(d.m1, d.m2);
    }
  }
  return H;
}

MatrixXc assemble_fiber_matrix(const FourierMedium& m, const Vec2& k,
                               const PlaneWaveBasis& basis) {
  const int n = basis.size();
  MatrixXc H(n, n);
#pragma omp parallel for schedule(static)
  for (int col = 0; col < n; ++col) {
    const Vec2 kGp = k + basis.lat.dual(basis.indices[col]);
    for (int row = 0; row < n; ++row) {
      const ReciprocalIndex d{basis.indices[row].m1 - basis.indices[col].m1,
                              basis.indices[row].m2 - basis.indices[col].m2};
      if (!m.contains(d.m1, d.m2)) {
        H(row, col) = complexd(0.0);
        continue;
      }
      const Vec2 kG = k + basis.lat.dual(basis.indices[row]);
      const Matrix2c a = m.A_at(d.m1, d.m2);
      complexd quad(0.0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) quad += kG[i] * a(i, j) * kGp[j];
      H(row, col) = quad + m.V_at(d.m1, d.m2);
    }
  }
  return H;
}

BandResult compute_bands(const FourierMedium& m, const PlaneWaveBasis& basis, int nbands) {
  const int n = basis.size();
  if (nbands > n) throw Error(ErrorKind::Config, "nbands exceeds basis size");
  const MatrixXc H = assemble_fiber_matrix(m, basis.k, basis);
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(H);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::Numerical, "Hermitian eigensolver failed on the fiber matrix");

  BandResult out;
  out.k = basis.k;
  const double cellNorm = 1.0 / std::sqrt(basis.lat.cellArea);
  // basis may contain indices beyond the max-norm ball M (rotation closure)
  int maxnorm = basis.M;
  for (const auto& g : basis.indices) maxnorm = std::max({maxnorm, std::abs(g.m1), std::abs(g.m2)});
  for (int b = 0; b < nbands; ++b) {
    out.eigenvalues.push_back(es.eigenvalues()(b));
    QuasiPeriodicField phi(basis.lat, basis.k, maxnorm);
    for (int i = 0; i < n; ++i)
      phi.ref(basis.indices[i].m1, basis.indices[i].m2) = es.eigenvectors()(i, b) * cellNorm;
    const Eigen::VectorXcd r =
        H * es.eigenvectors().col(b) - es.eigenvalues()(b) * es.eigenvectors().col(b);
    out.residuals.push_back(r.norm());
    out.eigenvectors.push_back(std::move(phi));
  }
  return out;
}

BandResult compute_bands(const FourierMedium& m, const Vec2& k, int nbands, int M) {
  return compute_bands(m, PlaneWaveBasis::ball(m.lat, k, M), nbands);
}

BandPathResult band_path(const FourierMedium& m, const std::vector<Vec2>& waypoints,
                         int samplesPerLeg, int nbands, int M) {
  if (waypoints.size() < 2) throw Error(ErrorKind::Config, "band_path needs at least 2 waypoints");
  BandPathResult out;
  std::vector<Vec2> samples;
  for (size_t w = 0; w + 1 < waypoints.size(); ++w) {
    for (int s = 0; s < samplesPerLeg; ++s) {
      const double t = double(s) / samplesPerLeg;
      samples.push_back(waypoints[w] + t * (waypoints[w + 1] - waypoints[w]));
    }
  }
  samples.push_back(waypoints.back());

  out.kpoints = samples;
  out.arclength.resize(samples.size());
  out.bands.assign(samples.size(), {});
  double s = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (i > 0) s += (samples[i] - samples[i - 1]).norm();
    out.arclength[i] = s;
  }
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < int(samples.size()); ++i) {
    BandResult b = compute_bands(m, samples[i], nbands, M);
    out.bands[i] = b.eigenvalues;
  }
  return out;
}

QuasiPeriodicField apply_rotation_R(const QuasiPeriodicField& f) {
  if ((f.k - f.lat.K).norm() > 1e-9 * (1.0 + f.lat.K.norm()))
    throw Error(ErrorKind::Config, "rotation operator only acts on the K fiber");
  // Coefficient at K+G moves to the index H with R(K+H) = K+G, i.e. the
  // inverse of the rotation_image_index map (the square of an order-3 map).
  auto dest = [&f](const ReciprocalIndex& g) {
    return rotation_image_index(f.lat, rotation_image_index(f.lat, g).index).index;
  };
  int bo = f.box;
  for (int m2 = -f.box; m2 <= f.box; ++m2)
    for (int m1 = -f.box; m1 <= f.box; ++m1) {
      if (f.at(m1, m2) == complexd(0.0)) continue;
      const auto h = dest(ReciprocalIndex{m1, m2});
      bo = std::max({bo, std::abs(h.m1), std::abs(h.m2)});
    }
  QuasiPeriodicField out(f.lat, f.k, bo);
  for (int m2 = -f.box; m2 <= f.box; ++m2)
    for (int m1 = -f.box; m1 <= f.box; ++m1) {
      const complexd cc = f.at(m1, m2);
      if (cc == complexd(0.0)) continue;
      const auto h = dest(ReciprocalIndex{m1, m2});
      out.ref(h.m1, h.m2) = cc;
    }
  return out;
}

QuasiPeriodicField apply_PC(const QuasiPeriodicField& f) {
  QuasiPeriodicField out = f;
  for (auto& z : out.c) z = std::conj(z);
  return out;
}

}  // namespace hexwave
