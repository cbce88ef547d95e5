#ifndef HEXWAVE_BLOCH_HPP
#define HEXWAVE_BLOCH_HPP

#include <Eigen/Dense>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hexwave/field.hpp"
#include "hexwave/medium.hpp"

namespace hexwave {

// Ordered plane-wave index set for the Galerkin fiber at base momentum k.
// The plain set is the max-norm ball |m| <= M; at the BZ corner it can be
// closed under the C3 index permutation so the rotation operator acts as an
// exact permutation of the basis.
struct PlaneWaveBasis {
  HoneycombLattice lat;
  Vec2 k = Vec2::Zero();
  int M = 0;
  bool rotationClosed = false;
  std::vector<ReciprocalIndex> indices;
  std::unordered_map<ReciprocalIndex, int, IndexHash> position;

  int size() const { return int(indices.size()); }
  int find(const ReciprocalIndex& g) const {
    auto it = position.find(g);
    return it == position.end() ? -1 : it->second;
  }

  static PlaneWaveBasis ball(const HoneycombLattice& lat, const Vec2& k, int M);
  // Ball closed under the affine rotation permutation at k = K.
  static PlaneWaveBasis corner_symmetrized(const HoneycombLattice& lat, int M);
};

using MatrixXc = Eigen::MatrixXcd;
using VectorXr = Eigen::VectorXd;

// Entry (G, G') = (k+G) . Ahat(G-G') . (k+G') + Vhat(G-G').
MatrixXc assemble_fiber_matrix(const FourierMedium& m, const Vec2& k, const PlaneWaveBasis& basis);
MatrixXc assemble_fiber_matrix_serial(const FourierMedium& m, const Vec2& k,
                                      const PlaneWaveBasis& basis);

struct BandResult {
  Vec2 k;
  std::vector<double> eigenvalues;                // ascending, first nbands
  std::vector<QuasiPeriodicField> eigenvectors;   // orthonormal in L2(cell)
  std::vector<double> residuals;                  // ||L(k)phi - E phi|| per band
};

BandResult compute_bands(const FourierMedium& m, const Vec2& k, int nbands, int M);
BandResult compute_bands(const FourierMedium& m, const PlaneWaveBasis& basis, int nbands);

struct BandPathResult {
  std::vector<double> arclength;
  std::vector<Vec2> kpoints;
  std::vector<std::vector<double>> bands;  // bands[sample][b]
};

BandPathResult band_path(const FourierMedium& m, const std::vector<Vec2>& waypoints,
                         int samplesPerLeg, int nbands, int M);

// Rotation operator on a K-fiber field: permutes coefficients by the affine
// C3 index action. Rejects fields away from the corner fiber.
QuasiPeriodicField apply_rotation_R(const QuasiPeriodicField& f);

// PC on a K-fiber field: coefficientwise conjugation.
QuasiPeriodicField apply_PC(const QuasiPeriodicField& f);

}  // namespace hexwave

#endif
