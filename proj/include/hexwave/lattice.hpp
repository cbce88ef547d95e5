#ifndef HEXWAVE_LATTICE_HPP
#define HEXWAVE_LATTICE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace hexwave {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Integer coordinates of a dual-lattice vector G = m1*k1 + m2*k2.
struct ReciprocalIndex {
  int m1 = 0;
  int m2 = 0;

  friend bool operator==(const ReciprocalIndex&, const ReciprocalIndex&) = default;
  friend auto operator<=>(const ReciprocalIndex&, const ReciprocalIndex&) = default;
};

// Honeycomb (triangular) lattice, its dual, and the C3 machinery shared by
// every other module. v1 = scale*(sqrt(3)/2, 1/2), v2 = v1 rotated by -pi/3,
// so K = (k1 - k2)/3 lands on a Brillouin-zone corner and the 2*pi/3 rotation
// R satisfies R*K = K - k1.
struct HoneycombLattice {
  double scale = 1.0;
  Vec2 v1, v2;    // direct basis
  Vec2 k1, k2;    // dual basis, v_i . k_j = 2*pi*delta_ij
  double cellArea = 0.0;
  double bzArea = 0.0;
  Vec2 K, Kprime;  // BZ corners, Kprime = -K
  Mat2 R;          // counter-clockwise 2*pi/3 rotation
  std::complex<double> tau;  // e^{2*pi*i/3}

  Vec2 dual(const ReciprocalIndex& g) const { return double(g.m1) * k1 + double(g.m2) * k2; }
  Vec2 dual(double t1, double t2) const { return t1 * k1 + t2 * k2; }

  // Fractional dual coordinates: k = t1*k1 + t2*k2.
  Vec2 dual_fractional(const Vec2& k) const;
};

HoneycombLattice build_lattice(double scale);

// Nearest Lambda*-translate of k to the origin; ties broken by lexicographic
// order of the subtracted (m1, m2).
Vec2 reduce_to_bz(const HoneycombLattice& lat, const Vec2& k);

struct RotationImage {
  ReciprocalIndex index;
  double defect = 0.0;  // |R(K+G) - (K+G')|
  bool exact = false;
};

// The unique G' with R(K+G) = K+G'. Integer arithmetic; the defect reports
// the numerical residual of the convention.
RotationImage rotation_image_index(const HoneycombLattice& lat, const ReciprocalIndex& g);

// Same linear action on a plain dual vector index (no K offset): R*G = G'.
ReciprocalIndex rotation_linear_index(const ReciprocalIndex& g);

struct IndexHash {
  size_t operator()(const ReciprocalIndex& g) const {
    return std::hash<int64_t>()((int64_t(g.m1) << 32) ^ uint32_t(g.m2));
  }
};

}  // namespace hexwave

#endif
