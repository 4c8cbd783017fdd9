#pragma once

#include <optional>

#include "hopc/eigen.hpp"
#include "hopc/geometry.hpp"

namespace hopc {

// Scan helpers behind the adaptive scales. `a[i]` is the profile value at
// ladder position i; NaN marks an invalid entry and disqualifies any
// neighborhood it touches. Both return the position (not the value) of the
// first strict interior extremum, so endpoints never win.
std::optional<int> first_interior_maximum(const std::vector<double>& a);
std::optional<int> first_interior_minimum(const std::vector<double>& a);

// Adaptive spatial scale: sweep the ascending radius ladder, track the spatial
// eigenratio d'12 = l1/l2 of the support at each radius, and return the radius
// of its first strict interior local maximum. A ladder entry is valid when the
// support has >= 3 points and l1 > 0; fewer than 3 valid entries -> nullopt.
std::optional<double> adaptive_spatial_scale(const PointBuffer& cloud,
                                             const Vec3& p,
                                             const std::vector<double>& radii);
std::optional<double> adaptive_spatial_scale(const PointBuffer& cloud,
                                             const VoxelGrid& grid,
                                             const Vec3& p,
                                             const std::vector<double>& radii);

// Adaptive temporal scale: A(tau) = l2/l1 + l3/l2 of the support merged over
// [t - tau, t + tau] for tau = 1..delta_max; returns the first strict interior
// local minimum, or nullopt when there is none (constant A included).
std::optional<int> adaptive_temporal_scale(const SequenceIndex& idx,
                                           const Vec3& p, int t, double r,
                                           int delta_max);
std::optional<int> adaptive_temporal_scale(const CloudSequence& seq,
                                           const Vec3& p, int t, double r,
                                           int delta_max);

}  // namespace hopc
