#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hopc {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}
double norm(const Vec3& a);
Vec3 normalized(const Vec3& a);

struct Frame {
  std::int32_t index = 1;  // 1-based, strictly increasing within a sequence
  std::vector<Vec3> points;
};

struct CloudSequence {
  std::vector<Frame> frames;
  double frame_rate = 30.0;
  std::int32_t subject_id = -1;   // -1 = untagged
  std::int32_t action_label = -1;

  std::size_t n_frames() const { return frames.size(); }
  std::size_t total_points() const;
};

// Structure-of-arrays point set with per-point source-frame tags. This is the
// layout every kernel consumes.
struct PointBuffer {
  std::vector<double> x, y, z;
  std::vector<std::int32_t> frame;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
  void reserve(std::size_t n);
  void push(const Vec3& p, std::int32_t f);
  Vec3 point(std::size_t i) const { return {x[i], y[i], z[i]}; }
};

// Points within radius r of `center`, drawn from one frame (tau = 0) or from
// frames merged over [t - tau, t + tau].
struct SupportVolume {
  Vec3 center;
  double r = 0;
  int tau = 0;
  PointBuffer pts;

  std::size_t size() const { return pts.size(); }
  bool empty() const { return pts.empty(); }
};

// The 20 unit directions toward the vertices of a regular dodecahedron
// (equivalently the facet centers of the icosahedron), plus the neighbor
// projection threshold psi = max pairwise dot product.
struct DirectionSet {
  int m = 20;
  std::array<Vec3, 20> axes;
  double psi = 0;
};

// Axis order is fixed so descriptors are bit-comparable across runs: the four
// vertex families in the order
//   (s0, s1, s2)            / L   for s in {-1,+1}^3
//   (0, s0*inv_phi, s1*phi) / L
//   (s0*inv_phi, s1*phi, 0) / L
//   (s0*phi, 0, s1*inv_phi) / L
// each family enumerating its sign tuple lexicographically with -1 before +1;
// phi is the golden ratio and L = sqrt(3) normalizes.
DirectionSet icosahedron_axes(int m = 20);

// Maximum dot product over all distinct axis pairs (brute-force scan).
double neighbor_threshold(const DirectionSet& ds);

// Union of the points of frames [t - tau, t + tau], clamped to the sequence
// bounds, in frame order with source tags. `t` is a 1-based frame position.
PointBuffer accumulate_window(const CloudSequence& seq, int t, int tau);

// Uniform voxel grid over a point set, CSR layout, for exact radius queries.
// Query results are identical to an exhaustive scan (ascending point index).
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const double* x, const double* y, const double* z, std::size_t n,
            double cell);
  explicit VoxelGrid(const PointBuffer& pts, double cell);

  // Appends the indices of all points with ||q - c|| <= r to out, ascending.
  void query(const Vec3& c, double r, std::vector<std::uint32_t>& out) const;

  bool valid() const { return cell_ > 0; }

 private:
  double cell_ = 0;
  double ox_ = 0, oy_ = 0, oz_ = 0;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<std::uint32_t> start_;  // cell -> slot range, size nx*ny*nz + 1
  std::vector<std::uint32_t> order_;  // slot -> original point index
  std::vector<double> xs_, ys_, zs_;  // coordinates permuted into cell order
};

// All and only points of `cloud` with ||q - p|| <= r. The grid, when given,
// must have been built over exactly `cloud`.
SupportVolume spherical_support(const PointBuffer& cloud, const Vec3& p,
                                double r, int tau = 0);
SupportVolume spherical_support(const PointBuffer& cloud, const VoxelGrid& grid,
                                const Vec3& p, double r, int tau = 0);

// Per-frame voxel grids over one sequence, built once and shared by every
// per-point support query. Frames must be indexed contiguously 1..n_f
// (loaders and generators enforce this), so frame position == frame index.
class SequenceIndex {
 public:
  SequenceIndex(const CloudSequence& seq, double cell);

  int n_frames() const { return static_cast<int>(pts_.size()); }
  const PointBuffer& frame_points(int t) const { return pts_[t - 1]; }
  const VoxelGrid& frame_grid(int t) const { return grids_[t - 1]; }

  // spatial-only support: points of frame t within r of p
  SupportVolume frame_support(const Vec3& p, int t, double r) const;

  // spatio-temporal support over frames [t - tau, t + tau], clamped; point
  // order matches spherical_support(accumulate_window(...)) exactly
  SupportVolume window_support(const Vec3& p, int t, int tau, double r) const;

 private:
  std::vector<PointBuffer> pts_;
  std::vector<VoxelGrid> grids_;
};

}  // namespace hopc
