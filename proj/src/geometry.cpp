#include "hopc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hopc/errors.hpp"
#include "hopc/kernels.hpp"

namespace hopc {

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  if (n == 0) return {0, 0, 0};
  return a * (1.0 / n);
}

std::size_t CloudSequence::total_points() const {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.points.size();
  return n;
}

void PointBuffer::reserve(std::size_t n) {
  x.reserve(n);
  y.reserve(n);
  z.reserve(n);
  frame.reserve(n);
}

void PointBuffer::push(const Vec3& p, std::int32_t f) {
  x.push_back(p.x);
  y.push_back(p.y);
  z.push_back(p.z);
  frame.push_back(f);
}

DirectionSet icosahedron_axes(int m) {
  if (m != 20)
    throw ConfigError("icosahedron_axes: only m=20 is supported, got " +
                      std::to_string(m));
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double inv_phi = 1.0 / phi;
  const double inv_len = 1.0 / std::sqrt(3.0);

  DirectionSet ds;
  ds.m = 20;
  int k = 0;
  static const double sgn[2] = {-1.0, 1.0};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        ds.axes[k++] = Vec3{sgn[a], sgn[b], sgn[c]} * inv_len;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      ds.axes[k++] = Vec3{0, sgn[a] * inv_phi, sgn[b] * phi} * inv_len;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      ds.axes[k++] = Vec3{sgn[a] * inv_phi, sgn[b] * phi, 0} * inv_len;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      ds.axes[k++] = Vec3{sgn[a] * phi, 0, sgn[b] * inv_phi} * inv_len;

  ds.psi = neighbor_threshold(ds);
  return ds;
}

double neighbor_threshold(const DirectionSet& ds) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < ds.m; ++i)
    for (int j = i + 1; j < ds.m; ++j)
      best = std::max(best, dot(ds.axes[i], ds.axes[j]));
  return best;
}

PointBuffer accumulate_window(const CloudSequence& seq, int t, int tau) {
  if (seq.frames.empty())
    throw DataError("accumulate_window: empty sequence");
  const int n_f = static_cast<int>(seq.frames.size());
  if (t < 1 || t > n_f)
    throw DataError("accumulate_window: frame position out of range");
  const int lo = std::max(1, t - tau);
  const int hi = std::min(n_f, t + tau);

  PointBuffer out;
  std::size_t total = 0;
  for (int f = lo; f <= hi; ++f) total += seq.frames[f - 1].points.size();
  out.reserve(total);
  for (int f = lo; f <= hi; ++f) {
    const Frame& fr = seq.frames[f - 1];
    for (const Vec3& p : fr.points) out.push(p, fr.index);
  }
  return out;
}

VoxelGrid::VoxelGrid(const double* x, const double* y, const double* z,
                     std::size_t n, double cell) {
  if (cell <= 0 || n == 0) return;
  cell_ = cell;
  double maxx, maxy, maxz;
  ox_ = maxx = x[0];
  oy_ = maxy = y[0];
  oz_ = maxz = z[0];
  for (std::size_t i = 1; i < n; ++i) {
    ox_ = std::min(ox_, x[i]);
    oy_ = std::min(oy_, y[i]);
    oz_ = std::min(oz_, z[i]);
    maxx = std::max(maxx, x[i]);
    maxy = std::max(maxy, y[i]);
    maxz = std::max(maxz, z[i]);
  }
  auto span = [&](double lo, double hi) {
    int c = static_cast<int>(std::floor((hi - lo) / cell_)) + 1;
    return std::max(c, 1);
  };
  nx_ = span(ox_, maxx);
  ny_ = span(oy_, maxy);
  nz_ = span(oz_, maxz);

  const std::size_t n_cells =
      static_cast<std::size_t>(nx_) * ny_ * nz_;
  auto cell_of = [&](double px, double py, double pz) {
    int cx = std::clamp(static_cast<int>(std::floor((px - ox_) / cell_)), 0,
                        nx_ - 1);
    int cy = std::clamp(static_cast<int>(std::floor((py - oy_) / cell_)), 0,
                        ny_ - 1);
    int cz = std::clamp(static_cast<int>(std::floor((pz - oz_) / cell_)), 0,
                        nz_ - 1);
    return (static_cast<std::size_t>(cz) * ny_ + cy) * nx_ + cx;
  };

  // counting sort into CSR; within-cell order preserves ascending point index
  start_.assign(n_cells + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++start_[cell_of(x[i], y[i], z[i]) + 1];
  for (std::size_t c = 0; c < n_cells; ++c) start_[c + 1] += start_[c];
  order_.resize(n);
  xs_.resize(n);
  ys_.resize(n);
  zs_.resize(n);
  std::vector<std::uint32_t> cursor(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t slot = cursor[cell_of(x[i], y[i], z[i])]++;
    order_[slot] = static_cast<std::uint32_t>(i);
    xs_[slot] = x[i];
    ys_[slot] = y[i];
    zs_[slot] = z[i];
  }
}

VoxelGrid::VoxelGrid(const PointBuffer& pts, double cell)
    : VoxelGrid(pts.x.data(), pts.y.data(), pts.z.data(), pts.size(), cell) {}

void VoxelGrid::query(const Vec3& c, double r,
                      std::vector<std::uint32_t>& out) const {
  if (!valid() || r <= 0) return;
  const std::size_t base = out.size();
  const int max_dim = std::max({nx_, ny_, nz_});
  const double dreach = std::floor(r / cell_) + 1;  // may be huge/inf
  const int reach =
      dreach >= max_dim ? max_dim : static_cast<int>(dreach);
  const int cx = static_cast<int>(std::floor((c.x - ox_) / cell_));
  const int cy = static_cast<int>(std::floor((c.y - oy_) / cell_));
  const int cz = static_cast<int>(std::floor((c.z - oz_) / cell_));
  const double r2 = r * r;
  const auto& ops = kernels::active();
  std::vector<std::uint32_t> hits;
  for (int gz = std::max(0, cz - reach); gz <= std::min(nz_ - 1, cz + reach);
       ++gz)
    for (int gy = std::max(0, cy - reach); gy <= std::min(ny_ - 1, cy + reach);
         ++gy)
      for (int gx = std::max(0, cx - reach);
           gx <= std::min(nx_ - 1, cx + reach); ++gx) {
        const std::size_t cell = (static_cast<std::size_t>(gz) * ny_ + gy) *
                                     nx_ + gx;
        const std::uint32_t s = start_[cell];
        const std::uint32_t e = start_[cell + 1];
        if (s == e) continue;
        hits.resize(e - s);
        const std::size_t cnt =
            ops.range_select(xs_.data() + s, ys_.data() + s, zs_.data() + s,
                             e - s, c.x, c.y, c.z, r2, hits.data());
        for (std::size_t i = 0; i < cnt; ++i)
          out.push_back(order_[s + hits[i]]);
      }
  std::sort(out.begin() + base, out.end());
}

static SupportVolume gather_support(const PointBuffer& cloud, const Vec3& p,
                                    double r, int tau,
                                    const std::vector<std::uint32_t>& idx) {
  SupportVolume sv;
  sv.center = p;
  sv.r = r;
  sv.tau = tau;
  sv.pts.reserve(idx.size());
  for (std::uint32_t i : idx)
    sv.pts.push(cloud.point(i), cloud.frame[i]);
  return sv;
}

SupportVolume spherical_support(const PointBuffer& cloud, const Vec3& p,
                                double r, int tau) {
  std::vector<std::uint32_t> idx(cloud.size());
  const auto& ops = kernels::active();
  const std::size_t cnt =
      ops.range_select(cloud.x.data(), cloud.y.data(), cloud.z.data(),
                       cloud.size(), p.x, p.y, p.z, r * r, idx.data());
  idx.resize(cnt);
  return gather_support(cloud, p, r, tau, idx);
}

SupportVolume spherical_support(const PointBuffer& cloud, const VoxelGrid& grid,
                                const Vec3& p, double r, int tau) {
  std::vector<std::uint32_t> idx;
  grid.query(p, r, idx);
  return gather_support(cloud, p, r, tau, idx);
}

SequenceIndex::SequenceIndex(const CloudSequence& seq, double cell) {
  if (seq.frames.empty()) throw DataError("SequenceIndex: empty sequence");
  pts_.reserve(seq.frames.size());
  grids_.reserve(seq.frames.size());
  for (const Frame& fr : seq.frames) {
    PointBuffer pb;
    pb.reserve(fr.points.size());
    for (const Vec3& p : fr.points) pb.push(p, fr.index);
    grids_.emplace_back(pb, cell);
    pts_.push_back(std::move(pb));
  }
}

SupportVolume SequenceIndex::frame_support(const Vec3& p, int t,
                                           double r) const {
  SupportVolume sv = spherical_support(pts_[t - 1], grids_[t - 1], p, r, 0);
  return sv;
}

SupportVolume SequenceIndex::window_support(const Vec3& p, int t, int tau,
                                            double r) const {
  const int lo = std::max(1, t - tau);
  const int hi = std::min(n_frames(), t + tau);
  SupportVolume sv;
  sv.center = p;
  sv.r = r;
  sv.tau = tau;
  std::vector<std::uint32_t> idx;
  for (int f = lo; f <= hi; ++f) {
    idx.clear();
    grids_[f - 1].query(p, r, idx);
    const PointBuffer& pb = pts_[f - 1];
    for (std::uint32_t i : idx) sv.pts.push(pb.point(i), pb.frame[i]);
  }
  return sv;
}

}  // namespace hopc
