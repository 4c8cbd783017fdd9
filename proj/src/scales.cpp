#include "hopc/scales.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hopc/kernels.hpp"

namespace hopc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// d'12 over one support, NaN when the support cannot produce a ratio
double ratio12(const PointBuffer& cloud, const VoxelGrid* grid, const Vec3& p,
               double r) {
  SupportVolume sv = grid ? spherical_support(cloud, *grid, p, r)
                          : spherical_support(cloud, p, r);
  if (sv.size() < 3) return kNaN;
  const Eigensystem es = eig3(scatter(sv));
  if (es.lambda[0] <= 0) return kNaN;
  return eigenratios(es).d12;  // +inf when l2 underflows the floor
}

std::optional<double> spatial_scan(const PointBuffer& cloud,
                                   const VoxelGrid* grid, const Vec3& p,
                                   const std::vector<double>& radii) {
  const int n = static_cast<int>(radii.size());
  if (n < 3) return std::nullopt;
  std::vector<double> v(n);
  int valid = 0;
  for (int i = 0; i < n; ++i) {
    v[i] = ratio12(cloud, grid, p, radii[i]);
    if (!std::isnan(v[i])) ++valid;
  }
  if (valid < 3) return std::nullopt;
  if (const auto i = first_interior_maximum(v)) return radii[*i];
  return std::nullopt;
}

}  // namespace

std::optional<int> first_interior_maximum(const std::vector<double>& a) {
  for (int i = 1; i + 1 < static_cast<int>(a.size()); ++i) {
    if (std::isnan(a[i - 1]) || std::isnan(a[i]) || std::isnan(a[i + 1]))
      continue;
    if (a[i] > a[i - 1] && a[i] > a[i + 1]) return i;
  }
  return std::nullopt;
}

std::optional<int> first_interior_minimum(const std::vector<double>& a) {
  for (int i = 1; i + 1 < static_cast<int>(a.size()); ++i) {
    if (std::isnan(a[i - 1]) || std::isnan(a[i]) || std::isnan(a[i + 1]))
      continue;
    if (a[i] < a[i - 1] && a[i] < a[i + 1]) return i;
  }
  return std::nullopt;
}

std::optional<double> adaptive_spatial_scale(const PointBuffer& cloud,
                                             const Vec3& p,
                                             const std::vector<double>& radii) {
  return spatial_scan(cloud, nullptr, p, radii);
}

std::optional<double> adaptive_spatial_scale(const PointBuffer& cloud,
                                             const VoxelGrid& grid,
                                             const Vec3& p,
                                             const std::vector<double>& radii) {
  return spatial_scan(cloud, &grid, p, radii);
}

std::optional<int> adaptive_temporal_scale(const SequenceIndex& idx,
                                           const Vec3& p, int t, double r,
                                           int delta_max) {
  if (delta_max < 2) return std::nullopt;
  const int n_f = idx.n_frames();
  const auto& ops = kernels::active();

  // Per-frame raw moments of centered offsets q - p within radius r; window
  // sums for every tau then cost O(1) per frame instead of a fresh scan.
  const int width = 2 * delta_max + 1;
  std::vector<double> cnt(width, 0), m1(width * 3, 0), m2(width * 6, 0);
  std::vector<std::uint32_t> hits;
  std::vector<double> cx, cy, cz;
  for (int d = -delta_max; d <= delta_max; ++d) {
    const int f = t + d;
    if (f < 1 || f > n_f) continue;
    SupportVolume sv = idx.frame_support(p, f, r);
    const std::size_t m = sv.size();
    if (m == 0) continue;
    cx.resize(m);
    cy.resize(m);
    cz.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      cx[i] = sv.pts.x[i] - p.x;
      cy[i] = sv.pts.y[i] - p.y;
      cz[i] = sv.pts.z[i] - p.z;
    }
    const int slot = d + delta_max;
    cnt[slot] = static_cast<double>(m);
    ops.sum3(cx.data(), cy.data(), cz.data(), m, &m1[slot * 3]);
    const double zero[3] = {0, 0, 0};
    ops.scatter6(cx.data(), cy.data(), cz.data(), m, zero, &m2[slot * 6]);
  }

  std::vector<double> A(delta_max + 1, kNaN);
  for (int tau = 1; tau <= delta_max; ++tau) {
    long double n = 0, s1[3] = {0, 0, 0}, s2[6] = {0, 0, 0, 0, 0, 0};
    for (int d = -tau; d <= tau; ++d) {
      const int slot = d + delta_max;
      n += cnt[slot];
      for (int k = 0; k < 3; ++k) s1[k] += m1[slot * 3 + k];
      for (int k = 0; k < 6; ++k) s2[k] += m2[slot * 6 + k];
    }
    if (n < 3) continue;
    const long double inv = 1.0L / n;
    const long double mu[3] = {s1[0] * inv, s1[1] * inv, s1[2] * inv};
    const SymMat3 C{static_cast<double>(s2[0] * inv - mu[0] * mu[0]),
                    static_cast<double>(s2[1] * inv - mu[0] * mu[1]),
                    static_cast<double>(s2[2] * inv - mu[0] * mu[2]),
                    static_cast<double>(s2[3] * inv - mu[1] * mu[1]),
                    static_cast<double>(s2[4] * inv - mu[1] * mu[2]),
                    static_cast<double>(s2[5] * inv - mu[2] * mu[2])};
    const Eigensystem es = eig3(C);
    const double l1 = es.lambda[0], l2 = es.lambda[1], l3 = es.lambda[2];
    const double fl = l1 > 0 ? 1e-12 * l1 : 1e-15;
    if (l1 < fl || l1 <= 0) continue;  // degenerate support
    double a = l2 / l1;
    a += l2 >= fl ? l3 / l2 : 0.0;  // 0/0 slab counts as 0
    A[tau] = a;
  }

  // A[0] is the unused tau = 0 slot; trim it so positions are tau - 1.
  const std::vector<double> profile(A.begin() + 1, A.end());
  if (const auto i = first_interior_minimum(profile)) return *i + 1;
  return std::nullopt;
}

std::optional<int> adaptive_temporal_scale(const CloudSequence& seq,
                                           const Vec3& p, int t, double r,
                                           int delta_max) {
  const SequenceIndex idx(seq, r);
  return adaptive_temporal_scale(idx, p, t, r, delta_max);
}

}  // namespace hopc
