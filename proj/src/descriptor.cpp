#include "hopc/descriptor.hpp"

#include <algorithm>
#include <cmath>

#include "hopc/errors.hpp"
#include "hopc/scales.hpp"

namespace hopc {

std::array<double, kHopcBins> project_and_quantize(const Vec3& v,
                                                   const DirectionSet& axes) {
  std::array<double, kHopcBins> b{};
  for (int i = 0; i < axes.m; ++i) {
    const double d = dot(axes.axes[i], v);
    b[i] = d <= axes.psi ? 0.0 : d - axes.psi;
  }
  return b;
}

HopcDescriptor hopc_from_eigs(const Eigensystem& es, const DirectionSet& axes,
                              double theta) {
  HopcDescriptor out;
  if (es.lambda[0] <= 0) {
    out.discarded = true;
    out.block_mask = {true, true, true};
    return out;
  }
  const EigenRatios dr = eigenratios(es);
  bool keep[3] = {true, true, true};
  const bool a = dr.d12 > theta;
  const bool b = dr.d23 > theta;
  if (a && b) {
    // keep all three
  } else if (!a && b) {
    keep[0] = keep[1] = false;  // v1/v2 ambiguous in their plane
  } else if (a && !b) {
    keep[1] = keep[2] = false;  // v2/v3 ambiguous
  } else {
    out.discarded = true;
    out.block_mask = {true, true, true};
    return out;
  }
  for (int j = 0; j < 3; ++j) {
    if (!keep[j]) {
      out.block_mask[j] = true;
      continue;
    }
    const auto bq = project_and_quantize(es.v[j], axes);
    double n2 = 0;
    for (double e : bq) n2 += e * e;
    if (n2 == 0) {
      // cannot happen for the 20-axis set (some projection always exceeds
      // psi), but a zeroed histogram must not divide by zero
      out.block_mask[j] = true;
      continue;
    }
    const double s = es.lambda[j] / std::sqrt(n2);
    for (int i = 0; i < kHopcBins; ++i) out.h[j * kHopcBins + i] = bq[i] * s;
  }
  return out;
}

HopcDescriptor hopc_point(const Vec3& p, const SupportVolume& support,
                          const DirectionSet& axes, double theta) {
  HopcDescriptor out;
  if (support.empty()) {
    out.discarded = true;
    out.block_mask = {true, true, true};
    return out;
  }
  const ScatterMatrix S = scatter(support);
  const Eigensystem es = eig3(S);
  if (es.lambda[0] <= 0) {  // all support points coincident
    out.discarded = true;
    out.block_mask = {true, true, true};
    return out;
  }
  return hopc_from_eigs(disambiguate_signs(es, support, p), axes, theta);
}

std::vector<double> holistic_descriptor(const CloudSequence& seq,
                                        const DirectionSet& axes,
                                        const HolisticParams& prm) {
  if (seq.frames.empty()) throw DataError("holistic_descriptor: empty sequence");
  if (prm.grid.n_x < 1 || prm.grid.n_y < 1 || prm.grid.n_t < 1)
    throw ConfigError("holistic_descriptor: cell counts must be >= 1");
  const int n_f = static_cast<int>(seq.frames.size());

  // grid bounds: X/Y extents of the whole sequence, frame range for T
  double minx = 0, maxx = 0, miny = 0, maxy = 0;
  bool first = true;
  for (const Frame& fr : seq.frames)
    for (const Vec3& p : fr.points) {
      if (first) {
        minx = maxx = p.x;
        miny = maxy = p.y;
        first = false;
      } else {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
      }
    }
  if (first) throw DataError("holistic_descriptor: sequence has no points");
  const double spanx = maxx - minx;
  const double spany = maxy - miny;

  // boundary points land in the higher-index cell (floor of the scaled
  // coordinate); the top edge clamps back into the last cell
  auto cell_of = [](double v, double lo, double span, int n) {
    if (span <= 0 || n == 1) return 0;
    const int c = static_cast<int>(std::floor((v - lo) / span * n));
    return std::clamp(c, 0, n - 1);
  };

  const SequenceIndex idx(seq, prm.r);
  const std::size_t dim =
      static_cast<std::size_t>(prm.grid.cells()) * kHopcDim;
  std::vector<double> out(dim, 0.0);

  for (int t = 1; t <= n_f; ++t) {
    const Frame& fr = seq.frames[t - 1];
    const int ct = static_cast<int>((static_cast<long long>(t - 1) *
                                     prm.grid.n_t) / n_f);
    for (std::size_t pi = 0; pi < fr.points.size();
         pi += static_cast<std::size_t>(prm.stride)) {
      const Vec3& p = fr.points[pi];
      int tau = prm.tau;
      if (prm.adaptive_tau)
        tau = adaptive_temporal_scale(idx, p, t, prm.r, prm.delta_max)
                  .value_or(prm.tau);
      const SupportVolume sv = idx.window_support(p, t, tau, prm.r);
      const HopcDescriptor d = hopc_point(p, sv, axes, prm.theta);
      if (d.discarded) continue;
      const int cx = cell_of(p.x, minx, spanx, prm.grid.n_x);
      const int cy = cell_of(p.y, miny, spany, prm.grid.n_y);
      const std::size_t cell =
          (static_cast<std::size_t>(ct) * prm.grid.n_y + cy) * prm.grid.n_x +
          cx;
      double* dst = out.data() + cell * kHopcDim;
      for (int i = 0; i < kHopcDim; ++i) dst[i] += d.h[i];
    }
  }

  for (int c = 0; c < prm.grid.cells(); ++c) {
    double* blk = out.data() + static_cast<std::size_t>(c) * kHopcDim;
    double n2 = 0;
    for (int i = 0; i < kHopcDim; ++i) n2 += blk[i] * blk[i];
    if (n2 > 0) {
      const double inv = 1.0 / std::sqrt(n2);
      for (int i = 0; i < kHopcDim; ++i) blk[i] *= inv;
    }
  }
  return out;
}

}  // namespace hopc
