#include "hopc/keypoints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hopc/errors.hpp"
#include "hopc/kernels.hpp"

namespace hopc {

std::optional<CandidatePair> candidate_filter(const SequenceIndex& idx,
                                              const Vec3& p, int t, double r,
                                              int tau, double theta) {
  SupportVolume sp = idx.frame_support(p, t, r);
  if (sp.size() < 2) return std::nullopt;  // no spatial structure
  const ScatterMatrix cs = scatter(sp);
  Eigensystem es_sp = eig3(cs);
  if (es_sp.lambda[0] <= 0) return std::nullopt;  // coincident points
  const EigenRatios rs = eigenratios(es_sp);
  if (!(rs.d12 > theta && rs.d23 > theta)) return std::nullopt;

  SupportVolume st = idx.window_support(p, t, tau, r);
  const ScatterMatrix ct = scatter(st);
  Eigensystem es_st = eig3(ct);
  if (es_st.lambda[0] <= 0) return std::nullopt;
  const EigenRatios rt = eigenratios(es_st);
  if (!(rt.d12 > theta && rt.d23 > theta)) return std::nullopt;

  CandidatePair out;
  out.spatial = disambiguate_signs(es_sp, sp, p);
  out.st = disambiguate_signs(es_st, st, p);
  out.spatial_support = std::move(sp);
  out.st_support = std::move(st);
  return out;
}

std::optional<CandidatePair> candidate_filter(const CloudSequence& seq,
                                              const Vec3& p, int t, double r,
                                              int tau, double theta) {
  const SequenceIndex idx(seq, r);
  return candidate_filter(idx, p, t, r, tau, theta);
}

double quality(const double* h_spatial, const double* h_st, std::size_t n) {
  double eta = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = h_spatial[i] + h_st[i];
    if (s == 0) continue;
    const double d = h_spatial[i] - h_st[i];
    eta += d * d / s;
  }
  return 0.5 * eta;
}

std::vector<Keypoint> detect_stkp(const CloudSequence& seq,
                                  const DirectionSet& axes,
                                  const DetectParams& prm) {
  if (seq.frames.empty()) return {};
  if (prm.theta <= 1) throw ConfigError("detect_stkp: theta must exceed 1");
  const int n_f = static_cast<int>(seq.frames.size());
  const bool adaptive_r = !prm.radii.empty();
  const double grid_cell =
      adaptive_r ? prm.radii.back() : prm.r;
  const SequenceIndex idx(seq, grid_cell);

  std::vector<Keypoint> cands;
  for (int t = 1; t <= n_f; ++t) {
    const Frame& fr = seq.frames[t - 1];
    const PointBuffer& fpts = idx.frame_points(t);
    for (std::size_t pi = 0; pi < fr.points.size();
         pi += static_cast<std::size_t>(prm.stride)) {
      const Vec3& p = fr.points[pi];

      double r = prm.r;
      if (adaptive_r) {
        const auto rb =
            adaptive_spatial_scale(fpts, idx.frame_grid(t), p, prm.radii);
        if (!rb) continue;
        r = *rb;
      }
      int tau = prm.tau;
      if (prm.adaptive_tau) {
        const auto tb = adaptive_temporal_scale(idx, p, t, r, prm.delta_max);
        if (!tb) continue;  // no temporal structure -> not a candidate
        tau = *tb;
      }

      auto cand = candidate_filter(idx, p, t, r, tau, prm.theta);
      if (!cand) continue;
      // all four ratios exceeded theta, so neither descriptor gets pruned
      const HopcDescriptor hs =
          hopc_from_eigs(cand->spatial, axes, prm.theta);
      const HopcDescriptor ht = hopc_from_eigs(cand->st, axes, prm.theta);
      if (hs.discarded || ht.discarded) continue;

      Keypoint kp;
      kp.p = p;
      kp.t = t;
      kp.r = r;
      kp.tau = tau;
      kp.h_spatial = hs.h;
      kp.h_st = ht.h;
      kp.eta = quality(kp.h_spatial, kp.h_st);
      if (kp.eta < prm.eta_min) continue;
      cands.push_back(std::move(kp));
    }
  }

  std::sort(cands.begin(), cands.end(), [](const Keypoint& a,
                                           const Keypoint& b) {
    if (a.eta != b.eta) return a.eta > b.eta;
    if (a.t != b.t) return a.t < b.t;
    if (a.p.x != b.p.x) return a.p.x < b.p.x;
    if (a.p.y != b.p.y) return a.p.y < b.p.y;
    return a.p.z < b.p.z;
  });

  const double rp = prm.locality.r_prime > 0 ? prm.locality.r_prime
                                             : prm.r / 4.0;
  const int tp = prm.locality.tau_prime >= 0 ? prm.locality.tau_prime
                                             : prm.tau;
  const double rp2 = rp * rp;
  std::vector<Keypoint> kept;
  for (const Keypoint& c : cands) {
    bool suppressed = false;
    for (const Keypoint& k : kept) {
      if (std::abs(c.t - k.t) > tp) continue;
      const Vec3 d = c.p - k.p;
      if (dot(d, d) <= rp2) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(c);
      if (prm.top_n > 0 && static_cast<int>(kept.size()) >= prm.top_n) break;
    }
  }
  return kept;
}

AlignedSupport align_support(const Keypoint& kp, const SupportVolume& support,
                             const Eigensystem& basis) {
  if (!basis.oriented)
    throw NumericalError("align_support: eigenbasis must be oriented");
  AlignedSupport out;
  out.origin = kp.p;
  out.t = kp.t;
  const std::size_t n = support.size();
  out.x.resize(n);
  out.y.resize(n);
  out.z.resize(n);
  out.frame = support.pts.frame;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 o = support.pts.point(i) - kp.p;
    out.x[i] = dot(o, basis.v[0]);
    out.y[i] = dot(o, basis.v[1]);
    out.z[i] = dot(o, basis.v[2]);
  }
  return out;
}

std::vector<double> surface_descriptor(const AlignedSupport& aligned,
                                       const SurfaceParams& prm, double r,
                                       int tau) {
  if (prm.m_x < 1 || prm.m_y < 1 || prm.m_t < 1)
    throw ConfigError("surface_descriptor: grid sizes must be >= 1");
  const std::size_t n = aligned.size();
  std::vector<double> g(static_cast<std::size_t>(prm.m_x) * prm.m_y * prm.m_t,
                        0.0);

  // bucket points into temporal slabs by frame offset from the keypoint
  const int slab_span = 2 * tau + 1;
  std::vector<std::vector<std::uint32_t>> slabs(prm.m_t);
  for (std::size_t i = 0; i < n; ++i) {
    const int d = aligned.frame[i] - aligned.t;  // in [-tau, tau]
    int s = static_cast<int>(((static_cast<long long>(d) + tau) * prm.m_t) /
                             slab_span);
    s = std::clamp(s, 0, prm.m_t - 1);
    slabs[s].push_back(static_cast<std::uint32_t>(i));
  }

  const double cw = 2.0 * r / prm.m_x;
  const double ch = 2.0 * r / prm.m_y;
  const double occupy2 = 4.0 * std::max(cw, ch) * std::max(cw, ch);
  constexpr int K = 4;
  std::array<std::pair<double, std::uint32_t>, K> best;

  for (int s = 0; s < prm.m_t; ++s) {
    const auto& slab = slabs[s];
    if (slab.empty()) continue;
    for (int iy = 0; iy < prm.m_y; ++iy) {
      const double gy = -r + (iy + 0.5) * ch;
      for (int ix = 0; ix < prm.m_x; ++ix) {
        const double gx = -r + (ix + 0.5) * cw;

        // K nearest slab points in the x/y plane, ties to the lower index
        int filled = 0;
        for (std::uint32_t pi : slab) {
          const double dx = aligned.x[pi] - gx;
          const double dy = aligned.y[pi] - gy;
          const double d2 = dx * dx + dy * dy;
          if (filled < K) {
            best[filled++] = {d2, pi};
            if (filled == K)
              std::sort(best.begin(), best.end());
          } else if (d2 < best[K - 1].first) {
            best[K - 1] = {d2, pi};
            for (int b = K - 1; b > 0 && best[b] < best[b - 1]; --b)
              std::swap(best[b], best[b - 1]);
          }
        }
        if (filled < K) std::sort(best.begin(), best.begin() + filled);
        if (best[0].first > occupy2) continue;  // node unoccupied -> 0

        double wsum = 0, vsum = 0;
        for (int b = 0; b < filled; ++b) {
          const double w = 1.0 / (best[b].first + 1e-12);
          wsum += w;
          vsum += w * aligned.z[best[b].second];
        }
        g[(static_cast<std::size_t>(s) * prm.m_y + iy) * prm.m_x + ix] =
            vsum / wsum;
      }
    }
  }
  return g;
}

}  // namespace hopc
