#pragma once

#include "hopc/descriptor.hpp"
#include "hopc/eigen.hpp"
#include "hopc/geometry.hpp"
#include "hopc/scales.hpp"

namespace hopc {

struct Keypoint {
  Vec3 p;
  std::int32_t t = 1;   // frame index
  double r = 0;         // spatial scale
  int tau = 0;          // temporal scale
  double eta = 0;       // quality factor
  std::array<double, kHopcDim> h_spatial{};  // h' (frame t only)
  std::array<double, kHopcDim> h_st{};       // h  (merged window)
};

struct LocalityParams {
  double r_prime = 0;  // suppression radius, r' << r
  int tau_prime = 0;   // suppression half-window, tau' <= tau
};

// Support expressed in the keypoint's spatial eigenbasis: aligned = (q - p) V'.
struct AlignedSupport {
  Vec3 origin;
  std::int32_t t = 1;  // keypoint frame, for temporal slab offsets
  std::vector<double> x, y, z;
  std::vector<std::int32_t> frame;
  std::size_t size() const { return x.size(); }
};

struct CandidatePair {
  Eigensystem spatial;  // oriented, frame t only
  Eigensystem st;       // oriented, merged [t - tau, t + tau]
  SupportVolume spatial_support;
  SupportVolume st_support;
};

// Screens one point: both eigensystems are computed and returned only when all
// four eigenratios {d12, d23, d'12, d'23} exceed theta and neither support is
// degenerate.
std::optional<CandidatePair> candidate_filter(const SequenceIndex& idx,
                                              const Vec3& p, int t, double r,
                                              int tau, double theta);
std::optional<CandidatePair> candidate_filter(const CloudSequence& seq,
                                              const Vec3& p, int t, double r,
                                              int tau, double theta);

// eta = 1/2 * sum (h'(i) - h(i))^2 / (h'(i) + h(i)), zero-denominator terms
// skipped. Zero iff the two descriptors agree on every nonzero bin.
double quality(const double* h_spatial, const double* h_st, std::size_t n);
inline double quality(const std::array<double, kHopcDim>& a,
                      const std::array<double, kHopcDim>& b) {
  return quality(a.data(), b.data(), a.size());
}

struct DetectParams {
  double r = 0.1;
  int tau = 2;
  double theta = 1.12;
  double eta_min = 0.05;
  LocalityParams locality{0, -1};  // r_prime <= 0 -> r/4; tau_prime < 0 -> tau
  int top_n = 0;                   // 0 = keep every survivor
  int stride = 1;                  // screen every stride-th point per frame
  bool adaptive_tau = false;
  int delta_max = 12;
  // non-empty -> per-point adaptive spatial scale over this ladder
  std::vector<double> radii;
};

// Candidate screening of every point, quality ranking (eta descending; ties by
// frame then lexicographic coordinates), then greedy suppression of any
// candidate within r' of AND within tau' frames of an already-retained
// keypoint. Candidates below eta_min never survive.
std::vector<Keypoint> detect_stkp(const CloudSequence& seq,
                                  const DirectionSet& axes,
                                  const DetectParams& prm);

// Rotates centered support offsets into the oriented spatial eigenbasis.
AlignedSupport align_support(const Keypoint& kp, const SupportVolume& support,
                             const Eigensystem& spatial_basis);

struct SurfaceParams {
  int m_x = 20, m_y = 20, m_t = 3;
};

// Samples the aligned support's depth surface z(x, y, t) on an
// m_x * m_y * m_t grid spanning [-r, r]^2 x [-tau, tau]: per temporal slab,
// inverse-distance-weighted interpolation (power 2) over the K = 4 nearest
// points in the x/y plane; nodes whose nearest point is farther than twice the
// cell edge stay 0 (unoccupied). Raster order x-fastest, then y, then t.
std::vector<double> surface_descriptor(const AlignedSupport& aligned,
                                       const SurfaceParams& prm, double r,
                                       int tau);

}  // namespace hopc
