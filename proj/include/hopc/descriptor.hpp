#pragma once

#include "hopc/eigen.hpp"
#include "hopc/geometry.hpp"

namespace hopc {

inline constexpr int kHopcBins = 20;        // m
inline constexpr int kHopcDim = 3 * kHopcBins;

// 3m-dimensional point descriptor: blocks h1, h2, h3 in decreasing-eigenvalue
// order, each lambda_j * quantized-projection histogram of eigenvector v_j,
// renormalized so ||h_j|| = lambda_j. Ambiguous blocks are pruned to zero.
struct HopcDescriptor {
  std::array<double, kHopcDim> h{};
  std::array<bool, 3> block_mask{};  // true = block zeroed (pruned/degenerate)
  bool discarded = false;            // scatter too ambiguous (or degenerate)
};

// b = U^T v quantized: entries at or below psi drop to 0, the rest lose psi.
// A zero input vector yields an all-zero histogram.
std::array<double, kHopcBins> project_and_quantize(const Vec3& v,
                                                   const DirectionSet& axes);

// Full per-point pipeline: scatter -> eig3 -> sign disambiguation ->
// projection/quantization -> eigenvalue scaling -> eigenratio pruning.
// Pruning with ratios d12 = l1/l2, d23 = l2/l3 against theta:
//   both  > theta: keep all three blocks
//   d12 <= theta, d23 > theta: keep only h3
//   d12  > theta, d23 <= theta: keep only h1
//   both <= theta: descriptor discarded
HopcDescriptor hopc_point(const Vec3& p, const SupportVolume& support,
                          const DirectionSet& axes, double theta);

// Same but from a precomputed oriented eigensystem over `support`.
HopcDescriptor hopc_from_eigs(const Eigensystem& oriented,
                              const DirectionSet& axes, double theta);

struct CellGrid {
  int n_x = 6, n_y = 5, n_t = 3;
  int cells() const { return n_x * n_y * n_t; }
};

struct HolisticParams {
  CellGrid grid;
  double r = 0.1;      // spatial support radius
  int tau = 2;         // temporal half-window; adaptive fallback value
  double theta = 1.12;
  bool adaptive_tau = false;  // per-point temporal scale via A_p minimum
  int delta_max = 12;         // tau ladder bound when adaptive
  int stride = 1;             // evaluate every stride-th point per frame
};

// Sequence descriptor over an n_x*n_y*n_t spatio-temporal cell grid anchored
// at the sequence bounding box (X/Y extents, frame range for T). Each point's
// spatio-temporal HOPC accumulates into its cell; discarded points are
// excluded entirely; each nonempty cell block is L2-normalized. Cells are
// concatenated x-fastest, then y, then t; length = cells * 60.
std::vector<double> holistic_descriptor(const CloudSequence& seq,
                                        const DirectionSet& axes,
                                        const HolisticParams& prm);

}  // namespace hopc
