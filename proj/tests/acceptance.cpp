// Acceptance harness: prints exactly one [PASS]/[FAIL]/[SKIP] line per
// criterion and exits nonzero when any gating criterion fails. Each body
// measures its own wall-clock runtime where a budget applies.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <unistd.h>
#include <vector>

#include "hopc/descriptor.hpp"
#include "hopc/eigen.hpp"
#include "hopc/errors.hpp"
#include "hopc/experiment.hpp"
#include "hopc/geometry.hpp"
#include "hopc/io.hpp"
#include "hopc/keypoints.hpp"
#include "hopc/learn.hpp"
#include "hopc/rng.hpp"
#include "hopc/scales.hpp"
#include "hopc/synth.hpp"
#include "support.hpp"

using namespace hopc;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

template <class F>
void criterion(int id, const char* title, F&& body) {
  std::string detail;
  bool ok = false;
  const auto t0 = clk::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = fmt("exception: %s", e.what());
  }
  const double s = seconds_since(t0);
  std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", id,
              title, s, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

SupportVolume make_support(const std::vector<Vec3>& pts) {
  SupportVolume sv;
  sv.r = 1e9;
  for (const Vec3& p : pts) sv.pts.push(p, 1);
  return sv;
}

// ---------------------------------------------------------------- criterion 1

bool c1_psi(std::string& detail) {
  const auto t0 = clk::now();
  const DirectionSet ds = icosahedron_axes();
  const double elapsed = seconds_since(t0);

  const double closed = std::sqrt(5.0) / 3.0;
  double brute = -2.0;
  for (int i = 0; i < 20; ++i)
    for (int j = i + 1; j < 20; ++j)
      brute = std::max(brute, dot(ds.axes[i], ds.axes[j]));

  const bool ok = std::fabs(ds.psi - closed) <= 1e-12 && ds.psi == brute &&
                  elapsed < 1e-3;
  detail = fmt("psi=%.15f closed-form gap %.2e, build %.3f ms", ds.psi,
               std::fabs(ds.psi - closed), elapsed * 1e3);
  return ok;
}

// ---------------------------------------------------------------- criterion 2

bool c2_eigen(std::string& detail) {
  const auto t0 = clk::now();
  Rng rng(90210);
  double worst_gap = 0, worst_res = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    double a[3][3];
    const int rank = trial % 10 == 0 ? 2 : (trial % 17 == 0 ? 1 : 3);
    for (auto& row : a)
      for (double& v : row) v = rng.uniform(-1, 1);
    for (int r = rank; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a[r][c] = 0;
    SymMat3 C;
    auto col = [&](int i, int j) {
      return a[0][i] * a[0][j] + a[1][i] * a[1][j] + a[2][i] * a[2][j];
    };
    C.a00 = col(0, 0); C.a01 = col(0, 1); C.a02 = col(0, 2);
    C.a11 = col(1, 1); C.a12 = col(1, 2); C.a22 = col(2, 2);

    const Eigensystem e = eig3(C);
    const std::vector<double> flat = {C.a00, C.a01, C.a02, C.a01, C.a11,
                                      C.a12, C.a02, C.a12, C.a22};
    const auto oracle = testsup::jacobi_eigenvalues(flat, 3);
    for (int i = 0; i < 3; ++i) {
      worst_gap = std::max(worst_gap,
                           std::fabs(e.lambda[i] - std::max(0.0, oracle[i])));
      const Vec3 r = C.mul(e.v[i]) - e.v[i] * e.lambda[i];
      worst_res = std::max(worst_res,
                           norm(r) / std::max(1.0, e.lambda[0]));
    }
  }
  const double elapsed = seconds_since(t0);
  detail = fmt("max |eig gap| %.2e, max residual %.2e, %.3f s", worst_gap,
               worst_res, elapsed);
  return worst_gap <= 1e-9 && worst_res <= 1e-9 && elapsed < 1.0;
}

// ---------------------------------------------------------------- criterion 3

bool c3_block_norm(std::string& detail) {
  const DirectionSet ds = icosahedron_axes();
  Rng rng(31337);
  double worst = 0;
  int blocks = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto pts = testsup::decisive_support(rng, 50);
    const SupportVolume sv = make_support(pts);
    const HopcDescriptor d = hopc_point({0, 0, 0}, sv, ds, 1.12);
    if (d.discarded) continue;
    const Eigensystem e = eig3(scatter(sv));
    for (int j = 0; j < 3; ++j) {
      if (d.block_mask[j]) continue;
      double n2 = 0;
      for (int i = 0; i < kHopcBins; ++i) {
        const double v = d.h[j * kHopcBins + i];
        n2 += v * v;
      }
      worst = std::max(worst, std::fabs(std::sqrt(n2) - e.lambda[j]));
      ++blocks;
    }
  }
  detail = fmt("%d unpruned blocks, max |norm - lambda| %.2e", blocks, worst);
  return blocks >= 500 && worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 4

bool c4_static(std::string& detail) {
  SynthScenario sc;
  sc.id = Scenario::StaticPlane;
  sc.duration = 30;
  sc.seed = 404;
  const SynthResult res = synth_generate(sc);

  const DirectionSet ds = icosahedron_axes();
  DetectParams prm;
  prm.r = 0.15;
  prm.tau = 2;
  prm.eta_min = 0.0;
  prm.stride = 3;
  double max_eta = 0;
  std::size_t candidates = 0;
  const auto all = detect_stkp(res.seq, ds, prm);
  for (const Keypoint& kp : all) {
    max_eta = std::max(max_eta, kp.eta);
    ++candidates;
  }

  prm.eta_min = 0.05;
  const auto kept = detect_stkp(res.seq, ds, prm);
  detail = fmt("%zu candidates, max eta %.2e, %zu keypoints at eta_min=0.05",
               candidates, max_eta, kept.size());
  return max_eta <= 1e-9 && kept.empty();
}

// ---------------------------------------------------------------- criterion 5

struct KpDescs {
  std::vector<Keypoint> kps;
  DataMatrix aligned;    // eigenbasis surface descriptors
  DataMatrix unaligned;  // same surface sampling, world-frame basis
};

KpDescs describe_keypoints(const CloudSequence& seq, const DirectionSet& ds,
                           const DetectParams& prm) {
  KpDescs out;
  out.kps = detect_stkp(seq, ds, prm);
  const SequenceIndex idx(seq, prm.r);
  Eigensystem ident;
  ident.v[0] = {1, 0, 0};
  ident.v[1] = {0, 1, 0};
  ident.v[2] = {0, 0, 1};
  ident.oriented = true;
  for (const Keypoint& kp : out.kps) {
    SupportVolume sp = idx.frame_support(kp.p, kp.t, kp.r);
    const Eigensystem basis = disambiguate_signs(eig3(scatter(sp)), sp, kp.p);
    SupportVolume st = idx.window_support(kp.p, kp.t, kp.tau, kp.r);
    out.aligned.append(surface_descriptor(align_support(kp, st, basis),
                                          {20, 20, 3}, kp.r, kp.tau));
    out.unaligned.append(surface_descriptor(align_support(kp, st, ident),
                                            {20, 20, 3}, kp.r, kp.tau));
  }
  return out;
}

bool c5_view_invariance(std::string& detail) {
  const auto t0 = clk::now();
  const DirectionSet ds = icosahedron_axes();

  SynthScenario base;
  base.id = Scenario::TwoLimb;
  base.duration = 24;
  base.seed = 515;

  DetectParams prm;
  prm.r = 0.1;
  prm.tau = 2;
  prm.eta_min = 0.002;  // eta carries eigenvalue units; desk-scale threshold
  prm.top_n = 40;

  const SynthResult base_res = synth_generate(base);
  const KpDescs ref = describe_keypoints(base_res.seq, ds, prm);
  if (ref.kps.size() < 10) {
    detail = fmt("only %zu base keypoints", ref.kps.size());
    return false;
  }

  double cos_sum = 0;
  int cos_n = 0, pairs = 0;
  int nn_hit_aligned = 0, nn_hit_unaligned = 0;
  for (double angle : {25.0, 50.0}) {
    SynthScenario rot = base;
    rot.rot_axis = {0, 1, 0};
    rot.rot_angle_deg = angle;
    const SynthResult rot_res = synth_generate(rot);
    const KpDescs got = describe_keypoints(rot_res.seq, ds, prm);

    Vec3 inv_rows[3];
    rotation_rows(rot.rot_axis, -angle, inv_rows);
    // The rotated scene is an exact rigid copy (same seed), so genuine
    // correspondences land at numerically zero distance; a tight radius
    // rejects pairs where suppression picked different representatives.
    const double pair_radius = prm.r / 100;
    for (std::size_t i = 0; i < got.kps.size(); ++i) {
      const Vec3 back = rotate(inv_rows, got.kps[i].p);
      int best = -1;
      double best_d = pair_radius;
      for (std::size_t j = 0; j < ref.kps.size(); ++j) {
        if (ref.kps[j].t != got.kps[i].t) continue;
        const double d = norm(back - ref.kps[j].p);
        if (d <= best_d) { best_d = d; best = int(j); }
      }
      if (best < 0) continue;
      ++pairs;

      cos_sum += testsup::cosine_similarity(got.aligned.row(i),
                                            ref.aligned.row(best),
                                            got.aligned.dim);
      ++cos_n;

      auto nn_of = [&](const DataMatrix& q, const DataMatrix& base_set) {
        double bd = 1e300;
        int bi = -1;
        for (std::size_t j = 0; j < base_set.n; ++j) {
          double d2 = 0;
          for (std::size_t z = 0; z < base_set.dim; ++z) {
            const double d = q.row(i)[z] - base_set.row(j)[z];
            d2 += d * d;
          }
          if (d2 < bd) { bd = d2; bi = int(j); }
        }
        return bi;
      };
      if (nn_of(got.aligned, ref.aligned) == best) ++nn_hit_aligned;
      if (nn_of(got.unaligned, ref.unaligned) == best) ++nn_hit_unaligned;
    }
  }

  const double elapsed = seconds_since(t0);
  if (pairs < 10) {
    detail = fmt("only %d matched pairs", pairs);
    return false;
  }
  const double mean_cos = cos_sum / cos_n;
  const double rate_aligned = double(nn_hit_aligned) / pairs;
  const double rate_unaligned = double(nn_hit_unaligned) / pairs;
  detail = fmt(
      "%d pairs, mean cos %.3f, nn aligned %.0f%%, unaligned %.0f%%, %.1f s",
      pairs, mean_cos, 100 * rate_aligned, 100 * rate_unaligned, elapsed);
  return mean_cos >= 0.9 && rate_aligned >= 0.8 &&
         rate_unaligned < rate_aligned && elapsed < 120.0;
}

// ---------------------------------------------------------------- criterion 6

std::vector<CloudSequence> synth_suite(int n_subjects, int duration) {
  // 6 action classes x n_subjects actor variants
  std::vector<CloudSequence> seqs;
  struct Cls { Scenario id; int variant; };
  const Cls classes[6] = {{Scenario::OscillatingBlob, 0},
                          {Scenario::OscillatingBlob, 1},
                          {Scenario::OscillatingBlob, 2},
                          {Scenario::RodSweep, 0},
                          {Scenario::RodSweep, 1},
                          {Scenario::TwoLimb, 0}};
  for (int subj = 1; subj <= n_subjects; ++subj)
    for (int c = 0; c < 6; ++c) {
      SynthScenario sc;
      sc.id = classes[c].id;
      sc.variant = classes[c].variant;
      sc.duration = duration;
      sc.scale = 0.85 + 0.03 * (subj - 1);
      sc.noise_sigma = 0.0015 * (subj % 3);
      sc.seed = 100000 + std::uint64_t(subj) * 1000 + c;
      CloudSequence s = synth_generate(sc).seq;
      s.subject_id = subj;
      s.action_label = c;
      seqs.push_back(std::move(s));
    }
  return seqs;
}

bool c6_speed(std::string& detail) {
  const DirectionSet ds = icosahedron_axes();

  // (a) tau* halving across 2x decimation on oscillatory scenes. Long-period
  // oscillators put tau* well inside the scan's interior range at both rates;
  // the search horizon spans the same physical time at 1x and 2x.
  const int dur = 128, d1 = 28, d2 = 14;
  int sampled = 0, hits = 0;
  for (int variant = 0; variant < 2; ++variant)
    for (int s = 0; s < 5; ++s) {
      SynthScenario sc;
      sc.id = Scenario::OscillatingBlob;
      sc.variant = variant;
      sc.duration = dur;
      sc.period = 32;
      sc.seed = 601 + std::uint64_t(variant) + 10 * std::uint64_t(s);
      const CloudSequence full = synth_generate(sc).seq;
      const CloudSequence half = decimate(full, 2);

      DetectParams prm;
      prm.r = 0.1;
      prm.tau = 2;
      prm.eta_min = 0.0005;
      prm.top_n = 20;
      prm.stride = 3;
      const auto kps = detect_stkp(full, ds, prm);

      const SequenceIndex fidx(full, prm.r);
      const SequenceIndex hidx(half, prm.r);
      for (const Keypoint& kp : kps) {
        if (kp.t % 2 == 0) continue;  // needs an exact decimated instant
        if (int(kp.t) < d1 + 1 || int(kp.t) > dur - d1) continue;  // no clamp
        const auto t1 = adaptive_temporal_scale(fidx, kp.p, kp.t, prm.r, d1);
        if (!t1) continue;
        // tau1/2 must itself be reachable by the 2x scan (interior range
        // starts at 2), otherwise the comparison is ill-posed for this point
        if (*t1 < 4) continue;
        ++sampled;
        const int th = (int(kp.t) - 1) / 2 + 1;
        const auto t2 = adaptive_temporal_scale(hidx, kp.p, th, prm.r, d2);
        if (t2 && std::fabs(double(*t2) - double(*t1) / 2.0) <= 1.0 + 1e-9)
          ++hits;
      }
    }
  const bool halving_ok = sampled >= 20 && hits * 10 >= sampled * 9;

  // (b) end-to-end speed-shift: adaptive tau must not lose to constant tau
  const Dataset data = dataset_from_sequences(synth_suite(5, 24));
  ExperimentConfig cfg;
  cfg.pipeline = "holistic";
  cfg.protocol = "speed-shift";
  cfg.seed = 6;
  cfg.r = 0.1;
  cfg.tau = 2;
  cfg.stride = 3;
  cfg.train_count = 3;
  cfg.delta_max = 8;
  const EvalReport constant = run_experiment(cfg, data, "");
  cfg.adaptive_tau = true;
  const EvalReport adaptive = run_experiment(cfg, data, "");

  detail = fmt("halving %d/%d, speed-shift mean adaptive %.3f vs constant %.3f",
               hits, sampled, adaptive.mean, constant.mean);
  return halving_ok && adaptive.mean >= constant.mean;
}

// ---------------------------------------------------------------- criterion 7

bool c7_holistic_dim(std::string& detail) {
  SynthScenario sc;
  sc.id = Scenario::TwoLimb;
  sc.duration = 16;
  sc.seed = 700;
  const CloudSequence seq = synth_generate(sc).seq;
  const DirectionSet ds = icosahedron_axes();
  HolisticParams prm;  // defaults: 6 x 5 x 3 cells, m = 20
  prm.stride = 2;
  const std::vector<double> h = holistic_descriptor(seq, ds, prm);

  int nonempty = 0;
  double worst = 0;
  for (int c = 0; c < 90; ++c) {
    double n2 = 0;
    for (int i = 0; i < 60; ++i) {
      const double v = h[c * 60 + i];
      n2 += v * v;
    }
    if (n2 > 0) {
      ++nonempty;
      worst = std::max(worst, std::fabs(std::sqrt(n2) - 1.0));
    }
  }
  detail = fmt("length %zu, %d nonempty cells, max |norm-1| %.2e", h.size(),
               nonempty, worst);
  return h.size() == 5400 && nonempty > 0 && worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 8

bool c8_end_to_end(std::string& detail) {
  const auto t0 = clk::now();
  const Dataset data = dataset_from_sequences(synth_suite(10, 24));

  ExperimentConfig cfg;
  cfg.pipeline = "holistic";
  cfg.seed = 8;
  cfg.r = 0.1;
  cfg.tau = 2;
  cfg.stride = 2;
  cfg.train_count = 5;

  const fs::path tmp =
      fs::temp_directory_path() / ("hopc_accept_" + std::to_string(::getpid()));
  const std::string out1 = (tmp / "run1").string();
  const std::string out2 = (tmp / "run2").string();
  const EvalReport r1 = run_experiment(cfg, data, out1);
  const EvalReport r2 = run_experiment(cfg, data, out2);

  bool identical = true;
  for (const char* name :
       {"config_echo.txt", "folds.csv", "summary.txt", "confusion.csv"}) {
    std::ifstream a((fs::path(out1) / name), std::ios::binary);
    std::ifstream b((fs::path(out2) / name), std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)),
                         std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)),
                         std::istreambuf_iterator<char>());
    if (sa.empty() || sa != sb) identical = false;
  }
  std::error_code ec;
  fs::remove_all(tmp, ec);

  const double elapsed = seconds_since(t0);
  detail = fmt("252-fold mean %.4f (min %.3f), reports %s, %.1f s", r1.mean,
               r1.min, identical ? "bit-identical" : "DIFFER", elapsed);
  return r1.fold_accuracy.size() == 252 && r1.mean >= 0.9 && identical &&
         r1.mean == r2.mean && elapsed < 600.0;
}

// ---------------------------------------------------------------- criterion 9

bool c9_learning(std::string& detail) {
  Rng rng(909);

  // bow_encode vs exhaustive scan, 100 instances
  Codebook cb;
  cb.k = 10;
  cb.dim = 5;
  for (std::size_t i = 0; i < cb.k * cb.dim; ++i)
    cb.centers.push_back(rng.uniform(-1, 1));
  int bow_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    DataMatrix d;
    const int n = 1 + int(rng.index(15));
    for (int i = 0; i < n; ++i) {
      std::vector<double> v;
      for (std::size_t j = 0; j < cb.dim; ++j) v.push_back(rng.uniform(-1, 1));
      d.append(v);
    }
    const auto h = bow_encode(d, cb);
    std::vector<double> want(cb.k, 0.0);
    for (int i = 0; i < n; ++i) {
      double best = 1e300;
      std::size_t bi = 0;
      for (std::size_t c = 0; c < cb.k; ++c) {
        double d2 = 0;
        for (std::size_t j = 0; j < cb.dim; ++j) {
          const double dd = d.row(i)[j] - cb.centers[c * cb.dim + j];
          d2 += dd * dd;
        }
        if (d2 < best) { best = d2; bi = c; }
      }
      want[bi] += 1.0 / n;
    }
    for (std::size_t c = 0; c < cb.k; ++c)
      if (std::fabs(h[c] - want[c]) > 1e-12) ++bow_bad;
  }

  // HIK Gram PSD on 50 random triples
  double min_ev = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> h(3, std::vector<double>(6));
    for (auto& row : h) {
      double s = 0;
      for (double& v : row) { v = rng.uniform(); s += v; }
      for (double& v : row) v /= s;
    }
    std::vector<double> gram(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        gram[i * 3 + j] = hik(h[i].data(), h[j].data(), 6);
    const auto ev = testsup::jacobi_eigenvalues(gram, 3);
    min_ev = std::min(min_ev, ev.back());
  }

  // k-means cost monotone on every run here
  int cost_bad = 0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    DataMatrix d;
    for (int i = 0; i < 120; ++i)
      d.append({rng.normal(), rng.normal(), rng.normal()});
    std::vector<double> cost;
    kmeans_codebook(d, 6, seed, 100, &cost);
    for (std::size_t i = 1; i < cost.size(); ++i)
      if (cost[i] > cost[i - 1] + 1e-12) ++cost_bad;
  }

  detail = fmt("bow mismatches %d, min HIK eigenvalue %.2e, cost increases %d",
               bow_bad, min_ev, cost_bad);
  return bow_bad == 0 && min_ev >= -1e-10 && cost_bad == 0;
}

// --------------------------------------------------------------- criterion 10

void c10_dataset_path() {
  const char* dir = std::getenv("HOPC_MSR_DIR");
  if (!dir) {
    std::printf(
        "[SKIP] criterion 10: external dataset path (set HOPC_MSR_DIR to a "
        "directory of tagged .hpc sequences)\n");
    return;
  }
  try {
    std::vector<CloudSequence> seqs;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".hpc") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) seqs.push_back(load_sequence(f.string()));
    const Dataset data = dataset_from_sequences(std::move(seqs));

    ExperimentConfig cfg;
    cfg.pipeline = "holistic";
    cfg.seed = 10;
    cfg.train_count = 5;
    const fs::path out = fs::temp_directory_path() /
                         ("hopc_msr_" + std::to_string(::getpid()));
    const EvalReport rep = run_experiment(cfg, data, out.string());
    std::printf(
        "[PASS] criterion 10: dataset path ran end-to-end -- mean %.4f, "
        "tagged split %.4f, report in %s (accuracy reported, not asserted)\n",
        rep.mean, rep.tagged_accuracy, out.string().c_str());
  } catch (const std::exception& e) {
    // non-gating: report but do not count a failure
    std::printf("[SKIP] criterion 10: dataset path failed: %s\n", e.what());
  }
}

}  // namespace

int main() {
  criterion(1, "neighbor threshold closed form + brute force", c1_psi);
  criterion(2, "3x3 eigensolver vs Jacobi oracle (1000 matrices)", c2_eigen);
  criterion(3, "block-norm law on 500 decisive supports", c3_block_norm);
  criterion(4, "static scene: quality 0, no keypoints", c4_static);
  criterion(5, "view invariance of aligned surface descriptors",
            c5_view_invariance);
  criterion(6, "speed invariance: tau* halving + adaptive vs constant",
            c6_speed);
  criterion(7, "holistic descriptor dimension and cell norms",
            c7_holistic_dim);
  criterion(8, "end-to-end 6x10 classification, 252 folds, reproducible",
            c8_end_to_end);
  criterion(9, "learning-layer oracles (bow, HIK, k-means)", c9_learning);
  c10_dataset_path();

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all gating criteria passed\n");
  return 0;
}
