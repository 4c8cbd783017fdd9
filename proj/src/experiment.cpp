#include "hopc/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hopc/errors.hpp"
#include "hopc/synth.hpp"

namespace hopc {

Dataset dataset_from_sequences(std::vector<CloudSequence> seqs) {
  Dataset ds;
  for (auto& s : seqs) {
    if (s.subject_id < 0 || s.action_label < 0)
      throw DataError("dataset: sequence without subject/action tags");
    ds.labels.push_back(s.action_label);
    ds.subjects.push_back(s.subject_id);
    ds.seqs.push_back(std::move(s));
  }
  return ds;
}

ExperimentConfig ExperimentConfig::from(Config& cfg) {
  ExperimentConfig e;
  e.pipeline = cfg.get_string("pipeline", e.pipeline);
  if (e.pipeline != "holistic" && e.pipeline != "stkp-surface" &&
      e.pipeline != "stkp-hopc")
    throw ConfigError("pipeline must be holistic|stkp-surface|stkp-hopc");
  e.protocol = cfg.get_string("protocol", e.protocol);
  if (e.protocol != "standard" && e.protocol != "speed-shift")
    throw ConfigError("protocol must be standard|speed-shift");
  const std::string scope = cfg.get_string("codebook_scope", "global");
  if (scope != "global")
    throw ConfigError("codebook_scope: only 'global' is supported");

  if (!cfg.has("seed")) throw ConfigError("config must set seed");
  e.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  e.r = cfg.get_double("r", e.r);
  e.tau = cfg.get_int("tau", e.tau);
  e.theta = cfg.get_double("theta", e.theta);
  e.eta_min = cfg.get_double("eta_min", e.eta_min);
  e.r_prime = cfg.get_double("r_prime", e.r_prime);
  e.tau_prime = cfg.get_int("tau_prime", e.tau_prime);
  e.top_n = cfg.get_int("top_n", e.top_n);
  e.stride = cfg.get_int("stride", e.stride);
  e.adaptive_tau = cfg.get_bool("adaptive_tau", e.adaptive_tau);
  e.delta_max = cfg.get_int("delta_max", e.delta_max);
  const std::string ladder = cfg.get_string("radii", "");
  if (!ladder.empty()) {
    std::istringstream is(ladder);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        e.radii.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("radii: not a number: " + tok);
      }
    }
  }
  e.grid_nx = cfg.get_int("grid_nx", e.grid_nx);
  e.grid_ny = cfg.get_int("grid_ny", e.grid_ny);
  e.grid_nt = cfg.get_int("grid_nt", e.grid_nt);
  e.m_x = cfg.get_int("m_x", e.m_x);
  e.m_y = cfg.get_int("m_y", e.m_y);
  e.m_t = cfg.get_int("m_t", e.m_t);
  e.k = static_cast<std::size_t>(cfg.get_int("k", static_cast<int>(e.k)));
  e.C = cfg.get_double("C", e.C);
  e.train_count = cfg.get_int("train_count", e.train_count);
  e.decimate_factor = cfg.get_int("decimate_factor", e.decimate_factor);

  if (e.r <= 0) throw ConfigError("r must be > 0");
  if (e.tau < 0) throw ConfigError("tau must be >= 0");
  if (e.theta <= 1) throw ConfigError("theta must exceed 1");
  if (e.stride < 1) throw ConfigError("stride must be >= 1");
  if (e.decimate_factor < 2 && e.protocol == "speed-shift")
    throw ConfigError("speed-shift needs decimate_factor >= 2");
  return e;
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  std::map<std::string, std::string> m;
  m["pipeline"] = pipeline;
  m["protocol"] = protocol;
  m["seed"] = std::to_string(seed);
  m["r"] = format_g17(r);
  m["tau"] = std::to_string(tau);
  m["theta"] = format_g17(theta);
  m["eta_min"] = format_g17(eta_min);
  m["r_prime"] = format_g17(r_prime);
  m["tau_prime"] = std::to_string(tau_prime);
  m["top_n"] = std::to_string(top_n);
  m["stride"] = std::to_string(stride);
  m["adaptive_tau"] = adaptive_tau ? "true" : "false";
  m["delta_max"] = std::to_string(delta_max);
  std::string lad;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i) lad += ',';
    lad += format_g17(radii[i]);
  }
  m["radii"] = lad;
  m["grid_nx"] = std::to_string(grid_nx);
  m["grid_ny"] = std::to_string(grid_ny);
  m["grid_nt"] = std::to_string(grid_nt);
  m["m_x"] = std::to_string(m_x);
  m["m_y"] = std::to_string(m_y);
  m["m_t"] = std::to_string(m_t);
  m["k"] = std::to_string(k);
  m["C"] = format_g17(C);
  m["train_count"] = std::to_string(train_count);
  m["decimate_factor"] = std::to_string(decimate_factor);
  m["codebook_scope"] = "global";
  return m;
}

DataMatrix keypoint_descriptors(const CloudSequence& seq,
                                const DirectionSet& axes,
                                const ExperimentConfig& cfg,
                                std::vector<Keypoint>* kps_out) {
  DetectParams dp;
  dp.r = cfg.r;
  dp.tau = cfg.tau;
  dp.theta = cfg.theta;
  dp.eta_min = cfg.eta_min;
  dp.locality = {cfg.r_prime, cfg.tau_prime};
  dp.top_n = cfg.top_n;
  dp.stride = cfg.stride;
  dp.adaptive_tau = cfg.adaptive_tau;
  dp.delta_max = cfg.delta_max;
  dp.radii = cfg.radii;
  const std::vector<Keypoint> kps = detect_stkp(seq, axes, dp);

  const double cell = cfg.radii.empty() ? cfg.r : cfg.radii.back();
  const SequenceIndex idx(seq, cell);
  DataMatrix descs;
  const bool surface = cfg.pipeline != "stkp-hopc";
  for (const Keypoint& kp : kps) {
    // re-derive the oriented spatial basis, then describe the aligned
    // spatio-temporal support
    SupportVolume sp = idx.frame_support(kp.p, kp.t, kp.r);
    const Eigensystem basis =
        disambiguate_signs(eig3(scatter(sp)), sp, kp.p);
    SupportVolume st = idx.window_support(kp.p, kp.t, kp.tau, kp.r);
    const AlignedSupport al = align_support(kp, st, basis);
    if (surface) {
      descs.append(surface_descriptor(al, {cfg.m_x, cfg.m_y, cfg.m_t}, kp.r,
                                      kp.tau));
    } else {
      SupportVolume aligned_sv;
      aligned_sv.center = {0, 0, 0};
      aligned_sv.r = kp.r;
      aligned_sv.tau = kp.tau;
      aligned_sv.pts.x = al.x;
      aligned_sv.pts.y = al.y;
      aligned_sv.pts.z = al.z;
      aligned_sv.pts.frame = al.frame;
      const HopcDescriptor d =
          hopc_point({0, 0, 0}, aligned_sv, axes, cfg.theta);
      descs.append(d.h.data(), d.h.size());
    }
  }
  if (kps_out) *kps_out = kps;
  if (descs.n == 0) {
    descs.dim = surface ? static_cast<std::size_t>(cfg.m_x) * cfg.m_y * cfg.m_t
                        : static_cast<std::size_t>(kHopcDim);
  }
  return descs;
}

std::vector<double> sequence_features(const CloudSequence& seq,
                                      const DirectionSet& axes,
                                      const ExperimentConfig& cfg,
                                      const Codebook* cb) {
  if (cfg.pipeline == "holistic") {
    HolisticParams hp;
    hp.grid = {cfg.grid_nx, cfg.grid_ny, cfg.grid_nt};
    hp.r = cfg.r;
    hp.tau = cfg.tau;
    hp.theta = cfg.theta;
    hp.adaptive_tau = cfg.adaptive_tau;
    hp.delta_max = cfg.delta_max;
    hp.stride = cfg.stride;
    return holistic_descriptor(seq, axes, hp);
  }
  if (!cb) throw ConfigError("keypoint pipelines need a codebook");
  const DataMatrix descs = keypoint_descriptors(seq, axes, cfg);
  return bow_encode(descs, *cb);
}

namespace {

void write_report(const std::string& out_dir, const ExperimentConfig& cfg,
                  const FoldPlan& plan, const EvalReport& rep,
                  const std::map<std::string, double>& timings) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto echo = cfg.echo();

  {
    std::ofstream os(out_dir + "/config_echo.txt");
    for (const auto& [k, v] : echo) os << k << '=' << v << '\n';
  }
  {
    std::ofstream os(out_dir + "/folds.csv");
    os << "fold,train_subjects,accuracy\n";
    for (std::size_t f = 0; f < rep.fold_accuracy.size(); ++f) {
      os << f << ',';
      const auto& tr = plan.train_sets[f];
      for (std::size_t i = 0; i < tr.size(); ++i)
        os << (i ? ";" : "") << tr[i];
      os << ',' << format_g17(rep.fold_accuracy[f]) << '\n';
    }
  }
  {
    std::ofstream os(out_dir + "/summary.txt");
    os << "folds=" << rep.fold_accuracy.size() << '\n';
    os << "mean=" << format_g17(rep.mean) << '\n';
    os << "std=" << format_g17(rep.stddev) << '\n';
    os << "max=" << format_g17(rep.max) << '\n';
    os << "min=" << format_g17(rep.min) << '\n';
    os << "tagged_fold=" << plan.tagged_fold << '\n';
    os << "tagged_accuracy=" << format_g17(rep.tagged_accuracy) << '\n';
    os << "# config\n";
    for (const auto& [k, v] : echo) os << k << '=' << v << '\n';
  }
  {
    std::ofstream os(out_dir + "/confusion.csv");
    for (const auto& row : rep.confusion) {
      for (std::size_t j = 0; j < row.size(); ++j)
        os << (j ? "," : "") << row[j];
      os << '\n';
    }
  }
  {
    // wall-clock stage timings; excluded from the byte-identity contract
    std::ofstream os(out_dir + "/timing.txt");
    for (const auto& [k, v] : timings)
      os << k << '=' << format_g17(v) << "s\n";
  }
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& cfg, const Dataset& data,
                          const std::string& out_dir) {
  if (data.seqs.empty()) throw DataError("run_experiment: empty dataset");
  if (data.labels.size() != data.seqs.size() ||
      data.subjects.size() != data.seqs.size())
    throw DataError("run_experiment: labels/subjects must align");
  const DirectionSet axes = icosahedron_axes();
  using clock = std::chrono::steady_clock;
  std::map<std::string, double> timings;
  auto lap = [&](const char* name, clock::time_point& t0) {
    const auto t1 = clock::now();
    timings[name] = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
  };
  auto t0 = clock::now();

  const bool shift = cfg.protocol == "speed-shift";
  std::vector<CloudSequence> test_side;
  if (shift) {
    test_side.reserve(data.seqs.size());
    for (const auto& s : data.seqs)
      test_side.push_back(decimate(s, cfg.decimate_factor));
  }
  const auto& test_seqs = shift ? test_side : data.seqs;

  Codebook cb;
  const bool bow = cfg.pipeline != "holistic";
  if (bow) {
    DataMatrix all;
    for (const auto& s : data.seqs) {
      const DataMatrix d = keypoint_descriptors(s, axes, cfg);
      for (std::size_t i = 0; i < d.n; ++i) all.append(d.row(i), d.dim);
      if (all.dim == 0) all.dim = d.dim;
    }
    lap("detect", t0);
    cb = kmeans_codebook(all, cfg.k, cfg.seed);
    lap("codebook", t0);
  }

  DataMatrix train_feats, test_feats;
  for (std::size_t i = 0; i < data.seqs.size(); ++i) {
    train_feats.append(
        sequence_features(data.seqs[i], axes, cfg, bow ? &cb : nullptr));
    if (shift)
      test_feats.append(
          sequence_features(test_seqs[i], axes, cfg, bow ? &cb : nullptr));
  }
  lap("features", t0);

  std::set<int> subj_set(data.subjects.begin(), data.subjects.end());
  const FoldPlan plan = enumerate_folds(
      std::vector<int>(subj_set.begin(), subj_set.end()), cfg.train_count);
  const EvalReport rep =
      shift ? evaluate_split(train_feats, test_feats, data.labels,
                             data.subjects, plan, cfg.C)
            : evaluate(train_feats, data.labels, data.subjects, plan, cfg.C);
  lap("evaluate", t0);

  if (!out_dir.empty()) write_report(out_dir, cfg, plan, rep, timings);
  return rep;
}

}  // namespace hopc
