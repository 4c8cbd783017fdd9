// Command-line frontend: sequence ingestion, synthetic data, descriptor and
// keypoint extraction, codebook/classifier training, and the experiment
// protocol. Exit codes: 0 ok, 2 configuration error, 3 data error,
// 4 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hopc/errors.hpp"
#include "hopc/experiment.hpp"
#include "hopc/io.hpp"
#include "hopc/kernels.hpp"
#include "hopc/synth.hpp"

namespace {

using namespace hopc;

std::vector<int> load_labels(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open labels file: " + path);
  std::vector<int> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw DataError("labels file: not an integer: " + line);
    }
  }
  return out;
}

void add_detect_flags(CLI::App* cmd, ExperimentConfig& cfg,
                      std::string& radii_csv) {
  cmd->add_option("--r", cfg.r, "spatial support radius");
  cmd->add_option("--tau", cfg.tau, "temporal half-window (frames)");
  cmd->add_option("--theta", cfg.theta, "eigenratio pruning threshold");
  cmd->add_option("--eta-min", cfg.eta_min, "minimum keypoint quality");
  cmd->add_option("--r-prime", cfg.r_prime,
                  "suppression radius (default r/4)");
  cmd->add_option("--tau-prime", cfg.tau_prime,
                  "suppression half-window (default tau)");
  cmd->add_option("--top-n", cfg.top_n, "keep at most N keypoints (0 = all)");
  cmd->add_option("--stride", cfg.stride, "screen every stride-th point");
  cmd->add_flag("--adaptive-tau", cfg.adaptive_tau,
                "per-point temporal scale selection");
  cmd->add_option("--delta-max", cfg.delta_max,
                  "temporal scale ladder bound");
  cmd->add_option("--radii", radii_csv,
                  "comma-separated ladder for adaptive spatial scale");
}

void parse_radii(const std::string& csv, std::vector<double>& out) {
  if (csv.empty()) return;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("--radii: not a number: " + tok);
    }
  }
}

int run(int argc, char** argv) {
  CLI::App app{"HOPC/STKP pointcloud action-recognition toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "depth-image directory -> native sequence");
  std::string in_dir, out_path;
  int subject = -1, action = -1;
  ingest->add_option("--input", in_dir, "directory of 16-bit PGM depth maps")
      ->required();
  ingest->add_option("--output", out_path, "output .hpc path")->required();
  ingest->add_option("--subject", subject, "subject tag");
  ingest->add_option("--action", action, "action tag");

  // synth
  auto* synth = app.add_subcommand(
      "synth", "synthetic scenario -> native sequence (+ motion mask)");
  std::string scenario_name = "oscillating-blob", mask_path, synth_out;
  SynthScenario sc;
  std::vector<double> axis_vals;
  bool seed_set = false;
  synth->add_option("--scenario", scenario_name,
                    "static-plane|oscillating-blob|rod-sweep|"
                    "two-limb-articulation");
  synth->add_option("--variant", sc.variant, "scenario variant");
  synth->add_option("--frames", sc.duration, "frame count");
  synth->add_option("--speed", sc.speed, "motion speed factor");
  synth->add_option("--period", sc.period, "frames per motion cycle at 1x");
  synth->add_option("--rot-axis", axis_vals, "view rotation axis (3 values)")
      ->expected(3);
  synth->add_option("--rot-angle", sc.rot_angle_deg,
                    "view rotation angle (degrees)");
  synth->add_option("--actor-scale", sc.scale, "actor size multiplier");
  synth->add_option("--noise", sc.noise_sigma, "template noise sigma");
  synth->add_option("--seed", sc.seed, "RNG seed")
      ->each([&](const std::string&) { seed_set = true; });
  synth->add_option("--frame-rate", sc.frame_rate, "frames per second");
  synth->add_option("--output", synth_out, "output .hpc path")->required();
  synth->add_option("--mask-output", mask_path,
                    "motion mask (one 0/1 row per frame)");
  synth->add_option("--subject", subject, "subject tag");
  synth->add_option("--action", action, "action tag");

  // holistic
  auto* hol = app.add_subcommand(
      "holistic", "sequences -> holistic descriptor matrix");
  std::vector<std::string> hol_inputs;
  std::string hol_out, hol_radii;
  ExperimentConfig hol_cfg;
  hol->add_option("--input", hol_inputs, "input .hpc sequences")->required();
  hol->add_option("--output", hol_out, "output descriptor file")->required();
  hol->add_option("--grid-nx", hol_cfg.grid_nx, "cells along x");
  hol->add_option("--grid-ny", hol_cfg.grid_ny, "cells along y");
  hol->add_option("--grid-nt", hol_cfg.grid_nt, "cells along t");
  add_detect_flags(hol, hol_cfg, hol_radii);

  // detect
  auto* det = app.add_subcommand(
      "detect", "sequence -> keypoints + aligned descriptors");
  std::string det_in, det_out, det_csv, det_desc = "surface", det_radii;
  ExperimentConfig det_cfg;
  det->add_option("--input", det_in, "input .hpc sequence")->required();
  det->add_option("--output", det_out, "output keypoint file")->required();
  det->add_option("--csv", det_csv, "also export a CSV table");
  det->add_option("--desc", det_desc,
                  "descriptor backend: surface|aligned-hopc");
  det->add_option("--mx", det_cfg.m_x, "surface grid x resolution");
  det->add_option("--my", det_cfg.m_y, "surface grid y resolution");
  det->add_option("--mt", det_cfg.m_t, "surface grid t resolution");
  add_detect_flags(det, det_cfg, det_radii);

  // codebook
  auto* cbk = app.add_subcommand(
      "codebook", "descriptor files -> k-means codebook");
  std::vector<std::string> cbk_inputs;
  std::string cbk_out;
  std::size_t cbk_k = 1000;
  std::uint64_t cbk_seed = 0;
  cbk->add_option("--input", cbk_inputs, "descriptor files")->required();
  cbk->add_option("--output", cbk_out, "output codebook")->required();
  cbk->add_option("--k", cbk_k, "word count");
  cbk->add_option("--seed", cbk_seed, "RNG seed")->required();

  // train
  auto* trn = app.add_subcommand(
      "train", "feature rows + labels -> HIK-SVM model");
  std::string trn_feats, trn_labels, trn_out;
  double trn_C = 1.0;
  trn->add_option("--features", trn_feats, "feature matrix file")->required();
  trn->add_option("--labels", trn_labels, "one integer label per row")
      ->required();
  trn->add_option("--output", trn_out, "output model")->required();
  trn->add_option("--C", trn_C, "SVM regularization");

  // eval
  auto* evl = app.add_subcommand(
      "eval", "model + feature rows + labels -> accuracy");
  std::string evl_model, evl_feats, evl_labels;
  evl->add_option("--model", evl_model, "model file")->required();
  evl->add_option("--features", evl_feats, "feature matrix file")->required();
  evl->add_option("--labels", evl_labels, "one integer label per row")
      ->required();

  // report
  auto* rep = app.add_subcommand(
      "report", "full experiment protocol over a tagged dataset");
  std::string rep_cfg_path, rep_data, rep_out;
  rep->add_option("--config", rep_cfg_path, "key=value experiment config")
      ->required();
  rep->add_option("--data", rep_data, "directory of tagged .hpc sequences")
      ->required();
  rep->add_option("--out", rep_out, "report output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*ingest) {
    CloudSequence seq = load_depth_dir(in_dir);
    seq.subject_id = subject;
    seq.action_label = action;
    save_sequence(seq, out_path);
    std::cout << "frames=" << seq.n_frames()
              << " points=" << seq.total_points() << "\n";
  } else if (*synth) {
    if (!seed_set) throw ConfigError("synth: --seed is required");
    sc.id = scenario_from_string(scenario_name);
    if (axis_vals.size() == 3)
      sc.rot_axis = {axis_vals[0], axis_vals[1], axis_vals[2]};
    SynthResult res = synth_generate(sc);
    res.seq.subject_id = subject;
    res.seq.action_label = action;
    save_sequence(res.seq, synth_out);
    if (!mask_path.empty()) {
      std::ofstream os(mask_path);
      if (!os) throw DataError("cannot open for writing: " + mask_path);
      for (const auto& fr : res.moving) {
        for (auto m : fr) os << (m ? '1' : '0');
        os << '\n';
      }
    }
    std::cout << "frames=" << res.seq.n_frames()
              << " points=" << res.seq.total_points() << "\n";
  } else if (*hol) {
    parse_radii(hol_radii, hol_cfg.radii);
    const DirectionSet axes = icosahedron_axes();
    DataMatrix m;
    for (const auto& path : hol_inputs) {
      const CloudSequence seq = load_sequence(path);
      m.append(sequence_features(seq, axes, hol_cfg, nullptr));
    }
    save_descriptors(m, hol_out);
    std::cout << "sequences=" << m.n << " dim=" << m.dim << "\n";
  } else if (*det) {
    parse_radii(det_radii, det_cfg.radii);
    if (det_desc != "surface" && det_desc != "aligned-hopc")
      throw ConfigError("--desc must be surface or aligned-hopc");
    det_cfg.pipeline = det_desc == "surface" ? "stkp-surface" : "stkp-hopc";
    const DirectionSet axes = icosahedron_axes();
    const CloudSequence seq = load_sequence(det_in);
    std::vector<Keypoint> kps;
    const DataMatrix descs = keypoint_descriptors(seq, axes, det_cfg, &kps);
    save_keypoints(kps, descs, det_out);
    if (!det_csv.empty()) export_keypoints_csv(kps, det_csv);
    std::cout << "keypoints=" << kps.size() << " dim=" << descs.dim << "\n";
  } else if (*cbk) {
    DataMatrix all;
    for (const auto& path : cbk_inputs) {
      const DataMatrix d = load_descriptors(path);
      for (std::size_t i = 0; i < d.n; ++i) all.append(d.row(i), d.dim);
    }
    const Codebook cb = kmeans_codebook(all, cbk_k, cbk_seed);
    save_codebook(cb, cbk_out);
    std::cout << "k=" << cb.k << " dim=" << cb.dim << "\n";
  } else if (*trn) {
    const DataMatrix feats = load_descriptors(trn_feats);
    const std::vector<int> labels = load_labels(trn_labels);
    if (labels.size() != feats.n)
      throw DataError("label count does not match feature rows");
    const ClassifierModel model = svm_train(feats, labels, trn_C);
    save_model(model, trn_out);
    std::cout << "classes=" << model.n_classes << " rows=" << model.train.n
              << "\n";
  } else if (*evl) {
    const ClassifierModel model = load_model(evl_model);
    const DataMatrix feats = load_descriptors(evl_feats);
    const std::vector<int> labels = load_labels(evl_labels);
    if (labels.size() != feats.n)
      throw DataError("label count does not match feature rows");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < feats.n; ++i)
      if (svm_predict(model, feats.row(i)) == labels[i]) ++correct;
    std::cout << "accuracy="
              << format_g17(static_cast<double>(correct) /
                            static_cast<double>(feats.n))
              << " (" << correct << "/" << feats.n << ")\n";
  } else if (*rep) {
    Config cfg = Config::from_file(rep_cfg_path);
    const ExperimentConfig ec = ExperimentConfig::from(cfg);
    cfg.finish();
    std::vector<CloudSequence> seqs;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(rep_data))
      if (e.path().extension() == ".hpc") files.push_back(e.path());
    if (files.empty()) throw DataError("no .hpc sequences in " + rep_data);
    std::sort(files.begin(), files.end());
    for (const auto& f : files) seqs.push_back(load_sequence(f.string()));
    const Dataset data = dataset_from_sequences(std::move(seqs));
    const EvalReport r = run_experiment(ec, data, rep_out);
    std::cout << "folds=" << r.fold_accuracy.size()
              << " mean=" << format_g17(r.mean)
              << " std=" << format_g17(r.stddev) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hopc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const hopc::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const hopc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
}
