#pragma once

#include <map>
#include <string>

#include "hopc/descriptor.hpp"
#include "hopc/io.hpp"
#include "hopc/keypoints.hpp"
#include "hopc/learn.hpp"

namespace hopc {

struct Dataset {
  std::vector<CloudSequence> seqs;
  std::vector<int> labels;    // 0-based class per sequence
  std::vector<int> subjects;  // subject id per sequence
};

// Builds a Dataset from tagged sequences (subject_id / action_label >= 0).
Dataset dataset_from_sequences(std::vector<CloudSequence> seqs);

struct ExperimentConfig {
  std::string pipeline = "holistic";  // holistic | stkp-surface | stkp-hopc
  std::string protocol = "standard";  // standard | speed-shift
  std::uint64_t seed = 1;
  double r = 0.1;
  int tau = 2;
  double theta = 1.12;
  double eta_min = 0.05;
  double r_prime = -1;  // <= 0: r / 4
  int tau_prime = -1;   // < 0: tau
  int top_n = 0;
  int stride = 1;
  bool adaptive_tau = false;
  int delta_max = 12;
  std::vector<double> radii;  // non-empty: adaptive spatial scale ladder
  int grid_nx = 6, grid_ny = 5, grid_nt = 3;
  int m_x = 20, m_y = 20, m_t = 3;
  std::size_t k = 100;
  double C = 1.0;
  int train_count = 5;
  int decimate_factor = 2;  // speed-shift test-side decimation

  // Reads every key (unknown keys then fail cfg.finish()) and validates.
  static ExperimentConfig from(Config& cfg);
  // Resolved values as sorted key=value lines, embedded in every report.
  std::map<std::string, std::string> echo() const;
};

// Per-sequence feature vector under the configured pipeline (the sequence's
// holistic descriptor, or its BoW histogram over `cb` for keypoint pipelines).
std::vector<double> sequence_features(const CloudSequence& seq,
                                      const DirectionSet& axes,
                                      const ExperimentConfig& cfg,
                                      const Codebook* cb);

// Keypoint descriptors of one sequence under the configured backend
// (surface grid or HOPC recomputed in the aligned frame).
DataMatrix keypoint_descriptors(const CloudSequence& seq,
                                const DirectionSet& axes,
                                const ExperimentConfig& cfg,
                                std::vector<Keypoint>* kps_out = nullptr);

// Full protocol: features for every sequence (speed-shift decimates the test
// side), fold enumeration, per-fold SVM training, and the report bundle in
// out_dir (config_echo.txt, folds.csv, summary.txt, confusion.csv plus
// timing.txt, which is the only file excluded from byte-identity).
EvalReport run_experiment(const ExperimentConfig& cfg, const Dataset& data,
                          const std::string& out_dir);

}  // namespace hopc
