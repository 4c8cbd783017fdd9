#pragma once

#include <cstdint>
#include <vector>

namespace hopc {

// Row-major n x dim matrix of descriptors/histograms.
struct DataMatrix {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> v;  // n * dim

  const double* row(std::size_t i) const { return v.data() + i * dim; }
  double* row(std::size_t i) { return v.data() + i * dim; }
  void append(const double* p, std::size_t d);
  void append(const std::vector<double>& p) { append(p.data(), p.size()); }
};

struct Codebook {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centers;  // k * dim
};

// k-means++ seeding then Lloyd iterations; stops at max_iter or when the
// relative cost change drops below 1e-6. Empty clusters are re-seeded from
// the points farthest from their centers. Deterministic in the seed.
Codebook kmeans_codebook(const DataMatrix& data, std::size_t k,
                         std::uint64_t seed, int max_iter = 100,
                         std::vector<double>* cost_per_iter = nullptr);

// Hard nearest-center assignment (ties to the lowest center index),
// L1-normalized counts; an empty descriptor set encodes as all zeros.
std::vector<double> bow_encode(const DataMatrix& descriptors,
                               const Codebook& cb);

// Histogram intersection kernel sum_i min(x_i, y_i); negative entries are a
// caller error.
double hik(const double* a, const double* b, std::size_t n);

struct ClassifierModel {
  int n_classes = 0;
  std::size_t dim = 0;
  double C = 1.0;
  DataMatrix train;          // retained training histograms
  std::vector<int> labels;   // per training row
  std::vector<double> coef;  // n_classes x n, alpha_i * y_i per class head
  std::vector<double> bias;  // per class
};

// One-vs-rest SMO on the precomputed HIK Gram matrix, maximal-violating-pair
// working set, KKT tolerance 1e-3, deterministic tie-breaks.
ClassifierModel svm_train(const DataMatrix& hists,
                          const std::vector<int>& labels, double C);

// argmax of the per-class decision scores, ties to the lowest class id.
int svm_predict(const ClassifierModel& model, const double* x,
                std::vector<double>* scores = nullptr);

struct FoldPlan {
  std::vector<int> subjects;                 // sorted ascending
  std::vector<std::vector<int>> train_sets;  // lexicographic combinations
  int tagged_fold = -1;  // index of the odd-subjects split when present
};

// All C(n, train_count) train/test subject splits in lexicographic order.
// The split whose training set is the odd-position subjects (1st, 3rd, ...)
// is tagged; with subjects 1..10 that is {1,3,5,7,9}.
FoldPlan enumerate_folds(std::vector<int> subjects, int train_count);

struct EvalReport {
  std::vector<double> fold_accuracy;
  double mean = 0, stddev = 0, max = 0, min = 0;
  double tagged_accuracy = -1;  // accuracy of the tagged fold, -1 if none
  std::vector<std::vector<int>> confusion;  // pooled over folds [truth][pred]
};

// Evaluates per-sequence feature vectors under every fold: train a HIK SVM on
// the training subjects' rows, classify the rest. Sample standard deviation
// (n - 1). Rows with an all-zero feature vector predict the most frequent
// training class. constant_prediction >= 0 bypasses training and predicts
// that class everywhere (debug path for protocol checks).
EvalReport evaluate(const DataMatrix& features, const std::vector<int>& labels,
                    const std::vector<int>& subjects_per_row,
                    const FoldPlan& plan, double C,
                    int constant_prediction = -1);

// Same protocol, but training rows come from `train_features` and test rows
// from `test_features` (row i of both describes the same sequence). Used by
// the frame-rate-shift protocol, which tests on decimated versions.
EvalReport evaluate_split(const DataMatrix& train_features,
                          const DataMatrix& test_features,
                          const std::vector<int>& labels,
                          const std::vector<int>& subjects_per_row,
                          const FoldPlan& plan, double C,
                          int constant_prediction = -1);

}  // namespace hopc
