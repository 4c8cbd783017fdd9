#include "hopc/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hopc/errors.hpp"
#include "hopc/kernels.hpp"
#include "hopc/rng.hpp"

namespace hopc {

void DataMatrix::append(const double* p, std::size_t d) {
  if (n == 0) {
    dim = d;
  } else if (d != dim) {
    throw DataError("DataMatrix: inconsistent row dimension");
  }
  v.insert(v.end(), p, p + d);
  ++n;
}

namespace {

std::size_t nearest_center(const Codebook& cb, const double* p) {
  const auto& ops = kernels::active();
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cb.k; ++c) {
    const double d = ops.l2sq(cb.centers.data() + c * cb.dim, p, cb.dim);
    if (d < bd) {  // strict: ties keep the lowest index
      bd = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

Codebook kmeans_codebook(const DataMatrix& data, std::size_t k,
                         std::uint64_t seed, int max_iter,
                         std::vector<double>* cost_per_iter) {
  if (k < 1) throw ConfigError("kmeans: k must be >= 1");
  if (data.n < k)
    throw DataError("kmeans: need at least k points, have " +
                    std::to_string(data.n));
  const auto& ops = kernels::active();
  const std::size_t n = data.n, dim = data.dim;
  Rng rng(seed);

  Codebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.centers.resize(k * dim);

  // k-means++ seeding
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng.index(n);
  std::copy_n(data.row(first), dim, cb.centers.begin());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d =
          ops.l2sq(cb.centers.data() + (c - 1) * dim, data.row(i), dim);
      d2[i] = std::min(d2[i], d);
      total += d2[i];
    }
    std::size_t pick;
    if (total > 0) {
      const double u = rng.uniform() * total;
      double acc = 0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(n);  // all remaining points coincide with centers
    }
    std::copy_n(data.row(pick), dim, cb.centers.begin() + c * dim);
  }

  std::vector<std::size_t> assign(n, 0);
  std::vector<double> dist(n, 0);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  double prev_cost = std::numeric_limits<double>::infinity();

  for (int it = 0; it < max_iter; ++it) {
    double cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = nearest_center(cb, data.row(i));
      dist[i] =
          ops.l2sq(cb.centers.data() + assign[i] * dim, data.row(i), dim);
      cost += dist[i];
    }
    if (cost_per_iter) cost_per_iter->push_back(cost);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = data.row(i);
      double* s = sums.data() + assign[i] * dim;
      for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[c]);
      double* dst = cb.centers.data() + c * dim;
      const double* s = sums.data() + c * dim;
      for (std::size_t d = 0; d < dim; ++d) dst[d] = s[d] * inv;
    }
    // re-seed empty clusters from the farthest points, one each
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double fd = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (dist[i] > fd) {
          fd = dist[i];
          far = i;
        }
      }
      std::copy_n(data.row(far), dim, cb.centers.begin() + c * dim);
      dist[far] = 0;  // don't hand the same point to another empty cluster
      counts[c] = 1;
    }

    if (cost <= prev_cost &&
        prev_cost - cost <= 1e-6 * std::max(prev_cost, 1e-300))
      break;
    prev_cost = cost;
  }
  return cb;
}

std::vector<double> bow_encode(const DataMatrix& descriptors,
                               const Codebook& cb) {
  std::vector<double> h(cb.k, 0.0);
  if (descriptors.n == 0) return h;
  if (descriptors.dim != cb.dim)
    throw DataError("bow_encode: descriptor/codebook dimension mismatch");
  for (std::size_t i = 0; i < descriptors.n; ++i)
    h[nearest_center(cb, descriptors.row(i))] += 1.0;
  const double inv = 1.0 / static_cast<double>(descriptors.n);
  for (double& e : h) e *= inv;
  return h;
}

double hik(const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] < 0 || b[i] < 0)
      throw DataError("hik: negative histogram entry");
  return kernels::active().hik(a, b, n);
}

namespace {

// one-vs-rest head: SMO with the maximal-violating-pair rule on a shared Gram
void smo_head(const std::vector<double>& gram, std::size_t n,
              const std::vector<signed char>& y, double C, double* coef,
              double& bias) {
  constexpr double kTol = 1e-3;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> F(n);
  for (std::size_t i = 0; i < n; ++i) F[i] = -static_cast<double>(y[i]);
  const auto K = [&](std::size_t i, std::size_t j) { return gram[i * n + j]; };

  const long max_steps = 200L * static_cast<long>(n) + 10000L;
  double b_up = 0, b_low = 0;
  for (long step = 0;; ++step) {
    std::size_t iu = n, il = n;
    b_up = std::numeric_limits<double>::infinity();
    b_low = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_up = (y[i] > 0 && alpha[i] < C) || (y[i] < 0 && alpha[i] > 0);
      const bool in_low = (y[i] > 0 && alpha[i] > 0) || (y[i] < 0 && alpha[i] < C);
      if (in_up && F[i] < b_up) {
        b_up = F[i];
        iu = i;
      }
      if (in_low && F[i] > b_low) {
        b_low = F[i];
        il = i;
      }
    }
    if (iu == n || il == n || b_low - b_up <= 2 * kTol || step >= max_steps)
      break;

    const std::size_t i = iu, j = il;
    double L, H;
    if (y[i] != y[j]) {
      L = std::max(0.0, alpha[j] - alpha[i]);
      H = std::min(C, C + alpha[j] - alpha[i]);
    } else {
      L = std::max(0.0, alpha[i] + alpha[j] - C);
      H = std::min(C, alpha[i] + alpha[j]);
    }
    const double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
    double aj;
    if (eta > 1e-12) {
      aj = alpha[j] + y[j] * (F[i] - F[j]) / eta;
      aj = std::clamp(aj, L, H);
    } else {
      // flat direction: jump to the bound that descends
      aj = y[j] * (F[i] - F[j]) > 0 ? H : L;
    }
    if (std::fabs(aj - alpha[j]) < 1e-12) break;  // no progress possible
    const double ai = alpha[i] + static_cast<double>(y[i]) * y[j] *
                                     (alpha[j] - aj);
    const double di = (ai - alpha[i]) * y[i];
    const double dj = (aj - alpha[j]) * y[j];
    alpha[i] = ai;
    alpha[j] = aj;
    for (std::size_t k2 = 0; k2 < n; ++k2)
      F[k2] += di * K(i, k2) + dj * K(j, k2);
  }

  for (std::size_t i = 0; i < n; ++i)
    coef[i] = alpha[i] * static_cast<double>(y[i]);
  double b = 0;
  if (std::isfinite(b_up) && std::isfinite(b_low)) b = (b_up + b_low) / 2.0;
  bias = -b;
}

}  // namespace

ClassifierModel svm_train(const DataMatrix& hists,
                          const std::vector<int>& labels, double C) {
  const std::size_t n = hists.n;
  if (n == 0 || labels.size() != n)
    throw DataError("svm_train: labels must match rows");
  int n_classes = 0;
  for (int l : labels) {
    if (l < 0) throw DataError("svm_train: negative label");
    n_classes = std::max(n_classes, l + 1);
  }
  std::vector<int> per_class(n_classes, 0);
  for (int l : labels) ++per_class[l];
  if (n_classes < 2) throw DataError("svm_train: need at least two classes");
  for (int c = 0; c < n_classes; ++c)
    if (per_class[c] == 0)
      throw DataError("svm_train: class " + std::to_string(c) +
                      " has no samples");

  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = hik(hists.row(i), hists.row(j), hists.dim);
      if (!std::isfinite(v))
        throw NumericalError("svm_train: non-finite kernel entry");
      gram[i * n + j] = gram[j * n + i] = v;
    }

  ClassifierModel m;
  m.n_classes = n_classes;
  m.dim = hists.dim;
  m.C = C;
  m.train = hists;
  m.labels = labels;
  m.coef.assign(static_cast<std::size_t>(n_classes) * n, 0.0);
  m.bias.assign(n_classes, 0.0);
  std::vector<signed char> y(n);
  for (int c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == c ? 1 : -1;
    smo_head(gram, n, y, C, m.coef.data() + static_cast<std::size_t>(c) * n,
             m.bias[c]);
  }
  return m;
}

int svm_predict(const ClassifierModel& model, const double* x,
                std::vector<double>* scores) {
  const std::size_t n = model.train.n;
  std::vector<double> kx(n);
  for (std::size_t i = 0; i < n; ++i)
    kx[i] = hik(model.train.row(i), x, model.dim);
  int best = 0;
  double bs = -std::numeric_limits<double>::infinity();
  if (scores) scores->assign(model.n_classes, 0.0);
  for (int c = 0; c < model.n_classes; ++c) {
    const double* w = model.coef.data() + static_cast<std::size_t>(c) * n;
    double s = model.bias[c];
    s += kernels::active().dot(w, kx.data(), n);
    if (scores) (*scores)[c] = s;
    if (s > bs) {  // strict: ties keep the lowest class id
      bs = s;
      best = c;
    }
  }
  return best;
}

FoldPlan enumerate_folds(std::vector<int> subjects, int train_count) {
  std::sort(subjects.begin(), subjects.end());
  const int n = static_cast<int>(subjects.size());
  if (train_count < 1 || train_count >= n)
    throw ConfigError("enumerate_folds: need 1 <= train_count < subjects");

  std::vector<int> tagged;
  for (int i = 0; i < n; i += 2) tagged.push_back(subjects[i]);

  FoldPlan plan;
  plan.subjects = subjects;
  std::vector<int> pick(train_count);
  for (int i = 0; i < train_count; ++i) pick[i] = i;
  while (true) {
    std::vector<int> tr(train_count);
    for (int i = 0; i < train_count; ++i) tr[i] = subjects[pick[i]];
    if (tr == tagged) plan.tagged_fold = static_cast<int>(plan.train_sets.size());
    plan.train_sets.push_back(std::move(tr));
    // next lexicographic combination
    int i = train_count - 1;
    while (i >= 0 && pick[i] == n - train_count + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < train_count; ++j) pick[j] = pick[j - 1] + 1;
  }
  return plan;
}

EvalReport evaluate(const DataMatrix& features, const std::vector<int>& labels,
                    const std::vector<int>& subjects_per_row,
                    const FoldPlan& plan, double C, int constant_prediction) {
  return evaluate_split(features, features, labels, subjects_per_row, plan, C,
                        constant_prediction);
}

EvalReport evaluate_split(const DataMatrix& features,
                          const DataMatrix& test_features,
                          const std::vector<int>& labels,
                          const std::vector<int>& subjects_per_row,
                          const FoldPlan& plan, double C,
                          int constant_prediction) {
  if (features.n != labels.size() || features.n != subjects_per_row.size())
    throw DataError("evaluate: rows, labels and subjects must align");
  if (test_features.n != features.n || test_features.dim != features.dim)
    throw DataError("evaluate: train/test feature shapes must match");
  int n_classes = 0;
  for (int l : labels) n_classes = std::max(n_classes, l + 1);
  if (constant_prediction >= n_classes)
    throw ConfigError("evaluate: constant prediction class out of range");

  EvalReport rep;
  rep.confusion.assign(n_classes, std::vector<int>(n_classes, 0));

  for (std::size_t f = 0; f < plan.train_sets.size(); ++f) {
    const auto& tr = plan.train_sets[f];
    auto in_train = [&](int subj) {
      return std::binary_search(tr.begin(), tr.end(), subj);
    };

    DataMatrix train;
    std::vector<int> train_labels;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < features.n; ++i) {
      if (in_train(subjects_per_row[i])) {
        train.append(features.row(i), features.dim);
        train_labels.push_back(labels[i]);
      } else {
        test_rows.push_back(i);
      }
    }
    if (train.n == 0 || test_rows.empty())
      throw DataError("evaluate: fold with empty train or test side");

    // fallback class for all-zero rows: most frequent training class
    std::vector<int> freq(n_classes, 0);
    for (int l : train_labels) ++freq[l];
    const int majority = static_cast<int>(
        std::max_element(freq.begin(), freq.end()) - freq.begin());

    ClassifierModel model;
    if (constant_prediction < 0) model = svm_train(train, train_labels, C);
    std::size_t correct = 0;
    for (std::size_t row : test_rows) {
      const double* x = test_features.row(row);
      int pred;
      if (constant_prediction >= 0) {
        pred = constant_prediction;
      } else {
        bool all_zero = true;
        for (std::size_t d = 0; d < features.dim && all_zero; ++d)
          if (x[d] != 0) all_zero = false;
        pred = all_zero ? majority : svm_predict(model, x);
      }
      if (pred == labels[row]) ++correct;
      ++rep.confusion[labels[row]][pred];
    }
    rep.fold_accuracy.push_back(static_cast<double>(correct) /
                                static_cast<double>(test_rows.size()));
  }

  const std::size_t nf = rep.fold_accuracy.size();
  double sum = 0;
  rep.max = -std::numeric_limits<double>::infinity();
  rep.min = std::numeric_limits<double>::infinity();
  for (double a : rep.fold_accuracy) {
    sum += a;
    rep.max = std::max(rep.max, a);
    rep.min = std::min(rep.min, a);
  }
  rep.mean = nf ? sum / static_cast<double>(nf) : 0;
  double ss = 0;
  for (double a : rep.fold_accuracy) ss += (a - rep.mean) * (a - rep.mean);
  rep.stddev = nf > 1 ? std::sqrt(ss / static_cast<double>(nf - 1)) : 0;
  if (plan.tagged_fold >= 0 &&
      plan.tagged_fold < static_cast<int>(rep.fold_accuracy.size()))
    rep.tagged_accuracy = rep.fold_accuracy[plan.tagged_fold];
  return rep;
}

}  // namespace hopc
