#include "partgan/eval.hpp"

#include "partgan/archs.hpp"
#include "partgan/optim.hpp"
#include "partgan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace partgan {

namespace {

// Row-wise stable softmax over [N, K] logits.
Tensor softmax_rows(const Tensor& logits) {
  Tensor probs(Shape(logits.shape()));
  Eigen::Index n = logits.dim(0);
  Eigen::Index k = logits.size() / n;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* in = logits.data().data() + i * k;
    double* out = probs.data().data() + i * k;
    double mx = *std::max_element(in, in + k);
    double sum = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      out[j] = std::exp(in[j] - mx);
      sum += out[j];
    }
    for (Eigen::Index j = 0; j < k; ++j) out[j] /= sum;
  }
  return probs;
}

}  // namespace

Tensor softmax_probs(const Classifier& clf, const Tensor& images) {
  Tensor logits = infer(clf.net, images);
  return softmax_rows(logits);
}

ScoreReport inception_score(const Tensor& probs, int n_splits) {
  if (probs.rank() != 2) throw std::invalid_argument("inception_score: probs must be [N, K]");
  Eigen::Index n = probs.dim(0);
  Eigen::Index k = probs.dim(1);
  if (n_splits < 1) throw std::invalid_argument("inception_score: n_splits must be >= 1");
  if (n < n_splits)
    throw std::invalid_argument("inception_score: " + std::to_string(n) + " samples cannot fill " +
                                std::to_string(n_splits) + " splits");
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      double p = probs[i * k + j];
      if (p < 0) throw std::invalid_argument("inception_score: negative probability");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-6)
      throw std::invalid_argument("inception_score: row " + std::to_string(i) + " sums to " +
                                  std::to_string(s));
  }

  ScoreReport report;
  report.n_splits = n_splits;
  Eigen::Index base = n / n_splits;
  double log_k = std::log(static_cast<double>(k));
  for (int s = 0; s < n_splits; ++s) {
    Eigen::Index begin = base * s;
    Eigen::Index end = (s == n_splits - 1) ? n : begin + base;
    Eigen::Index m = end - begin;
    Eigen::ArrayXd marginal = Eigen::ArrayXd::Zero(k);
    for (Eigen::Index i = begin; i < end; ++i)
      for (Eigen::Index j = 0; j < k; ++j) marginal[j] += probs[i * k + j];
    marginal /= static_cast<double>(m);
    double kl_sum = 0;
    for (Eigen::Index i = begin; i < end; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        double p = probs[i * k + j];
        if (p > 0) kl_sum += p * std::log(p / marginal[j]);
      }
    // mean KL equals the split's mutual information, so [0, log K] is exact;
    // only rounding can step outside it
    double mean_kl = std::clamp(kl_sum / static_cast<double>(m), 0.0, log_k);
    report.split_scores.push_back(std::exp(mean_kl));
  }

  double mean = std::accumulate(report.split_scores.begin(), report.split_scores.end(), 0.0) /
                static_cast<double>(n_splits);
  double var = 0;
  for (double v : report.split_scores) var += (v - mean) * (v - mean);
  report.mean = mean;
  report.stddev = std::sqrt(var / static_cast<double>(n_splits));
  return report;
}

Classifier train_surrogate_classifier(const Dataset& dataset, const ClassifierConfig& cfg) {
  validate_dataset(dataset);
  if (dataset.k < 2)
    throw std::invalid_argument("surrogate classifier needs at least 2 classes, dataset has " +
                                std::to_string(dataset.k));

  Eigen::Index m = dataset.count();
  Rng rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng.engine());

  Eigen::Index holdout = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(cfg.holdout_fraction * static_cast<double>(m))), 1, m - 1);
  std::vector<Eigen::Index> test(order.begin(), order.begin() + holdout);
  std::vector<Eigen::Index> train(order.begin() + holdout, order.end());

  Classifier clf;
  clf.k = dataset.k;
  clf.net = build_network(classifier_dense(dataset.sample_shape(), cfg.hidden, dataset.k),
                          dataset.sample_shape(), derive_seed(cfg.seed, 3));
  AdamConfig adam;
  adam.lr = cfg.lr;
  adam.beta1 = 0.9;
  AdamState opt = AdamState::create(clf.net.param_count(), adam);

  for (int e = 0; e < cfg.epochs; ++e) {
    std::shuffle(train.begin(), train.end(), rng.engine());
    for (std::size_t at = 0; at < train.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t end = std::min(train.size(), at + static_cast<std::size_t>(cfg.batch_size));
      std::vector<Eigen::Index> batch(train.begin() + static_cast<std::ptrdiff_t>(at),
                                      train.begin() + static_cast<std::ptrdiff_t>(end));
      Tensor x = dataset.gather(batch);
      auto labels = dataset.gather_labels(batch);
      auto [logits, trace] = forward(clf.net, x, Mode::train, rng);
      Tensor probs = softmax_rows(logits);
      // cross-entropy gradient w.r.t. logits
      Tensor g(Shape(probs.shape()), probs.data() / static_cast<double>(batch.size()));
      for (std::size_t i = 0; i < batch.size(); ++i)
        g[static_cast<Eigen::Index>(i) * dataset.k + labels[i]] -= 1.0 / static_cast<double>(batch.size());
      Gradients grads = backward(clf.net, trace, g);
      adam_step(opt, clf.net.params(), grads.params);
    }
  }

  Eigen::Index correct = 0;
  Tensor probs = softmax_probs(clf, dataset.gather(test));
  auto truth = dataset.gather_labels(test);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double* row = probs.data().data() + static_cast<Eigen::Index>(i) * dataset.k;
    int arg = static_cast<int>(std::max_element(row, row + dataset.k) - row);
    if (arg == truth[i]) ++correct;
  }
  clf.held_out_accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  if (clf.held_out_accuracy < cfg.accuracy_floor)
    throw std::runtime_error(
        "surrogate classifier held-out accuracy " + std::to_string(clf.held_out_accuracy) +
        " is below the floor " + std::to_string(cfg.accuracy_floor) +
        "; raise epochs/hidden or lower the floor in the classifier config");
  return clf;
}

double anova_f(const std::vector<std::vector<double>>& groups) {
  std::size_t k = groups.size();
  if (k < 2) throw std::invalid_argument("anova_f: need at least 2 groups");
  std::size_t n = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (groups[j].empty()) throw std::invalid_argument("anova_f: group " + std::to_string(j) + " is empty");
    n += groups[j].size();
  }
  if (n <= k) throw std::invalid_argument("anova_f: need more observations than groups");

  double grand = 0;
  std::vector<double> means(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (double v : groups[j]) means[j] += v;
    grand += means[j];
    means[j] /= static_cast<double>(groups[j].size());
  }
  grand /= static_cast<double>(n);

  double ssb = 0, ssw = 0;
  for (std::size_t j = 0; j < k; ++j) {
    ssb += static_cast<double>(groups[j].size()) * (means[j] - grand) * (means[j] - grand);
    for (double v : groups[j]) ssw += (v - means[j]) * (v - means[j]);
  }
  double msb = ssb / static_cast<double>(k - 1);
  double msw = ssw / static_cast<double>(n - k);
  if (msw == 0.0) return std::numeric_limits<double>::infinity();
  return msb / msw;
}

AnovaReport anova_per_channel(const Dataset& dataset) {
  validate_dataset(dataset);
  if (dataset.k < 2) throw std::invalid_argument("anova_per_channel: need at least 2 classes");

  AnovaReport report;
  report.group_count = dataset.k;
  report.group_sizes.assign(static_cast<std::size_t>(dataset.k), 0);
  for (int l : dataset.labels) report.group_sizes[static_cast<std::size_t>(l)] += 1;

  Eigen::Index spatial = dataset.height() * dataset.width();
  for (Eigen::Index c = 0; c < dataset.channels(); ++c) {
    std::vector<std::vector<double>> groups(static_cast<std::size_t>(dataset.k));
    for (Eigen::Index i = 0; i < dataset.count(); ++i) {
      const double* plane =
          dataset.images.data().data() + (i * dataset.channels() + c) * spatial;
      double mean = 0;
      for (Eigen::Index t = 0; t < spatial; ++t) mean += plane[t];
      mean /= static_cast<double>(spatial);
      groups[static_cast<std::size_t>(dataset.labels[static_cast<std::size_t>(i)])].push_back(mean);
    }
    report.f_per_channel.push_back(anova_f(groups));
  }
  return report;
}

}  // namespace partgan
