#pragma once

#include "partgan/data.hpp"
#include "partgan/network.hpp"

#include <cstdint>
#include <vector>

namespace partgan {

// Softmax head over a small logits network; the desk-scale stand-in for a
// large pretrained image classifier. Scores are only comparable within one
// classifier, so its held-out accuracy travels with every report.
struct Classifier {
  Network net;  // emits k logits
  int k = 0;
  double held_out_accuracy = 0;
};

// Row-stochastic class posteriors for a batch of images in [0,1].
Tensor softmax_probs(const Classifier& clf, const Tensor& images);

struct ScoreReport {
  std::vector<double> split_scores;  // each in [1, k]
  double mean = 0;
  double stddev = 0;  // population std over splits
  int n_splits = 0;
  double classifier_accuracy = 0;
};

// Partitions rows into n_splits contiguous equal splits (remainder to the
// last) and reports exp(mean KL(p(y|x) || p(y))) per split.
ScoreReport inception_score(const Tensor& probs, int n_splits);

struct ClassifierConfig {
  int epochs = 40;
  Eigen::Index batch_size = 64;
  double lr = 1e-3;
  Eigen::Index hidden = 64;
  double holdout_fraction = 0.2;
  double accuracy_floor = 0.9;
  std::uint64_t seed = 1;
};

// Trains on real labeled data; fails loudly when the held-out accuracy floor
// is not met.
Classifier train_surrogate_classifier(const Dataset& dataset, const ClassifierConfig& cfg);

// One-way F = MSB / MSW. Within-group variance of zero is signalled as +inf.
double anova_f(const std::vector<std::vector<double>>& groups);

struct AnovaReport {
  std::vector<double> f_per_channel;
  int group_count = 0;
  std::vector<Eigen::Index> group_sizes;
};

// Observation = per-image mean intensity of one channel, grouped by label.
AnovaReport anova_per_channel(const Dataset& dataset);

}  // namespace partgan
