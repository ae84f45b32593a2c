#pragma once

#include "partgan/data.hpp"
#include "partgan/gan.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace partgan {

struct ClassShard {
  int class_id = 0;
  std::vector<Eigen::Index> indices;
};

// K disjoint covering shards; an empty class is an error naming the class.
std::vector<ClassShard> partition_by_label(const std::vector<int>& labels, int k);

struct ClassPrior {
  std::vector<Eigen::Index> counts;
  std::vector<double> probabilities;  // counts / sum(counts)
};

ClassPrior estimate_priors(const std::vector<ClassShard>& shards);

// Everything one worker needs; seed must be derived per class so streams
// never collide (derive_seed(base_seed, class_id)).
struct WorkerConfig {
  int class_id = 0;
  std::uint64_t seed = 0;
  int epochs = 1;
  Eigen::Index batch_size = 64;
  std::vector<LayerSpec> gen_arch;
  std::vector<LayerSpec> disc_arch;
  Shape image_shape;
  LatentSpec latent;
  LabelSpec label;
  AdamConfig adam;
  double prob_clamp = 1e-7;
  double init_std = 0.02;
  bool conditional_labels = false;  // per-sample one-hot conditioning (mixed-label batches)
};

struct WorkerResult {
  int class_id = 0;
  std::uint64_t seed = 0;
  GanPair pair;
  std::vector<StepReport> reports;
  double duration_s = 0;
  double start_s = 0;  // relative to coordinator launch
  double end_s = 0;
};

struct TrainingRun {
  std::vector<WorkerResult> workers;  // one per config, same order
  ClassPrior priors;
  double coordinator_duration_s = 0;
};

// Raised when workers fail: completed workers are reported, not discarded.
class TrainError : public std::runtime_error {
 public:
  TrainError(const std::string& msg, std::vector<int> failed, std::vector<int> completed)
      : std::runtime_error(msg), failed_classes(std::move(failed)), completed_classes(std::move(completed)) {}
  std::vector<int> failed_classes;
  std::vector<int> completed_classes;
};

// Trains one GanPair per shard concurrently on a bounded thread pool.
// Workers share nothing mutable; serial (pool_size 1) and concurrent
// execution produce bitwise-identical results. pool_size 0 means the
// detected core budget.
TrainingRun train_distributed(const Dataset& dataset, const std::vector<ClassShard>& shards,
                              const std::vector<WorkerConfig>& configs, int pool_size = 0);

// Draw class ~ Categorical(priors), then generate from that class's pair.
// Returns samples in [0,1] and their source classes. With a single pair the
// categorical draw is skipped, so the result equals generate() on that pair.
std::pair<Tensor, std::vector<int>> mixture_sample(const std::vector<const GanPair*>& pairs,
                                                   const ClassPrior& priors, Eigen::Index n, Rng& rng);

struct ScalingRow {
  int k = 0;
  double wall_clock_s = 0;
  double max_worker_s = 0;
  int cores_used = 0;
  bool oversubscribed = false;
};

// Fixed per-class workload (same per-class sample count, epochs and
// architecture for every K), so the wall clock measures scaling only.
struct BenchConfig {
  Eigen::Index per_class_n = 2048;
  int epochs = 4;
  Eigen::Index batch_size = 64;
  Eigen::Index d_z = 16;
  Eigen::Index hidden = 128;
  AdamConfig adam;
  std::uint64_t seed = 1;
  int pool_size = 0;  // 0 = detected core budget
};

std::vector<ScalingRow> bench_weak_scaling(const std::vector<int>& k_list, const BenchConfig& cfg);

// Core budget: hardware concurrency, reduced by any cgroup cpu quota, capped
// by the PARTGAN_THREADS environment variable.
int hardware_core_budget();
int default_pool_size();

}  // namespace partgan
