#include "partgan/partition.hpp"

#include "partgan/archs.hpp"

#include <malloc.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

namespace partgan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Training churns medium-sized tensors; with glibc defaults many of those
// allocations become mmap/munmap round trips, which serialize concurrent
// workers (and cost ~40% single-threaded here). Keep them on the arena heap.
void tune_allocator_for_tensor_churn() {
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 64 * 1024 * 1024);
    mallopt(M_TRIM_THRESHOLD, 256 * 1024 * 1024);
  });
}

}  // namespace

std::vector<ClassShard> partition_by_label(const std::vector<int>& labels, int k) {
  if (k < 1) throw std::invalid_argument("partition_by_label: k must be >= 1");
  if (labels.empty()) throw std::invalid_argument("partition_by_label: empty label vector");
  std::vector<ClassShard> shards(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) shards[static_cast<std::size_t>(j)].class_id = j;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int l = labels[i];
    if (l < 0 || l >= k)
      throw std::out_of_range("label " + std::to_string(l) + " at index " + std::to_string(i) +
                              " outside [0, " + std::to_string(k) + ")");
    shards[static_cast<std::size_t>(l)].indices.push_back(static_cast<Eigen::Index>(i));
  }
  for (const auto& s : shards)
    if (s.indices.empty())
      throw std::invalid_argument("class " + std::to_string(s.class_id) + " has no samples");
  return shards;
}

ClassPrior estimate_priors(const std::vector<ClassShard>& shards) {
  if (shards.empty()) throw std::invalid_argument("estimate_priors: no shards");
  ClassPrior prior;
  prior.counts.assign(shards.size(), 0);
  Eigen::Index total = 0;
  for (const auto& s : shards) {
    if (s.class_id < 0 || s.class_id >= static_cast<int>(shards.size()))
      throw std::invalid_argument("shard class id " + std::to_string(s.class_id) + " out of range");
    if (s.indices.empty()) throw std::invalid_argument("class " + std::to_string(s.class_id) + " has no samples");
    prior.counts[static_cast<std::size_t>(s.class_id)] = static_cast<Eigen::Index>(s.indices.size());
    total += static_cast<Eigen::Index>(s.indices.size());
  }
  prior.probabilities.resize(shards.size());
  for (std::size_t j = 0; j < shards.size(); ++j)
    prior.probabilities[j] = static_cast<double>(prior.counts[j]) / static_cast<double>(total);
  return prior;
}

namespace {

WorkerResult run_worker(const Dataset& dataset, const ClassShard& shard, const WorkerConfig& cfg,
                        Clock::time_point t0) {
  WorkerResult res;
  res.class_id = cfg.class_id;
  res.seed = cfg.seed;
  res.start_s = seconds_since(t0);
  auto begin = Clock::now();

  Rng rng(cfg.seed);
  GanPair pair = make_gan_pair(cfg.gen_arch, cfg.disc_arch, cfg.image_shape, cfg.latent, cfg.label,
                               cfg.adam, cfg.seed, cfg.init_std, cfg.prob_clamp);
  std::vector<Eigen::Index> order = shard.indices;
  for (int e = 0; e < cfg.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
      std::vector<Eigen::Index> batch(order.begin() + static_cast<std::ptrdiff_t>(at),
                                      order.begin() + static_cast<std::ptrdiff_t>(end));
      Tensor real = dataset.gather(batch);
      StepReport r;
      if (cfg.conditional_labels) {
        r = train_step_labeled(pair, real, dataset.gather_labels(batch), rng);
      } else {
        std::optional<int> cid;
        if (pair.label.d_y > 0) cid = cfg.class_id;
        r = train_step(pair, real, cid, rng);
      }
      res.reports.push_back(r);
    }
  }
  res.pair = std::move(pair);
  res.duration_s = std::max(std::chrono::duration<double>(Clock::now() - begin).count(), 1e-9);
  res.end_s = seconds_since(t0);
  return res;
}

}  // namespace

TrainingRun train_distributed(const Dataset& dataset, const std::vector<ClassShard>& shards,
                              const std::vector<WorkerConfig>& configs, int pool_size) {
  tune_allocator_for_tensor_churn();
  if (shards.empty()) throw std::invalid_argument("train_distributed: no shards");
  if (shards.size() != configs.size())
    throw std::invalid_argument("train_distributed: " + std::to_string(shards.size()) + " shards but " +
                                std::to_string(configs.size()) + " worker configs");

  std::size_t k = shards.size();
  int pool = pool_size > 0 ? pool_size : default_pool_size();
  std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(pool), k);

  std::vector<std::optional<WorkerResult>> results(k);
  std::vector<std::string> errors(k);
  std::atomic<std::size_t> next{0};
  auto t0 = Clock::now();

  auto body = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= k) break;
      try {
        results[i] = run_worker(dataset, shards[i], configs[i], t0);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      } catch (...) {
        errors[i] = "unknown worker error";
      }
    }
  };

  if (threads <= 1) {
    body();
  } else {
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) workers.emplace_back(body);
    for (auto& w : workers) w.join();
  }

  double total = seconds_since(t0);

  std::vector<int> failed, completed;
  std::string detail;
  for (std::size_t i = 0; i < k; ++i) {
    if (results[i]) {
      completed.push_back(configs[i].class_id);
    } else {
      failed.push_back(configs[i].class_id);
      detail += " class " + std::to_string(configs[i].class_id) + ": " + errors[i] + ";";
    }
  }
  if (!failed.empty())
    throw TrainError("training failed for " + std::to_string(failed.size()) + " of " + std::to_string(k) +
                         " workers (" + std::to_string(completed.size()) + " completed):" + detail,
                     std::move(failed), std::move(completed));

  TrainingRun run;
  run.coordinator_duration_s = std::max(total, 1e-9);
  std::vector<ClassShard> sorted = shards;
  run.priors = estimate_priors(sorted);
  run.workers.reserve(k);
  for (std::size_t i = 0; i < k; ++i) run.workers.push_back(std::move(*results[i]));
  return run;
}

std::pair<Tensor, std::vector<int>> mixture_sample(const std::vector<const GanPair*>& pairs,
                                                   const ClassPrior& priors, Eigen::Index n, Rng& rng) {
  if (pairs.empty()) throw std::invalid_argument("mixture_sample: no generator pairs");
  if (n < 1) throw std::invalid_argument("mixture_sample: n must be >= 1");
  std::size_t k = pairs.size();
  if (priors.probabilities.size() != k)
    throw std::invalid_argument("mixture_sample: prior length does not match pair count");

  if (k == 1) return {generate(*pairs[0], 0, n, rng), std::vector<int>(static_cast<std::size_t>(n), 0)};

  std::vector<double> cdf(k);
  double acc = 0;
  for (std::size_t j = 0; j < k; ++j) {
    acc += priors.probabilities[j];
    cdf[j] = acc;
  }

  std::vector<int> ids(static_cast<std::size_t>(n));
  for (auto& id : ids) {
    double u = rng.uniform();
    std::size_t j = 0;
    while (j + 1 < k && u >= cdf[j]) ++j;
    id = static_cast<int>(j);
  }

  Shape sample = pairs[0]->generator.output_shape();
  for (const auto* p : pairs)
    if (p->generator.output_shape() != sample)
      throw std::invalid_argument("mixture_sample: pairs emit different sample shapes");

  Shape out_shape = sample;
  out_shape.insert(out_shape.begin(), n);
  Tensor out(out_shape);
  Eigen::Index stride = shape_size(sample);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Eigen::Index> where;
    for (Eigen::Index i = 0; i < n; ++i)
      if (ids[static_cast<std::size_t>(i)] == static_cast<int>(j)) where.push_back(i);
    if (where.empty()) continue;
    Tensor s = generate(*pairs[j], static_cast<int>(j), static_cast<Eigen::Index>(where.size()), rng);
    for (std::size_t w = 0; w < where.size(); ++w)
      out.data().segment(where[w] * stride, stride) =
          s.data().segment(static_cast<Eigen::Index>(w) * stride, stride);
  }
  return {std::move(out), std::move(ids)};
}

std::vector<ScalingRow> bench_weak_scaling(const std::vector<int>& k_list, const BenchConfig& cfg) {
  if (k_list.empty()) throw std::invalid_argument("bench_weak_scaling: empty K list");
  tune_allocator_for_tensor_churn();
  int pool = cfg.pool_size > 0 ? cfg.pool_size : default_pool_size();

  std::vector<ScalingRow> rows;
  for (int k : k_list) {
    if (k < 1) throw std::invalid_argument("bench_weak_scaling: K must be >= 1");
    SyntheticSpec spec;
    spec.kind = SyntheticKind::gaussian_blobs_1d;
    spec.k = k;
    spec.per_class_n = cfg.per_class_n;
    spec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
    Dataset ds = make_synthetic(spec);
    auto shards = partition_by_label(ds.labels, k);

    std::vector<WorkerConfig> configs(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      WorkerConfig& w = configs[static_cast<std::size_t>(j)];
      w.class_id = j;
      w.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(j));
      w.epochs = cfg.epochs;
      w.batch_size = cfg.batch_size;
      w.image_shape = ds.sample_shape();
      w.latent = LatentSpec{cfg.d_z};
      w.label = LabelSpec{0};
      w.adam = cfg.adam;
      w.gen_arch = generator_dense(cfg.d_z, w.image_shape, cfg.hidden);
      w.disc_arch = discriminator_dense(w.image_shape, cfg.hidden);
    }

    TrainingRun run = train_distributed(ds, shards, configs, pool);
    ScalingRow row;
    row.k = k;
    row.wall_clock_s = run.coordinator_duration_s;
    row.max_worker_s = 0;
    for (const auto& w : run.workers) row.max_worker_s = std::max(row.max_worker_s, w.duration_s);
    row.cores_used = pool;
    row.oversubscribed = k > pool;
    rows.push_back(row);
  }
  return rows;
}

int hardware_core_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;

  // cgroup v2, then v1
  auto quota_cores = [](double quota, double period) {
    return static_cast<int>(std::ceil(quota / period));
  };
  std::ifstream v2("/sys/fs/cgroup/cpu.max");
  if (v2) {
    std::string q;
    double period = 0;
    if (v2 >> q >> period && q != "max" && period > 0) {
      double quota = std::atof(q.c_str());
      if (quota > 0) hw = std::min(hw, std::max(1, quota_cores(quota, period)));
    }
  } else {
    std::ifstream qf("/sys/fs/cgroup/cpu/cpu.cfs_quota_us");
    std::ifstream pf("/sys/fs/cgroup/cpu/cpu.cfs_period_us");
    double quota = 0, period = 0;
    if (qf >> quota && pf >> period && quota > 0 && period > 0)
      hw = std::min(hw, std::max(1, quota_cores(quota, period)));
  }
  return hw;
}

int default_pool_size() {
  int budget = hardware_core_budget();
  if (const char* env = std::getenv("PARTGAN_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) budget = std::min(budget, cap);
  }
  return budget;
}

}  // namespace partgan
