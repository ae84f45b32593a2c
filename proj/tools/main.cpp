#include "partgan/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using partgan::cli::ConfigError;
using partgan::cli::RunConfig;

// File first, then command-line overrides.
struct TrainArgs {
  std::string config_path;
  std::optional<std::string> mode, arch, out_dir, dataset_kind, idx_images, idx_labels, synthetic_kind;
  std::optional<long long> d_z, epochs, batch_size, workers, hidden, k, per_class_n, image_size;
  std::optional<double> lr, beta1, beta2, adam_eps, bn_eps, bn_momentum, clamp, init_std, stddev;
  std::optional<unsigned long long> seed, data_seed;
  std::optional<bool> sigmoid_output, pad_to_32;
  std::vector<std::string> cifar_paths;
};

RunConfig build_train_config(const TrainArgs& a) {
  RunConfig cfg;
  if (!a.config_path.empty()) cfg = partgan::cli::load_config_file(a.config_path);
  if (a.mode) cfg.mode = partgan::cli::mode_from_string(*a.mode);
  if (a.arch) cfg.arch = *a.arch;
  if (a.out_dir) cfg.out_dir = *a.out_dir;
  if (a.d_z) cfg.d_z = *a.d_z;
  if (a.epochs) cfg.epochs = static_cast<int>(*a.epochs);
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  if (a.workers) cfg.workers = static_cast<int>(*a.workers);
  if (a.hidden) cfg.hidden = *a.hidden;
  if (a.lr) cfg.lr = *a.lr;
  if (a.beta1) cfg.beta1 = *a.beta1;
  if (a.beta2) cfg.beta2 = *a.beta2;
  if (a.adam_eps) cfg.adam_eps = *a.adam_eps;
  if (a.bn_eps) cfg.bn_eps = *a.bn_eps;
  if (a.bn_momentum) cfg.bn_momentum = *a.bn_momentum;
  if (a.clamp) cfg.clamp = *a.clamp;
  if (a.init_std) cfg.init_std = *a.init_std;
  if (a.seed) cfg.seed = *a.seed;
  if (a.sigmoid_output) cfg.sigmoid_output = *a.sigmoid_output;
  if (a.dataset_kind) cfg.dataset.kind = *a.dataset_kind;
  if (a.idx_images) cfg.dataset.idx_images = *a.idx_images;
  if (a.idx_labels) cfg.dataset.idx_labels = *a.idx_labels;
  if (a.pad_to_32) cfg.dataset.pad_to_32 = *a.pad_to_32;
  if (!a.cifar_paths.empty()) cfg.dataset.cifar_paths = a.cifar_paths;
  if (a.synthetic_kind) cfg.dataset.synthetic.kind = partgan::cli::synthetic_kind_from_name(*a.synthetic_kind);
  if (a.k) cfg.dataset.synthetic.k = static_cast<int>(*a.k);
  if (a.per_class_n) cfg.dataset.synthetic.per_class_n = *a.per_class_n;
  if (a.image_size) cfg.dataset.synthetic.image_size = *a.image_size;
  if (a.data_seed) cfg.dataset.synthetic.seed = *a.data_seed;
  if (a.stddev) cfg.dataset.synthetic.stddev = *a.stddev;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partgan: label-partitioned GAN training, evaluation and scaling benchmarks"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train GAN worker(s) and write checkpoints + manifest");
  train->add_option("--config", ta.config_path, "JSON config file");
  train->add_option("--mode", ta.mode, "unified-gan | conditional-gan | distributed-cgan");
  train->add_option("--arch", ta.arch, "auto | dc32 | conv16 | dense");
  train->add_option("--out_dir,--out", ta.out_dir, "output directory");
  train->add_option("--d_z,--d-z", ta.d_z, "latent dimension");
  train->add_option("--epochs", ta.epochs);
  train->add_option("--batch_size,--batch-size", ta.batch_size);
  train->add_option("--workers", ta.workers, "worker pool size (0 = cores)");
  train->add_option("--hidden", ta.hidden, "dense arch width");
  train->add_option("--lr", ta.lr);
  train->add_option("--beta1", ta.beta1);
  train->add_option("--beta2", ta.beta2);
  train->add_option("--adam_eps,--adam-eps", ta.adam_eps);
  train->add_option("--bn_eps,--bn-eps", ta.bn_eps, "batch norm epsilon for hidden norms");
  train->add_option("--bn_momentum,--bn-momentum", ta.bn_momentum);
  train->add_option("--clamp", ta.clamp, "probability clamp before logs");
  train->add_option("--init_std,--init-std", ta.init_std);
  train->add_option("--seed", ta.seed);
  train->add_option("--sigmoid_output,--sigmoid-output", ta.sigmoid_output);
  train->add_option("--dataset", ta.dataset_kind, "synthetic | idx | cifar");
  train->add_option("--idx_images,--idx-images", ta.idx_images);
  train->add_option("--idx_labels,--idx-labels", ta.idx_labels);
  train->add_option("--pad_to_32,--pad-to-32", ta.pad_to_32);
  train->add_option("--cifar_path,--cifar-path", ta.cifar_paths, "CIFAR binary batch file (repeatable)");
  train->add_option("--synthetic_kind,--synthetic-kind", ta.synthetic_kind,
                    "gaussian-blobs-1d | gaussian-blobs-2d | shape-images");
  train->add_option("--k", ta.k, "synthetic class count");
  train->add_option("--per_class_n,--per-class-n", ta.per_class_n);
  train->add_option("--image_size,--image-size", ta.image_size);
  train->add_option("--data_seed,--data-seed", ta.data_seed);
  train->add_option("--stddev", ta.stddev, "synthetic blob standard deviation");

  std::string eval_manifest;
  partgan::cli::EvalOptions eo;
  double eval_floor = -1;
  auto* eval = app.add_subcommand("eval", "score generated samples and run the per-channel variance test");
  eval->add_option("--manifest", eval_manifest, "manifest.json from a training run")->required();
  eval->add_option("--n_samples,--n-samples", eo.n_samples);
  eval->add_option("--n_splits,--n-splits", eo.n_splits);
  eval->add_option("--clf_epochs,--clf-epochs", eo.classifier_epochs);
  eval->add_option("--clf_hidden,--clf-hidden", eo.classifier_hidden);
  eval->add_option("--clf_lr,--clf-lr", eo.classifier_lr);
  eval->add_option("--accuracy_floor,--accuracy-floor", eval_floor,
                   "surrogate accuracy floor (default 0.9, 0.95 for >= 10k samples)");

  std::string bench_out = "bench-out";
  std::vector<int> k_list{1, 2, 4};
  partgan::BenchConfig bc;
  long long bench_pool = 0;
  auto* bench = app.add_subcommand("bench", "weak-scaling benchmark with fixed per-class workload");
  bench->add_option("--out_dir,--out", bench_out);
  bench->add_option("--k_list,--k-list", k_list, "class counts to measure");
  bench->add_option("--per_class_n,--per-class-n", bc.per_class_n);
  bench->add_option("--epochs", bc.epochs);
  bench->add_option("--batch_size,--batch-size", bc.batch_size);
  bench->add_option("--d_z,--d-z", bc.d_z);
  bench->add_option("--hidden", bc.hidden);
  bench->add_option("--lr", bc.adam.lr);
  bench->add_option("--seed", bc.seed);
  bench->add_option("--pool", bench_pool, "worker pool size (0 = cores)");

  std::string sample_manifest, sample_out = "samples.pgm";
  long long sample_class = -1;
  long long sample_n = 64;
  unsigned long long sample_seed = 0;
  bool sample_seed_set = false;
  auto* sample = app.add_subcommand("sample", "write a PGM/PPM grid of generated samples");
  sample->add_option("--manifest", sample_manifest)->required();
  sample->add_option("--class", sample_class, "generate from one class (default: prior mixture)");
  sample->add_option("--n", sample_n);
  sample->add_option("--out", sample_out);
  sample->add_option("--seed", sample_seed)->each([&](const std::string&) { sample_seed_set = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return partgan::cli::cmd_train(build_train_config(ta));
    if (eval->parsed()) {
      if (eval_floor >= 0) eo.accuracy_floor = eval_floor;
      return partgan::cli::cmd_eval(eval_manifest, eo);
    }
    if (bench->parsed()) {
      bc.pool_size = static_cast<int>(bench_pool);
      return partgan::cli::cmd_bench(bench_out, k_list, bc);
    }
    if (sample->parsed()) {
      std::optional<int> cls;
      if (sample_class >= 0) cls = static_cast<int>(sample_class);
      std::optional<std::uint64_t> seed;
      if (sample_seed_set) seed = sample_seed;
      return partgan::cli::cmd_sample(sample_manifest, cls, sample_n, sample_out, seed);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
