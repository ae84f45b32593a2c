#pragma once

#include "partgan/data.hpp"
#include "partgan/partition.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace partgan::cli {

// Invalid configuration (unknown keys, bad values). Mapped to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TrainMode { unified_gan, conditional_gan, distributed_cgan };
std::string to_string(TrainMode mode);
TrainMode mode_from_string(const std::string& s);
SyntheticKind synthetic_kind_from_name(const std::string& s);

struct DatasetConfig {
  std::string kind = "synthetic";  // synthetic | idx | cifar
  std::string idx_images;
  std::string idx_labels;
  bool pad_to_32 = true;
  std::vector<std::string> cifar_paths;
  SyntheticSpec synthetic;
};

struct RunConfig {
  DatasetConfig dataset;
  TrainMode mode = TrainMode::distributed_cgan;
  Eigen::Index d_z = 100;
  int epochs = 50;
  Eigen::Index batch_size = 64;
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;
  double clamp = 1e-7;
  double init_std = 0.02;
  std::uint64_t seed = 1234;
  int workers = 0;            // 0 = detected core budget
  std::string arch = "auto";  // auto | dc32 | conv16 | dense
  Eigen::Index hidden = 128;  // dense arch width
  bool sigmoid_output = true;
  std::string out_dir = "run-out";

  void validate() const;
  AdamConfig adam() const { return {lr, beta1, beta2, adam_eps}; }
};

RunConfig config_from_json(const nlohmann::json& j);  // unknown keys rejected
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config_file(const std::string& path);

Dataset load_dataset(const DatasetConfig& cfg);

// Architecture pair for one worker under this config (resolves "auto").
struct ArchPair {
  std::vector<LayerSpec> gen;
  std::vector<LayerSpec> disc;
};
ArchPair resolve_arch(const RunConfig& cfg, const Shape& sample_shape, Eigen::Index gen_input_dim);

// train: checkpoints/, losses.csv and manifest.json under cfg.out_dir.
int cmd_train(const RunConfig& cfg);

struct EvalOptions {
  Eigen::Index n_samples = 4096;
  int n_splits = 10;
  int classifier_epochs = 40;
  Eigen::Index classifier_hidden = 64;
  double classifier_lr = 1e-3;
  std::optional<double> accuracy_floor;  // default: 0.9, 0.95 for datasets >= 10k samples
};

// eval: scores.json, anova.json and a results.csv append next to the manifest.
int cmd_eval(const std::string& manifest_path, const EvalOptions& opts);

// bench: scaling.csv under out_dir.
int cmd_bench(const std::string& out_dir, const std::vector<int>& k_list, const BenchConfig& bench);

// sample: PGM/PPM grid from one class generator or the prior-weighted mixture.
int cmd_sample(const std::string& manifest_path, std::optional<int> class_id, Eigen::Index n,
               const std::string& out_path, std::optional<std::uint64_t> seed);

}  // namespace partgan::cli
