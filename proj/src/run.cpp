#include "partgan/run.hpp"

#include "partgan/archs.hpp"
#include "partgan/checkpoint.hpp"
#include "partgan/eval.hpp"
#include "partgan/image_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

namespace partgan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_keys(const json& j, const std::string& prefix, std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) ok = true;
    if (!ok) throw ConfigError("unknown config key '" + prefix + item.key() + "'");
  }
}

std::string to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::gaussian_blobs_1d: return "gaussian-blobs-1d";
    case SyntheticKind::gaussian_blobs_2d: return "gaussian-blobs-2d";
    default: return "shape-images";
  }
}

}  // namespace

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::unified_gan: return "unified-gan";
    case TrainMode::conditional_gan: return "conditional-gan";
    default: return "distributed-cgan";
  }
}

TrainMode mode_from_string(const std::string& s) {
  if (s == "unified-gan") return TrainMode::unified_gan;
  if (s == "conditional-gan") return TrainMode::conditional_gan;
  if (s == "distributed-cgan") return TrainMode::distributed_cgan;
  throw ConfigError("unknown mode '" + s + "' (expected unified-gan | conditional-gan | distributed-cgan)");
}

SyntheticKind synthetic_kind_from_name(const std::string& s) {
  if (s == "gaussian-blobs-1d") return SyntheticKind::gaussian_blobs_1d;
  if (s == "gaussian-blobs-2d") return SyntheticKind::gaussian_blobs_2d;
  if (s == "shape-images") return SyntheticKind::shape_images;
  throw ConfigError("unknown synthetic kind '" + s + "'");
}

void RunConfig::validate() const {
  if (d_z < 1) throw ConfigError("d_z must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (lr < 0) throw ConfigError("lr must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
    throw ConfigError("betas must lie in [0, 1)");
  if (!(adam_eps > 0)) throw ConfigError("adam_eps must be > 0");
  if (!(bn_eps > 0)) throw ConfigError("bn_eps must be > 0");
  if (bn_momentum < 0 || bn_momentum > 1) throw ConfigError("bn_momentum must lie in [0, 1]");
  if (!(clamp > 0 && clamp < 0.5)) throw ConfigError("clamp must lie in (0, 0.5)");
  if (!(init_std > 0)) throw ConfigError("init_std must be > 0");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (hidden < 1) throw ConfigError("hidden must be >= 1");
  if (arch != "auto" && arch != "dc32" && arch != "conv16" && arch != "dense")
    throw ConfigError("unknown arch '" + arch + "' (expected auto | dc32 | conv16 | dense)");
  if (out_dir.empty()) throw ConfigError("out_dir must be non-empty");
  if (dataset.kind != "synthetic" && dataset.kind != "idx" && dataset.kind != "cifar")
    throw ConfigError("unknown dataset kind '" + dataset.kind + "'");
}

RunConfig config_from_json(const json& j) {
  check_keys(j, "",
             {"dataset", "mode", "d_z", "epochs", "batch_size", "lr", "beta1", "beta2", "adam_eps",
              "bn_eps", "bn_momentum", "clamp", "init_std", "seed", "workers", "arch", "hidden",
              "sigmoid_output", "out_dir"});
  RunConfig cfg;
  if (j.contains("mode")) cfg.mode = mode_from_string(j["mode"].get<std::string>());
  if (j.contains("d_z")) cfg.d_z = j["d_z"].get<Eigen::Index>();
  if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
  if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<Eigen::Index>();
  if (j.contains("lr")) cfg.lr = j["lr"].get<double>();
  if (j.contains("beta1")) cfg.beta1 = j["beta1"].get<double>();
  if (j.contains("beta2")) cfg.beta2 = j["beta2"].get<double>();
  if (j.contains("adam_eps")) cfg.adam_eps = j["adam_eps"].get<double>();
  if (j.contains("bn_eps")) cfg.bn_eps = j["bn_eps"].get<double>();
  if (j.contains("bn_momentum")) cfg.bn_momentum = j["bn_momentum"].get<double>();
  if (j.contains("clamp")) cfg.clamp = j["clamp"].get<double>();
  if (j.contains("init_std")) cfg.init_std = j["init_std"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("arch")) cfg.arch = j["arch"].get<std::string>();
  if (j.contains("hidden")) cfg.hidden = j["hidden"].get<Eigen::Index>();
  if (j.contains("sigmoid_output")) cfg.sigmoid_output = j["sigmoid_output"].get<bool>();
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();

  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    check_keys(d, "dataset.", {"kind", "images", "labels", "pad_to_32", "paths", "synthetic"});
    if (d.contains("kind")) cfg.dataset.kind = d["kind"].get<std::string>();
    if (d.contains("images")) cfg.dataset.idx_images = d["images"].get<std::string>();
    if (d.contains("labels")) cfg.dataset.idx_labels = d["labels"].get<std::string>();
    if (d.contains("pad_to_32")) cfg.dataset.pad_to_32 = d["pad_to_32"].get<bool>();
    if (d.contains("paths")) cfg.dataset.cifar_paths = d["paths"].get<std::vector<std::string>>();
    if (d.contains("synthetic")) {
      const json& s = d["synthetic"];
      check_keys(s, "dataset.synthetic.",
                 {"kind", "k", "per_class_n", "seed", "means", "stddev", "image_size"});
      SyntheticSpec& spec = cfg.dataset.synthetic;
      if (s.contains("kind")) spec.kind = synthetic_kind_from_name(s["kind"].get<std::string>());
      if (s.contains("k")) spec.k = s["k"].get<int>();
      if (s.contains("per_class_n")) spec.per_class_n = s["per_class_n"].get<Eigen::Index>();
      if (s.contains("seed")) spec.seed = s["seed"].get<std::uint64_t>();
      if (s.contains("means")) spec.means = s["means"].get<std::vector<std::vector<double>>>();
      if (s.contains("stddev")) spec.stddev = s["stddev"].get<double>();
      if (s.contains("image_size")) spec.image_size = s["image_size"].get<Eigen::Index>();
    }
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json d;
  d["kind"] = cfg.dataset.kind;
  if (cfg.dataset.kind == "idx") {
    d["images"] = cfg.dataset.idx_images;
    d["labels"] = cfg.dataset.idx_labels;
    d["pad_to_32"] = cfg.dataset.pad_to_32;
  } else if (cfg.dataset.kind == "cifar") {
    d["paths"] = cfg.dataset.cifar_paths;
  } else {
    const SyntheticSpec& s = cfg.dataset.synthetic;
    json sj;
    sj["kind"] = to_string(s.kind);
    sj["k"] = s.k;
    sj["per_class_n"] = s.per_class_n;
    sj["seed"] = s.seed;
    if (!s.means.empty()) sj["means"] = s.means;
    sj["stddev"] = s.stddev;
    sj["image_size"] = s.image_size;
    d["synthetic"] = sj;
  }
  return json{{"dataset", d},
              {"mode", to_string(cfg.mode)},
              {"d_z", cfg.d_z},
              {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"lr", cfg.lr},
              {"beta1", cfg.beta1},
              {"beta2", cfg.beta2},
              {"adam_eps", cfg.adam_eps},
              {"bn_eps", cfg.bn_eps},
              {"bn_momentum", cfg.bn_momentum},
              {"clamp", cfg.clamp},
              {"init_std", cfg.init_std},
              {"seed", cfg.seed},
              {"workers", cfg.workers},
              {"arch", cfg.arch},
              {"hidden", cfg.hidden},
              {"sigmoid_output", cfg.sigmoid_output},
              {"out_dir", cfg.out_dir}};
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

Dataset load_dataset(const DatasetConfig& cfg) {
  if (cfg.kind == "idx") {
    if (cfg.idx_images.empty() || cfg.idx_labels.empty())
      throw ConfigError("idx dataset needs 'images' and 'labels' paths");
    return read_idx(cfg.idx_images, cfg.idx_labels, cfg.pad_to_32);
  }
  if (cfg.kind == "cifar") {
    if (cfg.cifar_paths.empty()) throw ConfigError("cifar dataset needs 'paths'");
    return read_cifar_binary(cfg.cifar_paths);
  }
  return make_synthetic(cfg.synthetic);
}

ArchPair resolve_arch(const RunConfig& cfg, const Shape& sample, Eigen::Index gen_input_dim) {
  std::string arch = cfg.arch;
  bool conv_shape = sample.size() == 3 && (sample[0] == 1 || sample[0] == 3);
  if (arch == "auto") {
    if (conv_shape && sample[1] == 32 && sample[2] == 32)
      arch = "dc32";
    else if (conv_shape && sample[1] == 16 && sample[2] == 16)
      arch = "conv16";
    else
      arch = "dense";
  }
  BnOptions bn;
  bn.eps_hidden = cfg.bn_eps;
  bn.momentum = cfg.bn_momentum;
  if (arch == "dc32") {
    if (!conv_shape || sample[1] != 32 || sample[2] != 32)
      throw ConfigError("arch dc32 requires 1- or 3-channel 32x32 samples, dataset has " +
                        shape_to_string(sample));
    return {generator_dc32(gen_input_dim, sample[0], bn),
            discriminator_dc32(sample[0], cfg.sigmoid_output, bn)};
  }
  if (arch == "conv16") {
    if (!conv_shape || sample[1] != 16 || sample[2] != 16)
      throw ConfigError("arch conv16 requires 1- or 3-channel 16x16 samples, dataset has " +
                        shape_to_string(sample));
    return {generator_conv16(gen_input_dim, sample[0], bn), discriminator_conv16(sample[0], bn)};
  }
  return {generator_dense(gen_input_dim, sample, cfg.hidden), discriminator_dense(sample, cfg.hidden)};
}

namespace {

std::string run_id_of(const RunConfig& cfg) {
  return to_string(cfg.mode) + "-seed" + std::to_string(cfg.seed);
}

json priors_to_json(const ClassPrior& p) {
  return {{"counts", p.counts}, {"probabilities", p.probabilities}};
}

ClassPrior priors_from_json(const json& j) {
  ClassPrior p;
  p.counts = j.at("counts").get<std::vector<Eigen::Index>>();
  p.probabilities = j.at("probabilities").get<std::vector<double>>();
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct ManifestWorker {
  int class_id = 0;
  std::uint64_t seed = 0;
  std::string checkpoint;
  long steps = 0;
};

struct Manifest {
  std::string run_id;
  TrainMode mode = TrainMode::distributed_cgan;
  int k = 1;
  ClassPrior priors;
  RunConfig config;
  std::vector<ManifestWorker> workers;
  fs::path dir;
};

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  json j;
  in >> j;
  if (j.value("format", "") != "partgan-manifest")
    throw std::runtime_error(path + " is not a training manifest");
  Manifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.mode = mode_from_string(j.at("mode").get<std::string>());
  m.k = j.at("k").get<int>();
  m.priors = priors_from_json(j.at("priors"));
  m.config = config_from_json(j.at("config"));
  for (const auto& w : j.at("workers")) {
    ManifestWorker mw;
    mw.class_id = w.at("class_id").get<int>();
    mw.seed = w.at("seed").get<std::uint64_t>();
    mw.checkpoint = w.at("checkpoint").get<std::string>();
    mw.steps = w.at("steps").get<long>();
    m.workers.push_back(std::move(mw));
  }
  m.dir = fs::path(path).parent_path();
  return m;
}

std::vector<GanPair> load_pairs(const Manifest& m) {
  std::vector<GanPair> pairs;
  pairs.reserve(m.workers.size());
  for (const auto& w : m.workers) pairs.push_back(load_gan_pair((m.dir / w.checkpoint).string()));
  return pairs;
}

std::vector<int> draw_class_ids(const ClassPrior& priors, Eigen::Index n, Rng& rng) {
  std::size_t k = priors.probabilities.size();
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
  return ids;
}

// Samples n images from a trained run in [0,1]; ids are -1 when the mode
// carries no class information.
std::pair<Tensor, std::vector<int>> sample_from_run(const Manifest& m, const std::vector<GanPair>& pairs,
                                                    Eigen::Index n, Rng& rng) {
  if (m.mode == TrainMode::distributed_cgan) {
    std::vector<const GanPair*> ptrs;
    for (const auto& p : pairs) ptrs.push_back(&p);
    return mixture_sample(ptrs, m.priors, n, rng);
  }
  if (m.mode == TrainMode::conditional_gan) {
    std::vector<int> ids = draw_class_ids(m.priors, n, rng);
    return {generate_labeled(pairs.at(0), ids, rng), ids};
  }
  return {generate(pairs.at(0), std::nullopt, n, rng), std::vector<int>(static_cast<std::size_t>(n), -1)};
}

void append_results_csv(const fs::path& path, const std::string& run_id, const std::string& metric,
                        double mean, double stddev, const std::string& params) {
  bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (fresh) out << "run_id,metric,mean,std,params\n";
  out << run_id << "," << metric << "," << fmt_g17(mean) << "," << fmt_g17(stddev) << "," << params
      << "\n";
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "infinity" : "-infinity";
}

}  // namespace

int cmd_train(const RunConfig& cfg) {
  cfg.validate();
  Dataset ds = load_dataset(cfg.dataset);
  int k = ds.k;
  auto class_shards = partition_by_label(ds.labels, k);
  ClassPrior priors = estimate_priors(class_shards);
  Shape sample = ds.sample_shape();

  std::vector<ClassShard> shards;
  std::vector<WorkerConfig> configs;
  auto add_worker = [&](int class_id, LabelSpec label, bool conditional, std::vector<Eigen::Index> idx) {
    WorkerConfig w;
    w.class_id = class_id;
    w.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(class_id));
    w.epochs = cfg.epochs;
    w.batch_size = cfg.batch_size;
    w.image_shape = sample;
    w.latent = LatentSpec{cfg.d_z};
    w.label = label;
    w.adam = cfg.adam();
    w.prob_clamp = cfg.clamp;
    w.init_std = cfg.init_std;
    w.conditional_labels = conditional;
    ArchPair arch = resolve_arch(cfg, sample, cfg.d_z + label.d_y);
    w.gen_arch = std::move(arch.gen);
    w.disc_arch = std::move(arch.disc);
    shards.push_back(ClassShard{class_id, std::move(idx)});
    configs.push_back(std::move(w));
  };

  if (cfg.mode == TrainMode::distributed_cgan) {
    for (auto& s : class_shards) add_worker(s.class_id, LabelSpec{0}, false, s.indices);
  } else {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(ds.count()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    if (cfg.mode == TrainMode::unified_gan)
      add_worker(0, LabelSpec{0}, false, std::move(all));
    else
      add_worker(0, LabelSpec{k}, true, std::move(all));
  }

  TrainingRun run = train_distributed(ds, shards, configs, cfg.workers);

  fs::path out(cfg.out_dir);
  fs::create_directories(out / "checkpoints");

  json workers_json = json::array();
  std::string losses = "mode,class_id,step,j_d,j_g,d_real_mean,d_fake_mean\n";
  for (const auto& w : run.workers) {
    std::string rel = "checkpoints/class_" + std::to_string(w.class_id) + ".bin";
    save_gan_pair(w.pair, (out / rel).string());
    workers_json.push_back({{"class_id", w.class_id},
                            {"seed", w.seed},
                            {"checkpoint", rel},
                            {"steps", static_cast<long>(w.reports.size())},
                            {"duration_s", w.duration_s},
                            {"start_s", w.start_s},
                            {"end_s", w.end_s}});
    for (std::size_t s = 0; s < w.reports.size(); ++s) {
      const StepReport& r = w.reports[s];
      losses += to_string(cfg.mode) + "," + std::to_string(w.class_id) + "," + std::to_string(s) + "," +
                fmt_g17(r.j_d) + "," + fmt_g17(r.j_g) + "," + fmt_g17(r.d_real_mean) + "," +
                fmt_g17(r.d_fake_mean) + "\n";
    }
  }
  write_text(out / "losses.csv", losses);

  json manifest{{"format", "partgan-manifest"},
                {"run_id", run_id_of(cfg)},
                {"mode", to_string(cfg.mode)},
                {"k", k},
                {"priors", priors_to_json(priors)},
                {"base_seed", cfg.seed},
                {"config", config_to_json(cfg)},
                {"workers", workers_json},
                {"coordinator_duration_s", run.coordinator_duration_s}};
  write_text(out / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "trained " << run.workers.size() << " worker(s) in " << fmt_g17(run.coordinator_duration_s)
            << " s; manifest: " << (out / "manifest.json").string() << "\n";
  return 0;
}

int cmd_eval(const std::string& manifest_path, const EvalOptions& opts) {
  Manifest man = read_manifest(manifest_path);
  if (opts.n_samples < opts.n_splits)
    throw ConfigError("n_samples (" + std::to_string(opts.n_samples) + ") must be >= n_splits (" +
                      std::to_string(opts.n_splits) + ")");

  Dataset ds = load_dataset(man.config.dataset);
  std::vector<GanPair> pairs = load_pairs(man);

  Rng sample_rng(derive_seed(man.config.seed, 9001));
  auto [samples, ids] = sample_from_run(man, pairs, opts.n_samples, sample_rng);

  ClassifierConfig ccfg;
  ccfg.epochs = opts.classifier_epochs;
  ccfg.hidden = opts.classifier_hidden;
  ccfg.lr = opts.classifier_lr;
  ccfg.seed = derive_seed(man.config.seed, 7001);
  ccfg.accuracy_floor = opts.accuracy_floor ? *opts.accuracy_floor : (ds.count() >= 10000 ? 0.95 : 0.9);
  Classifier clf = train_surrogate_classifier(ds, ccfg);

  Tensor probs = softmax_probs(clf, samples);

  // seeded shuffle, then contiguous splits
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(opts.n_samples));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng shuffle_rng(derive_seed(man.config.seed, 9002));
  std::shuffle(perm.begin(), perm.end(), shuffle_rng.engine());
  Tensor shuffled(Shape(probs.shape()));
  Eigen::Index kk = probs.dim(1);
  for (Eigen::Index i = 0; i < opts.n_samples; ++i)
    shuffled.data().segment(i * kk, kk) = probs.data().segment(perm[static_cast<std::size_t>(i)] * kk, kk);

  ScoreReport score = inception_score(shuffled, opts.n_splits);
  score.classifier_accuracy = clf.held_out_accuracy;
  AnovaReport anova = anova_per_channel(ds);

  json scores_json{{"run_id", man.run_id},
                   {"metric", "inception_score"},
                   {"mean", score.mean},
                   {"std", score.stddev},
                   {"n_splits", score.n_splits},
                   {"n_samples", opts.n_samples},
                   {"split_scores", score.split_scores},
                   {"classifier_accuracy", score.classifier_accuracy}};
  write_text(man.dir / "scores.json", scores_json.dump(2) + "\n");

  json f_json = json::array();
  for (double f : anova.f_per_channel) f_json.push_back(finite_or_string(f));
  json anova_json{{"run_id", man.run_id},
                  {"metric", "anova_f_per_channel"},
                  {"f_per_channel", f_json},
                  {"group_count", anova.group_count},
                  {"group_sizes", anova.group_sizes}};
  write_text(man.dir / "anova.json", anova_json.dump(2) + "\n");

  fs::path results = man.dir / "results.csv";
  append_results_csv(results, man.run_id, "inception_score", score.mean, score.stddev,
                     "n_samples=" + std::to_string(opts.n_samples) +
                         ";n_splits=" + std::to_string(opts.n_splits) +
                         ";classifier_accuracy=" + fmt_g17(score.classifier_accuracy));
  for (std::size_t c = 0; c < anova.f_per_channel.size(); ++c)
    append_results_csv(results, man.run_id, "anova_f_ch" + std::to_string(c), anova.f_per_channel[c], 0.0,
                       "group_count=" + std::to_string(anova.group_count));

  std::cout << "inception score " << fmt_g17(score.mean) << " +- " << fmt_g17(score.stddev) << " over "
            << score.n_splits << " splits (classifier accuracy " << fmt_g17(score.classifier_accuracy)
            << ")\n";
  return 0;
}

int cmd_bench(const std::string& out_dir, const std::vector<int>& k_list, const BenchConfig& bench) {
  std::vector<ScalingRow> rows = bench_weak_scaling(k_list, bench);
  fs::path out(out_dir);
  fs::create_directories(out);
  std::string csv = "k,wall_clock_s,max_worker_s,cores_used,oversubscribed\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.k) + "," + fmt_g17(r.wall_clock_s) + "," + fmt_g17(r.max_worker_s) + "," +
           std::to_string(r.cores_used) + "," + (r.oversubscribed ? "1" : "0") + "\n";
    std::cout << "K=" << r.k << " wall=" << fmt_g17(r.wall_clock_s) << "s max_worker="
              << fmt_g17(r.max_worker_s) << "s" << (r.oversubscribed ? " (oversubscribed)" : "") << "\n";
  }
  write_text(out / "scaling.csv", csv);
  return 0;
}

int cmd_sample(const std::string& manifest_path, std::optional<int> class_id, Eigen::Index n,
               const std::string& out_path, std::optional<std::uint64_t> seed) {
  if (n < 1) throw ConfigError("sample count must be >= 1");
  Manifest man = read_manifest(manifest_path);
  std::vector<GanPair> pairs = load_pairs(man);
  Rng rng(seed ? *seed : derive_seed(man.config.seed, 5001));

  Tensor samples;
  if (class_id) {
    int cid = *class_id;
    if (cid < 0 || cid >= man.k)
      throw ConfigError("class id " + std::to_string(cid) + " out of range [0, " + std::to_string(man.k) +
                        ")");
    if (man.mode == TrainMode::distributed_cgan)
      samples = generate(pairs.at(static_cast<std::size_t>(cid)), cid, n, rng);
    else if (man.mode == TrainMode::conditional_gan)
      samples = generate(pairs.at(0), cid, n, rng);
    else
      throw ConfigError("unified-gan checkpoints are unconditional; omit --class");
  } else {
    samples = sample_from_run(man, pairs, n, rng).first;
  }
  write_image_grid(samples, out_path);
  std::cout << "wrote " << n << " sample(s) to " << out_path << "\n";
  return 0;
}

}  // namespace partgan::cli
