#include "partgan/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are declared little-endian and written by memcpy");

namespace partgan {

using nlohmann::json;

json layer_to_json(const LayerSpec& spec) {
  json j;
  j["type"] = layer_name(spec);
  if (const auto* d = std::get_if<Dense>(&spec)) {
    j["in_dim"] = d->in_dim;
    j["out_dim"] = d->out_dim;
  } else if (const auto* c = std::get_if<Conv2d>(&spec)) {
    j["in_ch"] = c->in_ch;
    j["out_ch"] = c->out_ch;
    j["kernel"] = c->kernel;
    j["stride"] = c->stride;
    j["padding"] = c->padding;
  } else if (const auto* b = std::get_if<BatchNorm>(&spec)) {
    j["channels"] = b->channels;
    j["epsilon"] = b->epsilon;
    j["momentum"] = b->momentum;
  } else if (const auto* u = std::get_if<Upsample>(&spec)) {
    j["scale_factor"] = u->scale_factor;
  } else if (const auto* p = std::get_if<Dropout>(&spec)) {
    j["rate"] = p->rate;
  } else if (const auto* l = std::get_if<LeakyReLU>(&spec)) {
    j["slope"] = l->slope;
  } else if (const auto* r = std::get_if<Reshape>(&spec)) {
    j["target_shape"] = r->target_shape;
  }
  return j;
}

LayerSpec layer_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "dense") return Dense{j.at("in_dim").get<Eigen::Index>(), j.at("out_dim").get<Eigen::Index>()};
  if (type == "conv2d")
    return Conv2d{j.at("in_ch").get<Eigen::Index>(), j.at("out_ch").get<Eigen::Index>(),
                  j.at("kernel").get<Eigen::Index>(), j.at("stride").get<Eigen::Index>(),
                  j.at("padding").get<Eigen::Index>()};
  if (type == "batch_norm")
    return BatchNorm{j.at("channels").get<Eigen::Index>(), j.at("epsilon").get<double>(),
                     j.at("momentum").get<double>()};
  if (type == "upsample") return Upsample{j.at("scale_factor").get<Eigen::Index>()};
  if (type == "dropout") return Dropout{j.at("rate").get<double>()};
  if (type == "relu") return ReLU{};
  if (type == "leaky_relu") return LeakyReLU{j.at("slope").get<double>()};
  if (type == "tanh") return Tanh{};
  if (type == "sigmoid") return Sigmoid{};
  if (type == "reshape") return Reshape{j.at("target_shape").get<Shape>()};
  throw std::invalid_argument("unknown layer type '" + type + "' in checkpoint");
}

namespace {

json adam_to_json(const AdamState& s) {
  return {{"lr", s.lr}, {"beta1", s.beta1}, {"beta2", s.beta2}, {"eps", s.eps}, {"t", s.t}};
}

AdamState adam_from_json(const json& j, Eigen::Index n) {
  AdamConfig cfg;
  cfg.lr = j.at("lr").get<double>();
  cfg.beta1 = j.at("beta1").get<double>();
  cfg.beta2 = j.at("beta2").get<double>();
  cfg.eps = j.at("eps").get<double>();
  AdamState s = AdamState::create(n, cfg);
  s.t = j.at("t").get<long>();
  return s;
}

void append_blob(std::vector<std::pair<std::string, const Eigen::VectorXd*>>& blobs, const char* name,
                 const Eigen::VectorXd& v) {
  blobs.emplace_back(name, &v);
}

}  // namespace

void save_gan_pair(const GanPair& pair, const std::string& path) {
  json header;
  header["format"] = "partgan-checkpoint";
  header["version"] = 1;
  header["d_z"] = pair.latent.d_z;
  header["d_y"] = pair.label.d_y;
  header["prob_clamp"] = pair.prob_clamp;
  header["steps"] = pair.steps;

  json gen;
  gen["input_shape"] = pair.generator.input_shape();
  gen["layers"] = json::array();
  for (const auto& l : pair.generator.layers()) gen["layers"].push_back(layer_to_json(l));
  header["generator"] = gen;

  json disc;
  disc["input_shape"] = pair.discriminator.input_shape();
  disc["layers"] = json::array();
  for (const auto& l : pair.discriminator.layers()) disc["layers"].push_back(layer_to_json(l));
  header["discriminator"] = disc;

  header["opt_g"] = adam_to_json(pair.opt_g);
  header["opt_d"] = adam_to_json(pair.opt_d);

  std::vector<std::pair<std::string, const Eigen::VectorXd*>> blobs;
  append_blob(blobs, "gen_params", pair.generator.params());
  append_blob(blobs, "gen_buffers", pair.generator.buffers());
  append_blob(blobs, "disc_params", pair.discriminator.params());
  append_blob(blobs, "disc_buffers", pair.discriminator.buffers());
  append_blob(blobs, "opt_g_m", pair.opt_g.m);
  append_blob(blobs, "opt_g_v", pair.opt_g.v);
  append_blob(blobs, "opt_d_m", pair.opt_d.m);
  append_blob(blobs, "opt_d_v", pair.opt_d.v);

  header["blobs"] = json::array();
  for (const auto& [name, vec] : blobs) header["blobs"].push_back({{"name", name}, {"len", vec->size()}});

  std::string head = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  std::uint32_t len = static_cast<std::uint32_t>(head.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& [name, vec] : blobs)
    out.write(reinterpret_cast<const char*>(vec->data()),
              static_cast<std::streamsize>(vec->size() * sizeof(double)));
  if (!out) throw std::runtime_error("short write on checkpoint " + path);
}

GanPair load_gan_pair(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  std::string head(len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("truncated checkpoint header in " + path);
  json header = json::parse(head);
  if (header.value("format", "") != "partgan-checkpoint")
    throw std::runtime_error(path + " is not a checkpoint file");

  GanPair pair;
  pair.latent.d_z = header.at("d_z").get<Eigen::Index>();
  pair.label.d_y = header.at("d_y").get<Eigen::Index>();
  pair.prob_clamp = header.at("prob_clamp").get<double>();
  pair.steps = header.at("steps").get<long>();

  auto build = [](const json& j) {
    std::vector<LayerSpec> layers;
    for (const auto& l : j.at("layers")) layers.push_back(layer_from_json(l));
    return build_network(std::move(layers), j.at("input_shape").get<Shape>(), 0);
  };
  pair.generator = build(header.at("generator"));
  pair.discriminator = build(header.at("discriminator"));
  pair.opt_g = adam_from_json(header.at("opt_g"), pair.generator.param_count());
  pair.opt_d = adam_from_json(header.at("opt_d"), pair.discriminator.param_count());

  auto read_blob = [&](const std::string& name, Eigen::VectorXd& dst) {
    for (const auto& b : header.at("blobs")) {
      if (b.at("name").get<std::string>() != name) continue;
      Eigen::Index n = b.at("len").get<Eigen::Index>();
      if (n != dst.size())
        throw std::runtime_error("blob '" + name + "' in " + path + " has length " + std::to_string(n) +
                                 " but the architecture expects " + std::to_string(dst.size()));
      if (n > 0) {
        in.read(reinterpret_cast<char*>(dst.data()), static_cast<std::streamsize>(n * sizeof(double)));
        if (!in) throw std::runtime_error("truncated blob '" + name + "' in " + path);
      }
      return;
    }
    throw std::runtime_error("missing blob '" + name + "' in " + path);
  };

  // blob table order is the write order
  read_blob("gen_params", pair.generator.params());
  read_blob("gen_buffers", pair.generator.buffers());
  read_blob("disc_params", pair.discriminator.params());
  read_blob("disc_buffers", pair.discriminator.buffers());
  read_blob("opt_g_m", pair.opt_g.m);
  read_blob("opt_g_v", pair.opt_g.v);
  read_blob("opt_d_m", pair.opt_d.m);
  read_blob("opt_d_v", pair.opt_d.v);
  return pair;
}

}  // namespace partgan
