#include "partgan/layers.hpp"

#include <stdexcept>

namespace partgan {

namespace {

[[noreturn]] void layer_error(std::size_t index, const LayerSpec& spec, const std::string& what) {
  throw std::invalid_argument("layer " + std::to_string(index) + " (" + layer_name(spec) + "): " + what);
}

Eigen::Index channels_of(const Shape& s) { return s.empty() ? 0 : s[0]; }

}  // namespace

std::string layer_name(const LayerSpec& spec) {
  struct Visitor {
    std::string operator()(const Dense&) const { return "dense"; }
    std::string operator()(const Conv2d&) const { return "conv2d"; }
    std::string operator()(const BatchNorm&) const { return "batch_norm"; }
    std::string operator()(const Upsample&) const { return "upsample"; }
    std::string operator()(const Dropout&) const { return "dropout"; }
    std::string operator()(const ReLU&) const { return "relu"; }
    std::string operator()(const LeakyReLU&) const { return "leaky_relu"; }
    std::string operator()(const Tanh&) const { return "tanh"; }
    std::string operator()(const Sigmoid&) const { return "sigmoid"; }
    std::string operator()(const Reshape&) const { return "reshape"; }
  };
  return std::visit(Visitor{}, spec);
}

void validate_layer_fields(const LayerSpec& spec, std::size_t i) {
  if (const auto* d = std::get_if<Dense>(&spec)) {
    if (d->in_dim < 1 || d->out_dim < 1) layer_error(i, spec, "dimensions must be positive");
  } else if (const auto* c = std::get_if<Conv2d>(&spec)) {
    if (c->in_ch < 1 || c->out_ch < 1) layer_error(i, spec, "channel counts must be positive");
    if (c->kernel < 1) layer_error(i, spec, "kernel must be >= 1");
    if (c->stride < 1) layer_error(i, spec, "stride must be >= 1");
    if (c->padding < 0) layer_error(i, spec, "padding must be >= 0");
  } else if (const auto* b = std::get_if<BatchNorm>(&spec)) {
    if (b->channels < 1) layer_error(i, spec, "channels must be positive");
    if (!(b->epsilon > 0)) layer_error(i, spec, "epsilon must be > 0");
    if (b->momentum < 0 || b->momentum > 1) layer_error(i, spec, "momentum must be in [0, 1]");
  } else if (const auto* u = std::get_if<Upsample>(&spec)) {
    if (u->scale_factor < 1) layer_error(i, spec, "scale_factor must be >= 1");
  } else if (const auto* p = std::get_if<Dropout>(&spec)) {
    if (p->rate < 0 || p->rate >= 1) layer_error(i, spec, "rate must be in [0, 1)");
  } else if (const auto* l = std::get_if<LeakyReLU>(&spec)) {
    if (!(l->slope > 0)) layer_error(i, spec, "slope must be > 0");
  } else if (const auto* r = std::get_if<Reshape>(&spec)) {
    if (r->target_shape.empty()) layer_error(i, spec, "target_shape must be non-empty");
    for (Eigen::Index d : r->target_shape)
      if (d < 1) layer_error(i, spec, "target_shape extents must be positive");
  }
}

Eigen::Index layer_param_count(const LayerSpec& spec) {
  if (const auto* d = std::get_if<Dense>(&spec)) return d->in_dim * d->out_dim + d->out_dim;
  if (const auto* c = std::get_if<Conv2d>(&spec)) return c->out_ch * c->in_ch * c->kernel * c->kernel + c->out_ch;
  if (const auto* b = std::get_if<BatchNorm>(&spec)) return 2 * b->channels;  // scale, shift
  return 0;
}

Eigen::Index layer_buffer_count(const LayerSpec& spec) {
  if (const auto* b = std::get_if<BatchNorm>(&spec)) return 2 * b->channels;  // running mean, running var
  return 0;
}

Shape layer_output_shape(const LayerSpec& spec, const Shape& in, std::size_t i) {
  if (const auto* d = std::get_if<Dense>(&spec)) {
    if (in.size() != 1 || in[0] != d->in_dim)
      layer_error(i, spec, "expects input [" + std::to_string(d->in_dim) + "], got " + shape_to_string(in));
    return {d->out_dim};
  }
  if (const auto* c = std::get_if<Conv2d>(&spec)) {
    if (in.size() != 3 || in[0] != c->in_ch)
      layer_error(i, spec, "expects input [" + std::to_string(c->in_ch) + " x H x W], got " + shape_to_string(in));
    Eigen::Index h = (in[1] + 2 * c->padding - c->kernel) / c->stride + 1;
    Eigen::Index w = (in[2] + 2 * c->padding - c->kernel) / c->stride + 1;
    if (in[1] + 2 * c->padding < c->kernel || in[2] + 2 * c->padding < c->kernel || h < 1 || w < 1)
      layer_error(i, spec, "kernel larger than padded input " + shape_to_string(in));
    return {c->out_ch, h, w};
  }
  if (const auto* b = std::get_if<BatchNorm>(&spec)) {
    if (in.empty() || channels_of(in) != b->channels)
      layer_error(i, spec,
                  "expects " + std::to_string(b->channels) + " channels, got input " + shape_to_string(in));
    return in;
  }
  if (const auto* u = std::get_if<Upsample>(&spec)) {
    if (in.size() != 3) layer_error(i, spec, "expects input [C x H x W], got " + shape_to_string(in));
    return {in[0], in[1] * u->scale_factor, in[2] * u->scale_factor};
  }
  if (const auto* r = std::get_if<Reshape>(&spec)) {
    if (shape_size(in) != shape_size(r->target_shape))
      layer_error(i, spec,
                  "cannot reshape " + shape_to_string(in) + " (size " + std::to_string(shape_size(in)) +
                      ") to " + shape_to_string(r->target_shape));
    return r->target_shape;
  }
  // Elementwise layers preserve shape.
  return in;
}

bool layer_is_stochastic(const LayerSpec& spec) { return std::holds_alternative<Dropout>(spec); }

}  // namespace partgan
