#pragma once

#include "partgan/tensor.hpp"

#include <string>
#include <variant>
#include <vector>

namespace partgan {

// Closed layer set. Per-sample shapes are either [features] or [C, H, W].
struct Dense {
  Eigen::Index in_dim = 0;
  Eigen::Index out_dim = 0;
};

struct Conv2d {
  Eigen::Index in_ch = 0;
  Eigen::Index out_ch = 0;
  Eigen::Index kernel = 3;
  Eigen::Index stride = 1;
  Eigen::Index padding = 0;
};

struct BatchNorm {
  Eigen::Index channels = 0;
  double epsilon = 1e-5;
  double momentum = 0.1;  // running <- (1-momentum)*running + momentum*batch
};

struct Upsample {
  Eigen::Index scale_factor = 2;  // nearest-neighbor
};

struct Dropout {
  double rate = 0.5;  // inverted dropout; identity in eval mode
};

struct ReLU {};

struct LeakyReLU {
  double slope = 0.2;
};

struct Tanh {};
struct Sigmoid {};

struct Reshape {
  Shape target_shape;  // per-sample
};

using LayerSpec =
    std::variant<Dense, Conv2d, BatchNorm, Upsample, Dropout, ReLU, LeakyReLU, Tanh, Sigmoid, Reshape>;

std::string layer_name(const LayerSpec& spec);

// Field invariants (kernel/stride >= 1, 0 <= rate < 1, slope > 0, ...).
// Throws std::invalid_argument naming the layer on violation.
void validate_layer_fields(const LayerSpec& spec, std::size_t layer_index);

Eigen::Index layer_param_count(const LayerSpec& spec);
Eigen::Index layer_buffer_count(const LayerSpec& spec);

// Output per-sample shape given the input per-sample shape; throws on
// incompatibility, naming the layer. Conv: out = floor((in + 2p - k)/s) + 1.
Shape layer_output_shape(const LayerSpec& spec, const Shape& in, std::size_t layer_index);

bool layer_is_stochastic(const LayerSpec& spec);  // true for Dropout

}  // namespace partgan
