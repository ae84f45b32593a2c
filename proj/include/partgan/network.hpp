#pragma once

#include "partgan/layers.hpp"
#include "partgan/rng.hpp"
#include "partgan/tensor.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace partgan {

enum class Mode { train, eval };

// Ordered layer stack with a flat parameter vector. BatchNorm running
// statistics live in a separate flat buffer vector: state, not parameters;
// they are only written by train-mode forward passes. A Network is owned by
// exactly one worker at a time and all math on it is single-threaded.
class Network {
 public:
  Network() = default;

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t layer_count() const { return layers_.size(); }

  // Per-sample shapes; shape_before(0) is the network input shape.
  const Shape& input_shape() const { return shapes_.front(); }
  const Shape& output_shape() const { return shapes_.back(); }
  const Shape& shape_before(std::size_t i) const { return shapes_[i]; }
  const Shape& shape_after(std::size_t i) const { return shapes_[i + 1]; }

  Eigen::Index param_count() const { return params_.size(); }
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& buffers() { return buffers_; }
  const Eigen::VectorXd& buffers() const { return buffers_; }

  Eigen::Index param_offset(std::size_t i) const { return param_offsets_[i]; }
  Eigen::Index buffer_offset(std::size_t i) const { return buffer_offsets_[i]; }

  bool has_stochastic_layer() const;

 private:
  friend Network build_network(std::vector<LayerSpec> specs, Shape input_shape, std::uint64_t seed,
                               double init_std);

  std::vector<LayerSpec> layers_;
  std::vector<Shape> shapes_;  // size layer_count()+1
  std::vector<Eigen::Index> param_offsets_;
  std::vector<Eigen::Index> buffer_offsets_;
  Eigen::VectorXd params_;
  Eigen::VectorXd buffers_;
};

// Weight init: normal(0, init_std) for dense/conv weights, zeros for biases,
// ones/zeros for BatchNorm scale/shift. Deterministic for a fixed seed.
Network build_network(std::vector<LayerSpec> specs, Shape input_shape, std::uint64_t seed,
                      double init_std = 0.02);

struct LayerTrace {
  Tensor input;
  Tensor output;            // kept where backward reads the output (tanh, sigmoid)
  Eigen::ArrayXd mean;      // batch norm
  Eigen::ArrayXd inv_std;   // batch norm
  Tensor normalized;        // batch norm
  Tensor mask;              // dropout (already scaled by 1/(1-rate))
};

// One trace per forward call; backward consumes it exactly once.
struct ForwardTrace {
  const Network* net = nullptr;
  Mode mode = Mode::eval;
  Eigen::Index batch = 0;
  std::vector<LayerTrace> layers;
  bool consumed = false;
};

// Batch tensor: leading dimension is the batch size, remaining dims must
// match the network input shape. Train mode draws dropout masks from rng and
// updates BatchNorm running statistics; eval mode is a pure function of
// (params, buffers, input).
std::pair<Tensor, ForwardTrace> forward(Network& net, const Tensor& batch, Mode mode, Rng& rng);

// Eval-mode forward without a trace; touches no network state.
Tensor infer(const Network& net, const Tensor& batch);

struct Gradients {
  Eigen::VectorXd params;
  Tensor input;
};

// Exact reverse-mode gradients of the traced computation.
Gradients backward(const Network& net, ForwardTrace& trace, const Tensor& output_grad);

// Scalar loss over the network output, with its gradient.
struct LossFn {
  std::function<double(const Tensor&)> value;
  std::function<Tensor(const Tensor&)> grad;
};

// Backprop vs central finite differences on n_coords sampled parameter
// coordinates; returns max |analytic - numeric| / max(|analytic|, |numeric|,
// 1e-8). Requires a deterministic forward: train-mode networks containing
// Dropout are rejected (check them in eval mode).
double grad_check(const Network& net, const Tensor& input, const LossFn& loss, int n_coords,
                  double step, Mode mode, Rng& rng);

}  // namespace partgan
