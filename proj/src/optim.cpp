#include "partgan/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace partgan {

AdamState AdamState::create(Eigen::Index n, const AdamConfig& cfg) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  s.lr = cfg.lr;
  s.beta1 = cfg.beta1;
  s.beta2 = cfg.beta2;
  s.eps = cfg.eps;
  return s;
}

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
  if (params.size() != state.m.size() || grads.size() != state.m.size())
    throw std::invalid_argument("adam_step: length mismatch (params " + std::to_string(params.size()) +
                                ", grads " + std::to_string(grads.size()) + ", state " +
                                std::to_string(state.m.size()) + ")");
  if (!grads.allFinite()) throw std::invalid_argument("adam_step: non-finite gradient rejected");

  state.t += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseProduct(grads);
  double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  params.array() -=
      state.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace partgan
