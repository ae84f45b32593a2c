#pragma once

#include <Eigen/Dense>

namespace partgan {

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction; one state per network.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState create(Eigen::Index n, const AdamConfig& cfg);
};

// m <- b1*m + (1-b1)*g; v <- b2*v + (1-b2)*g^2; params -= lr*mhat/(sqrt(vhat)+eps).
// Rejects length mismatches and non-finite gradients without touching state.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads);

}  // namespace partgan
