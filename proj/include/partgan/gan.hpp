#pragma once

#include "partgan/network.hpp"
#include "partgan/optim.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace partgan {

// Noise input: d_z i.i.d. standard-normal coordinates per sample.
struct LatentSpec {
  Eigen::Index d_z = 100;
};

// One-hot label embedding appended to the noise; d_y is the class count,
// 0 means unconditional.
struct LabelSpec {
  Eigen::Index d_y = 0;
};

// A generator/discriminator pair with its optimizer states. Confined to one
// worker; pairs train concurrently with zero shared mutable state.
struct GanPair {
  Network generator;
  Network discriminator;
  LatentSpec latent;
  LabelSpec label;
  AdamState opt_g;
  AdamState opt_d;
  double prob_clamp = 1e-7;
  long steps = 0;
};

// Builds both networks (independent init streams derived from seed) and
// validates that the generator consumes [d_z + d_y] and emits image_shape,
// and that the discriminator maps image_shape to a scalar.
GanPair make_gan_pair(std::vector<LayerSpec> gen_arch, std::vector<LayerSpec> disc_arch,
                      Shape image_shape, LatentSpec latent, LabelSpec label, const AdamConfig& adam,
                      std::uint64_t seed, double init_std = 0.02, double prob_clamp = 1e-7);

// n rows of d_z normal draws, concatenated with one-hot(class_id) when
// conditional. class_id is ignored when d_y = 0.
Tensor sample_latent(const LatentSpec& latent, const LabelSpec& label, std::optional<int> class_id,
                     Eigen::Index n, Rng& rng);
Tensor sample_latent_labeled(const LatentSpec& latent, const LabelSpec& label,
                             const std::vector<int>& labels, Rng& rng);

// -(1/2) mean log p_r - (1/2) mean log(1 - p_f), probabilities clamped to
// [clamp, 1-clamp] before any log. clamp must lie in (0, 0.5).
double discriminator_loss(const Tensor& d_real, const Tensor& d_fake, double clamp);

// (1/2) mean log p_f, clamped. The generator maximizes this; training
// descends its negation.
double generator_loss(const Tensor& d_fake, double clamp);

// Gradients of the losses w.r.t. the probability tensors (zero where the
// clamp is active).
Tensor discriminator_loss_grad_real(const Tensor& d_real, double clamp);
Tensor discriminator_loss_grad_fake(const Tensor& d_fake, double clamp);
Tensor generator_ascent_grad(const Tensor& d_fake, double clamp);  // d(-J_G)/dp

struct StepReport {
  double j_d = 0;
  double j_g = 0;
  double d_real_mean = 0;
  double d_fake_mean = 0;
};

// One alternating step: discriminator update on (real, fresh fake), then
// generator update through the frozen-parameter discriminator. real_batch is
// in [0,1] pixel space and is mapped to the internal [-1,1] range here.
// Reported losses are the values computed before the corresponding update.
StepReport train_step(GanPair& pair, const Tensor& real_batch, std::optional<int> class_id, Rng& rng);

// Per-sample conditioning for mixed-label batches (single-pair conditional
// training).
StepReport train_step_labeled(GanPair& pair, const Tensor& real_batch, const std::vector<int>& labels,
                              Rng& rng);

// n samples, generator in eval mode, tanh range mapped to [0,1] by (v+1)/2.
Tensor generate(const GanPair& pair, std::optional<int> class_id, Eigen::Index n, Rng& rng);
Tensor generate_labeled(const GanPair& pair, const std::vector<int>& labels, Rng& rng);

}  // namespace partgan
