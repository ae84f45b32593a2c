#include "partgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace partgan {

namespace {

void check_clamp(double clamp) {
  if (!(clamp > 0.0 && clamp < 0.5))
    throw std::invalid_argument("probability clamp must lie in (0, 0.5), got " + std::to_string(clamp));
}

void check_nonempty(const Tensor& t, const char* what) {
  if (t.size() == 0) throw std::invalid_argument(std::string(what) + ": empty batch");
}

double clamped(double p, double clamp) { return std::clamp(p, clamp, 1.0 - clamp); }

bool inside_clamp(double p, double clamp) { return p > clamp && p < 1.0 - clamp; }

}  // namespace

GanPair make_gan_pair(std::vector<LayerSpec> gen_arch, std::vector<LayerSpec> disc_arch,
                      Shape image_shape, LatentSpec latent, LabelSpec label, const AdamConfig& adam,
                      std::uint64_t seed, double init_std, double prob_clamp) {
  check_clamp(prob_clamp);
  if (latent.d_z < 1) throw std::invalid_argument("latent dimension must be positive");
  if (label.d_y < 0) throw std::invalid_argument("label embedding dimension must be non-negative");

  GanPair pair;
  pair.latent = latent;
  pair.label = label;
  pair.prob_clamp = prob_clamp;
  pair.generator =
      build_network(std::move(gen_arch), {latent.d_z + label.d_y}, derive_seed(seed, 1), init_std);
  pair.discriminator = build_network(std::move(disc_arch), image_shape, derive_seed(seed, 2), init_std);

  if (pair.generator.output_shape() != image_shape)
    throw std::invalid_argument("generator emits " + shape_to_string(pair.generator.output_shape()) +
                                " but images are " + shape_to_string(image_shape));
  if (shape_size(pair.discriminator.output_shape()) != 1)
    throw std::invalid_argument("discriminator must emit a scalar, got " +
                                shape_to_string(pair.discriminator.output_shape()));

  pair.opt_g = AdamState::create(pair.generator.param_count(), adam);
  pair.opt_d = AdamState::create(pair.discriminator.param_count(), adam);
  return pair;
}

Tensor sample_latent_labeled(const LatentSpec& latent, const LabelSpec& label,
                             const std::vector<int>& labels, Rng& rng) {
  if (labels.empty()) throw std::invalid_argument("sample_latent: empty batch");
  Eigen::Index n = static_cast<Eigen::Index>(labels.size());
  Eigen::Index width = latent.d_z + label.d_y;
  Tensor z(Shape{n, width});
  for (Eigen::Index i = 0; i < n; ++i) {
    double* row = z.data().data() + i * width;
    for (Eigen::Index j = 0; j < latent.d_z; ++j) row[j] = rng.normal();
    if (label.d_y > 0) {
      int k = labels[static_cast<std::size_t>(i)];
      if (k < 0 || k >= label.d_y)
        throw std::out_of_range("class id " + std::to_string(k) + " out of range [0, " +
                                std::to_string(label.d_y) + ")");
      row[latent.d_z + k] = 1.0;
    }
  }
  return z;
}

Tensor sample_latent(const LatentSpec& latent, const LabelSpec& label, std::optional<int> class_id,
                     Eigen::Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_latent: batch size must be positive");
  int k = 0;
  if (label.d_y > 0) {
    if (!class_id)
      throw std::invalid_argument("sample_latent: class id required when conditioning is enabled");
    k = *class_id;
  }
  return sample_latent_labeled(latent, label, std::vector<int>(static_cast<std::size_t>(n), k), rng);
}

double discriminator_loss(const Tensor& d_real, const Tensor& d_fake, double clamp) {
  check_clamp(clamp);
  check_nonempty(d_real, "discriminator_loss");
  check_nonempty(d_fake, "discriminator_loss");
  double sr = 0, sf = 0;
  for (Eigen::Index i = 0; i < d_real.size(); ++i) sr += std::log(clamped(d_real[i], clamp));
  for (Eigen::Index i = 0; i < d_fake.size(); ++i) sf += std::log(1.0 - clamped(d_fake[i], clamp));
  return -0.5 * sr / static_cast<double>(d_real.size()) - 0.5 * sf / static_cast<double>(d_fake.size());
}

double generator_loss(const Tensor& d_fake, double clamp) {
  check_clamp(clamp);
  check_nonempty(d_fake, "generator_loss");
  double s = 0;
  for (Eigen::Index i = 0; i < d_fake.size(); ++i) s += std::log(clamped(d_fake[i], clamp));
  return 0.5 * s / static_cast<double>(d_fake.size());
}

Tensor discriminator_loss_grad_real(const Tensor& d_real, double clamp) {
  check_clamp(clamp);
  check_nonempty(d_real, "discriminator_loss_grad_real");
  Tensor g(Shape(d_real.shape()));
  double n = static_cast<double>(d_real.size());
  for (Eigen::Index i = 0; i < d_real.size(); ++i)
    g[i] = inside_clamp(d_real[i], clamp) ? -0.5 / (n * d_real[i]) : 0.0;
  return g;
}

Tensor discriminator_loss_grad_fake(const Tensor& d_fake, double clamp) {
  check_clamp(clamp);
  check_nonempty(d_fake, "discriminator_loss_grad_fake");
  Tensor g(Shape(d_fake.shape()));
  double n = static_cast<double>(d_fake.size());
  for (Eigen::Index i = 0; i < d_fake.size(); ++i)
    g[i] = inside_clamp(d_fake[i], clamp) ? 0.5 / (n * (1.0 - d_fake[i])) : 0.0;
  return g;
}

Tensor generator_ascent_grad(const Tensor& d_fake, double clamp) {
  check_clamp(clamp);
  check_nonempty(d_fake, "generator_ascent_grad");
  Tensor g(Shape(d_fake.shape()));
  double n = static_cast<double>(d_fake.size());
  for (Eigen::Index i = 0; i < d_fake.size(); ++i)
    g[i] = inside_clamp(d_fake[i], clamp) ? -0.5 / (n * d_fake[i]) : 0.0;
  return g;
}

namespace {

StepReport step_impl(GanPair& pair, const Tensor& real01, const std::vector<int>* labels,
                     std::optional<int> class_id, Rng& rng) {
  check_nonempty(real01, "train_step");
  Eigen::Index n = real01.dim(0);
  double clamp = pair.prob_clamp;
  Tensor real(Shape(real01.shape()), real01.data() * 2.0 - 1.0);

  auto latent_batch = [&]() {
    return labels ? sample_latent_labeled(pair.latent, pair.label, *labels, rng)
                  : sample_latent(pair.latent, pair.label, class_id, n, rng);
  };

  // Discriminator update. The fake batch comes from a train-mode generator
  // forward whose trace is discarded: no gradient reaches theta_G here.
  Tensor z1 = latent_batch();
  Tensor fake = forward(pair.generator, z1, Mode::train, rng).first;
  auto [p_real, tr_real] = forward(pair.discriminator, real, Mode::train, rng);
  auto [p_fake, tr_fake] = forward(pair.discriminator, fake, Mode::train, rng);
  double j_d = discriminator_loss(p_real, p_fake, clamp);
  Gradients g_real = backward(pair.discriminator, tr_real, discriminator_loss_grad_real(p_real, clamp));
  Gradients g_fake = backward(pair.discriminator, tr_fake, discriminator_loss_grad_fake(p_fake, clamp));
  Eigen::VectorXd d_grad = g_real.params + g_fake.params;
  adam_step(pair.opt_d, pair.discriminator.params(), d_grad);

  // Generator update through the discriminator; theta_D receives no update.
  Tensor z2 = latent_batch();
  auto [fake2, tr_gen] = forward(pair.generator, z2, Mode::train, rng);
  auto [p_fake2, tr_disc] = forward(pair.discriminator, fake2, Mode::train, rng);
  double j_g = generator_loss(p_fake2, clamp);
  Gradients g_disc = backward(pair.discriminator, tr_disc, generator_ascent_grad(p_fake2, clamp));
  Gradients g_gen = backward(pair.generator, tr_gen, g_disc.input);
  adam_step(pair.opt_g, pair.generator.params(), g_gen.params);

  pair.steps += 1;
  StepReport report;
  report.j_d = j_d;
  report.j_g = j_g;
  report.d_real_mean = p_real.data().mean();
  report.d_fake_mean = p_fake.data().mean();
  return report;
}

}  // namespace

StepReport train_step(GanPair& pair, const Tensor& real_batch, std::optional<int> class_id, Rng& rng) {
  return step_impl(pair, real_batch, nullptr, class_id, rng);
}

StepReport train_step_labeled(GanPair& pair, const Tensor& real_batch, const std::vector<int>& labels,
                              Rng& rng) {
  if (static_cast<Eigen::Index>(labels.size()) != real_batch.dim(0))
    throw std::invalid_argument("train_step: label count does not match batch size");
  return step_impl(pair, real_batch, &labels, std::nullopt, rng);
}

Tensor generate_labeled(const GanPair& pair, const std::vector<int>& labels, Rng& rng) {
  Tensor z = sample_latent_labeled(pair.latent, pair.label, labels, rng);
  Tensor out = infer(pair.generator, z);
  return Tensor(Shape(out.shape()), (out.data() + 1.0) * 0.5);
}

Tensor generate(const GanPair& pair, std::optional<int> class_id, Eigen::Index n, Rng& rng) {
  Tensor z = sample_latent(pair.latent, pair.label, class_id, n, rng);
  Tensor out = infer(pair.generator, z);
  return Tensor(Shape(out.shape()), (out.data() + 1.0) * 0.5);
}

}  // namespace partgan
