#pragma once

#include "partgan/layers.hpp"

namespace partgan {

struct BnOptions {
  double eps_input = 1e-5;   // the norm right after the projection
  double eps_hidden = 1e-5;  // remaining norms
  double momentum = 0.1;
};

// Deep convolutional pair for 32x32 images: projection to a 128x8x8 map,
// two x2 upsampling conv blocks, tanh output / four stride-2 conv blocks
// with dropout and batch norm, scalar output.
std::vector<LayerSpec> generator_dc32(Eigen::Index input_dim, Eigen::Index out_channels,
                                      const BnOptions& bn = {});
std::vector<LayerSpec> discriminator_dc32(Eigen::Index in_channels, bool sigmoid_output = true,
                                          const BnOptions& bn = {});

// Reduced convolutional pair for 16x16 desk-scale runs.
std::vector<LayerSpec> generator_conv16(Eigen::Index input_dim, Eigen::Index out_channels,
                                        const BnOptions& bn = {});
std::vector<LayerSpec> discriminator_conv16(Eigen::Index in_channels, const BnOptions& bn = {});

// Dense pair over arbitrary sample shapes (flattens internally).
std::vector<LayerSpec> generator_dense(Eigen::Index input_dim, const Shape& sample_shape,
                                       Eigen::Index hidden = 128);
std::vector<LayerSpec> discriminator_dense(const Shape& sample_shape, Eigen::Index hidden = 128);

// K-way logits head used by the surrogate classifier.
std::vector<LayerSpec> classifier_dense(const Shape& sample_shape, Eigen::Index hidden, int k);

}  // namespace partgan
