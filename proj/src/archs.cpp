#include "partgan/archs.hpp"

namespace partgan {

std::vector<LayerSpec> generator_dc32(Eigen::Index input_dim, Eigen::Index out_channels,
                                      const BnOptions& bn) {
  return {
      Dense{input_dim, 8192},
      ReLU{},
      Reshape{{128, 8, 8}},
      BatchNorm{128, bn.eps_input, bn.momentum},
      Upsample{2},
      Conv2d{128, 128, 3, 1, 1},
      BatchNorm{128, bn.eps_hidden, bn.momentum},
      LeakyReLU{0.2},
      Upsample{2},
      Conv2d{128, 64, 3, 1, 1},
      BatchNorm{64, bn.eps_hidden, bn.momentum},
      LeakyReLU{0.2},
      Conv2d{64, out_channels, 3, 1, 1},
      Tanh{},
  };
}

std::vector<LayerSpec> discriminator_dc32(Eigen::Index in_channels, bool sigmoid_output,
                                          const BnOptions& bn) {
  std::vector<LayerSpec> layers = {
      Conv2d{in_channels, 16, 3, 2, 1},
      LeakyReLU{0.2},
      Dropout{0.25},
      Conv2d{16, 32, 3, 2, 1},
      LeakyReLU{0.2},
      Dropout{0.25},
      BatchNorm{32, bn.eps_hidden, bn.momentum},
      Conv2d{32, 64, 3, 2, 1},
      LeakyReLU{0.2},
      Dropout{0.25},
      BatchNorm{64, bn.eps_hidden, bn.momentum},
      Conv2d{64, 128, 3, 2, 1},
      LeakyReLU{0.2},
      Dropout{0.25},
      BatchNorm{128, bn.eps_hidden, bn.momentum},
      Reshape{{128 * 2 * 2}},
      Dense{128 * 2 * 2, 1},
  };
  if (sigmoid_output) layers.push_back(Sigmoid{});
  return layers;
}

std::vector<LayerSpec> generator_conv16(Eigen::Index input_dim, Eigen::Index out_channels,
                                        const BnOptions& bn) {
  return {
      Dense{input_dim, 32 * 4 * 4},
      ReLU{},
      Reshape{{32, 4, 4}},
      BatchNorm{32, bn.eps_input, bn.momentum},
      Upsample{2},
      Conv2d{32, 16, 3, 1, 1},
      BatchNorm{16, bn.eps_hidden, bn.momentum},
      LeakyReLU{0.2},
      Upsample{2},
      Conv2d{16, 8, 3, 1, 1},
      BatchNorm{8, bn.eps_hidden, bn.momentum},
      LeakyReLU{0.2},
      Conv2d{8, out_channels, 3, 1, 1},
      Tanh{},
  };
}

std::vector<LayerSpec> discriminator_conv16(Eigen::Index in_channels, const BnOptions& bn) {
  return {
      Conv2d{in_channels, 8, 3, 2, 1},
      LeakyReLU{0.2},
      Dropout{0.25},
      Conv2d{8, 16, 3, 2, 1},
      LeakyReLU{0.2},
      Dropout{0.25},
      BatchNorm{16, bn.eps_hidden, bn.momentum},
      Reshape{{16 * 4 * 4}},
      Dense{16 * 4 * 4, 1},
      Sigmoid{},
  };
}

std::vector<LayerSpec> generator_dense(Eigen::Index input_dim, const Shape& sample_shape,
                                       Eigen::Index hidden) {
  Eigen::Index features = shape_size(sample_shape);
  return {
      Dense{input_dim, hidden}, ReLU{}, Dense{hidden, features}, Tanh{}, Reshape{sample_shape},
  };
}

std::vector<LayerSpec> discriminator_dense(const Shape& sample_shape, Eigen::Index hidden) {
  Eigen::Index features = shape_size(sample_shape);
  return {
      Reshape{{features}}, Dense{features, hidden}, LeakyReLU{0.2},
      Dropout{0.25},       Dense{hidden, 1},        Sigmoid{},
  };
}

std::vector<LayerSpec> classifier_dense(const Shape& sample_shape, Eigen::Index hidden, int k) {
  Eigen::Index features = shape_size(sample_shape);
  return {
      Reshape{{features}},
      Dense{features, hidden},
      ReLU{},
      Dense{hidden, k},
  };
}

}  // namespace partgan
