#pragma once

#include "partgan/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace partgan {

// Immutable after construction; safely shareable read-only across workers.
struct Dataset {
  Tensor images;            // [m, C, H, W], values in [0, 1]
  std::vector<int> labels;  // in [0, k)
  int k = 0;

  Eigen::Index count() const { return images.dim(0); }
  Eigen::Index channels() const { return images.dim(1); }
  Eigen::Index height() const { return images.dim(2); }
  Eigen::Index width() const { return images.dim(3); }
  Shape sample_shape() const { return {channels(), height(), width()}; }

  Tensor gather(const std::vector<Eigen::Index>& indices) const;
  std::vector<int> gather_labels(const std::vector<Eigen::Index>& indices) const;
};

void validate_dataset(const Dataset& ds);

enum class SyntheticKind { gaussian_blobs_1d, gaussian_blobs_2d, shape_images };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::shape_images;
  int k = 4;
  Eigen::Index per_class_n = 128;
  std::uint64_t seed = 1;

  // Blob kinds: per-class cluster means in an unbounded coordinate space
  // (dim 1 or 2); empty means an even spread over [-1, 1] (1d) or the unit
  // circle (2d). Samples are mapped into [0,1] affinely with a 5-sigma
  // margin around the mean range, so clamping is negligible.
  std::vector<std::vector<double>> means;
  double stddev = 0.05;

  Eigen::Index image_size = 16;  // shape_images
};

Dataset make_synthetic(const SyntheticSpec& spec);

// The affine map used by the blob kinds: pixel = (x - lo) / (hi - lo).
struct BlobMapping {
  double lo = 0;
  double hi = 1;
};
BlobMapping blob_mapping(const SyntheticSpec& spec);
std::vector<std::vector<double>> default_blob_means(const SyntheticSpec& spec);

// IDX (big-endian magic / dims, unsigned byte payload). Pixels scaled by
// 1/255; pad_to_32 zero-pads smaller images to 32x32, centered.
Dataset read_idx(const std::string& images_path, const std::string& labels_path, bool pad_to_32 = false);
void write_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path);

// CIFAR binary: 3073-byte records, label byte + three 1024-byte planes.
Dataset read_cifar_binary(const std::vector<std::string>& paths);
void write_cifar_binary(const Dataset& ds, const std::string& path);

}  // namespace partgan
