#include "partgan/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace partgan {

void write_image_grid(const Tensor& images, const std::string& path) {
  if (images.rank() != 4) throw std::invalid_argument("write_image_grid expects [n, C, H, W]");
  Eigen::Index n = images.dim(0), c = images.dim(1), h = images.dim(2), w = images.dim(3);
  if (c != 1 && c != 3)
    throw std::invalid_argument("write_image_grid supports 1 or 3 channels, got " + std::to_string(c));

  Eigen::Index cols = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(n))));
  Eigen::Index rows = (n + cols - 1) / cols;
  Eigen::Index gw = cols * w, gh = rows * h;

  std::vector<unsigned char> canvas(static_cast<std::size_t>(gw * gh * c), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index tr = i / cols, tc = i % cols;
    for (Eigen::Index ch = 0; ch < c; ++ch) {
      const double* src = images.data().data() + ((i * c) + ch) * h * w;
      for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x) {
          double v = std::clamp(src[y * w + x], 0.0, 1.0);
          // interleaved channels within each pixel
          canvas[static_cast<std::size_t>((((tr * h + y) * gw) + (tc * w + x)) * c + ch)] =
              static_cast<unsigned char>(std::lround(255.0 * v));
        }
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << (c == 1 ? "P5" : "P6") << "\n" << gw << " " << gh << "\n255\n";
  out.write(reinterpret_cast<const char*>(canvas.data()), static_cast<std::streamsize>(canvas.size()));
  if (!out) throw std::runtime_error("short write on " + path);
}

}  // namespace partgan
