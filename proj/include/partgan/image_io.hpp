#pragma once

#include "partgan/tensor.hpp"

#include <string>

namespace partgan {

// Tiles [n, C, H, W] samples row-major into one 8-bit binary PGM (C = 1) or
// PPM (C = 3) image; pixel bytes are round(255 * v) with v clamped to [0,1].
// Grid is ceil(sqrt(n)) columns; unused cells are black.
void write_image_grid(const Tensor& images, const std::string& path);

}  // namespace partgan
