#pragma once

#include "partgan/gan.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>

namespace partgan {

nlohmann::json layer_to_json(const LayerSpec& spec);
LayerSpec layer_from_json(const nlohmann::json& j);

// Checkpoint file: 4-byte little-endian header length, JSON header
// (architecture specs, optimizer hyperparameters, step count, blob table),
// then raw little-endian f64 blobs. Round-trips are bitwise exact.
void save_gan_pair(const GanPair& pair, const std::string& path);
GanPair load_gan_pair(const std::string& path);

}  // namespace partgan
