#pragma once

#include <string>

#include "nn/unet.hpp"

namespace echofilter::nn {

// Single-file checkpoint: "ECKPT 1" magic, a JSON manifest line (config plus
// ordered tensor paths and sizes), then the flat little-endian float payload.
void save_checkpoint(UNet& net, const std::string& path);
ModelConfig peek_checkpoint_config(const std::string& path);
UNet load_checkpoint(const std::string& path);

}  // namespace echofilter::nn
