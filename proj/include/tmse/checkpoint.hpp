#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tmse/tensor.hpp"

namespace tmse {

// Versioned binary checkpoint: string metadata plus named tensors with
// shapes, raw little-endian doubles. Round-trips bitwise.
void save_checkpoint(const std::string& path, const std::map<std::string, std::string>& meta,
                     const std::vector<std::pair<std::string, Tensor>>& tensors);

void load_checkpoint(const std::string& path, std::map<std::string, std::string>& meta,
                     std::vector<std::pair<std::string, Tensor>>& tensors);

}  // namespace tmse
