#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pitchtrack/nn.hpp"

namespace pitchtrack {

// PTNN checkpoint: magic "PTNN", version u16, tensor count u32, then per
// tensor: name length u16, name bytes, rank u8, dims u32 each, and the
// values as little-endian f32.

void save_checkpoint(std::ostream& os, const std::vector<nn::TensorRef>& params);
void save_checkpoint(const std::string& path, const std::vector<nn::TensorRef>& params);

// Fills `params` in place; names, order and dims must match the file.
void load_checkpoint(std::istream& is, const std::vector<nn::TensorRef>& params);
void load_checkpoint(const std::string& path, const std::vector<nn::TensorRef>& params);

}  // namespace pitchtrack
