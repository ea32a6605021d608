#pragma once

// Plain-text checkpoint files. Weights are written as hexadecimal floats, so a
// save/load round trip is bit-exact and two identical runs give identical bytes.

#include <string>
#include <string_view>

#include "tspg/training.hpp"

namespace tspg {

std::string serialize_checkpoint(const Checkpoint& ck);
// Throws std::runtime_error with a line number on malformed input.
Checkpoint deserialize_checkpoint(std::string_view text);

// Throws std::runtime_error on I/O failure.
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tspg
