#pragma once

#include <string>

#include "graphmax/params.hpp"

namespace graphmax {

// Versioned binary parameter file: every named tensor of a store, in order.
// Loading rejects unknown versions and truncated or corrupt files.
void save_param_store(const ParamStore& store, const std::string& path);
ParamStore load_param_store(const std::string& path);

}  // namespace graphmax
