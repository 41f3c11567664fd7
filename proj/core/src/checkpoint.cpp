#include "graphmax/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "binio.hpp"

namespace graphmax {

namespace {
constexpr char kMagic[8] = {'G', 'M', 'X', 'P', 'A', 'R', 'M', '\0'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_param_store(const ParamStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_param_store: cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  binio::write_u32(out, kVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(store.size()));
  for (int i = 0; i < store.size(); ++i) {
    binio::write_string(out, store.names[static_cast<std::size_t>(i)]);
    binio::write_matrix(out, store.values[static_cast<std::size_t>(i)]);
  }
  out.flush();
  if (!out) throw std::runtime_error("save_param_store: write failed for " + path);
}

ParamStore load_param_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_param_store: cannot open " + path);
  char magic[8] = {};
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("load_param_store: " + path + " is not a parameter file");
  }
  std::uint32_t version = binio::read_u32(in, "parameter file version");
  if (version != kVersion) {
    throw std::runtime_error("load_param_store: unsupported version " + std::to_string(version) +
                             " in " + path);
  }
  std::uint32_t count = binio::read_u32(in, "parameter count");
  ParamStore store;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = binio::read_string(in, "parameter name");
    Matrix value = binio::read_matrix(in, "parameter tensor");
    if (value.empty()) {
      throw std::runtime_error("load_param_store: empty tensor '" + name + "' in " + path);
    }
    require_finite(value, "load_param_store");
    store.add(std::move(name), std::move(value));
  }
  return store;
}

}  // namespace graphmax
