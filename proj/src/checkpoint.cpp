#include "tmse/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tmse {

namespace {
constexpr char kMagic[4] = {'T', 'M', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void wr_u32(std::ofstream& f, uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); }
void wr_str(std::ofstream& f, const std::string& s) {
  wr_u32(f, static_cast<uint32_t>(s.size()));
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t rd_u32(std::ifstream& f) {
  uint32_t v = 0;
  f.read(reinterpret_cast<char*>(&v), 4);
  if (!f) throw std::runtime_error("checkpoint: truncated file");
  return v;
}
std::string rd_str(std::ifstream& f) {
  uint32_t n = rd_u32(f);
  std::string s(n, '\0');
  f.read(s.data(), n);
  if (!f) throw std::runtime_error("checkpoint: truncated file");
  return s;
}
}  // namespace

void save_checkpoint(const std::string& path, const std::map<std::string, std::string>& meta,
                     const std::vector<std::pair<std::string, Tensor>>& tensors) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  f.write(kMagic, 4);
  wr_u32(f, kVersion);
  wr_u32(f, static_cast<uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    wr_str(f, k);
    wr_str(f, v);
  }
  wr_u32(f, static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    wr_str(f, name);
    wr_u32(f, static_cast<uint32_t>(t.ndim()));
    for (int i = 0; i < t.ndim(); ++i) wr_u32(f, static_cast<uint32_t>(t.dim(i)));
    f.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!f) throw std::runtime_error("checkpoint: write failed: " + path);
}

void load_checkpoint(const std::string& path, std::map<std::string, std::string>& meta,
                     std::vector<std::pair<std::string, Tensor>>& tensors) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic: " + path);
  const uint32_t version = rd_u32(f);
  if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version");

  meta.clear();
  tensors.clear();
  const uint32_t n_meta = rd_u32(f);
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = rd_str(f);
    meta[k] = rd_str(f);
  }
  const uint32_t n_tensors = rd_u32(f);
  for (uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = rd_str(f);
    const uint32_t ndim = rd_u32(f);
    std::vector<int> shape(ndim);
    for (auto& d : shape) d = static_cast<int>(rd_u32(f));
    Tensor t(shape);
    f.read(reinterpret_cast<char*>(t.data()),
           static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!f) throw std::runtime_error("checkpoint: truncated tensor data");
    tensors.emplace_back(std::move(name), std::move(t));
  }
}

}  // namespace tmse
