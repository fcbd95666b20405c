#include "pitchtrack/checkpoint.hpp"

#include <fstream>

#include "pitchtrack/binio.hpp"

namespace pitchtrack {

namespace {
constexpr char kMagic[4] = {'P', 'T', 'N', 'N'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void save_checkpoint(std::ostream& os, const std::vector<nn::TensorRef>& params) {
  binio::write_magic(os, kMagic);
  binio::write_le<std::uint16_t>(os, kVersion);
  binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    binio::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(p.name.size()));
    os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    binio::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(p.dims.size()));
    for (auto d : p.dims) binio::write_le<std::uint32_t>(os, d);
    for (Eigen::Index i = 0; i < p.size; ++i)
      binio::write_le<float>(os, static_cast<float>(p.data[i]));
  }
  if (!os) throw IoError("PTNN write failed");
}

void save_checkpoint(const std::string& path, const std::vector<nn::TensorRef>& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  save_checkpoint(os, params);
}

void load_checkpoint(std::istream& is, const std::vector<nn::TensorRef>& params) {
  binio::expect_magic(is, kMagic, "PTNN");
  const auto version = binio::read_le<std::uint16_t>(is);
  if (version != kVersion) throw IoError("unsupported PTNN version");
  const auto count = binio::read_le<std::uint32_t>(is);
  if (count != params.size())
    throw ShapeMismatch("checkpoint holds " + std::to_string(count) +
                        " tensors, model expects " + std::to_string(params.size()));
  for (const auto& p : params) {
    const auto name_len = binio::read_le<std::uint16_t>(is);
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw IoError("truncated PTNN");
    if (name != p.name)
      throw ShapeMismatch("checkpoint tensor '" + name + "' where '" + p.name +
                          "' expected");
    const auto rank = binio::read_le<std::uint8_t>(is);
    if (rank != p.dims.size())
      throw ShapeMismatch("rank mismatch for " + p.name);
    Eigen::Index n = 1;
    for (int d = 0; d < rank; ++d) {
      const auto dim = binio::read_le<std::uint32_t>(is);
      if (dim != p.dims[d]) throw ShapeMismatch("dim mismatch for " + p.name);
      n *= dim;
    }
    if (n != p.size) throw ShapeMismatch("size mismatch for " + p.name);
    for (Eigen::Index i = 0; i < p.size; ++i)
      p.data[i] = static_cast<double>(binio::read_le<float>(is));
  }
}

void load_checkpoint(const std::string& path, const std::vector<nn::TensorRef>& params) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  load_checkpoint(is, params);
}

}  // namespace pitchtrack
