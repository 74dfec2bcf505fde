#include "seedlab/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "seedlab/error.hpp"

namespace seedlab::nn {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) noexcept {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError("truncated checkpoint " + path.string());
  return to_little(v);
}

constexpr char kMagic[4] = {'S', 'L', 'C', 'K'};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, std::span<const Parameter* const> params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const Parameter* p : params) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(p->name.size()));
    os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(p->value.rank()));
    for (auto d : p->value.shape()) put<std::uint64_t>(os, d);
    for (double v : p->value.values()) put<double>(os, v);
  }
  if (!os) throw IoError("failed writing checkpoint " + path.string());
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not a seedlab checkpoint: " + path.string());
  const auto version = get<std::uint32_t>(is, path);
  if (version != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto count = get<std::uint32_t>(is, path);
  std::vector<NamedTensor> out;
  out.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    NamedTensor t;
    const auto len = get<std::uint32_t>(is, path);
    t.name.resize(len);
    if (!is.read(t.name.data(), len)) throw IoError("truncated checkpoint " + path.string());
    const auto rank = get<std::uint32_t>(is, path);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(get<std::uint64_t>(is, path));
    t.value = Tensor(shape);
    for (auto& v : t.value.values()) v = get<double>(is, path);
    out.push_back(std::move(t));
  }
  return out;
}

void load_checkpoint_into(const std::vector<NamedTensor>& tensors,
                          std::span<Parameter* const> params) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t.value;
  for (Parameter* p : params) {
    const auto it = by_name.find(p->name);
    if (it == by_name.end()) throw InvalidInput("checkpoint lacks parameter " + p->name);
    if (it->second->shape() != p->value.shape())
      throw InvalidInput("checkpoint shape mismatch for " + p->name);
    p->value = *it->second;
  }
}

}  // namespace seedlab::nn
