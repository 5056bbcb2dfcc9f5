#include "ianmt/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "ianmt/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are raw little-endian doubles");

namespace ianmt {

namespace {

constexpr char kMagic[6] = {'I', 'A', 'N', 'M', 'T', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw DataError("checkpoint '" + path + "': truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write checkpoint '" + path + "'");

  os.write(kMagic, sizeof(kMagic));

  std::string meta_block;
  for (const auto& [k, v] : metadata) meta_block += k + "=" + v + "\n";
  write_u32(os, static_cast<std::uint32_t>(meta_block.size()));
  os.write(meta_block.data(), static_cast<std::streamsize>(meta_block.size()));

  for (const Tensor& t : tensors) {
    const std::string& name = t.name();
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, static_cast<std::uint32_t>(t.shape().size()));
    for (int d : t.shape()) write_u32(os, static_cast<std::uint32_t>(d));
    os.write(reinterpret_cast<const char*>(t.data().data()),
             static_cast<std::streamsize>(t.data().size() * sizeof(double)));
  }
  if (!os) throw DataError("failed writing checkpoint '" + path + "'");
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint '" + path + "'");

  char magic[6];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError("'" + path + "' is not a checkpoint (bad magic)");

  Checkpoint ckpt;
  std::uint32_t meta_len = read_u32(is, path);
  std::string meta_block(meta_len, '\0');
  is.read(meta_block.data(), meta_len);
  if (!is) throw DataError("checkpoint '" + path + "': truncated metadata");
  size_t pos = 0;
  while (pos < meta_block.size()) {
    size_t nl = meta_block.find('\n', pos);
    if (nl == std::string::npos) nl = meta_block.size();
    std::string line = meta_block.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("checkpoint '" + path + "': malformed metadata line '" + line + "'");
    ckpt.metadata.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }

  while (true) {
    int peeked = is.peek();
    if (peeked == std::char_traits<char>::eof()) break;
    std::uint32_t name_len = read_u32(is, path);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    std::uint32_t rank = read_u32(is, path);
    Shape shape;
    size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      std::uint32_t d = read_u32(is, path);
      shape.push_back(static_cast<int>(d));
      count *= d;
    }
    std::vector<double> data(count);
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw DataError("checkpoint '" + path + "': truncated tensor '" + name + "'");
    Tensor t(std::move(shape), std::move(data));
    t.set_name(name);
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const Tensor& t : tensors)
    if (t.name() == name) return &t;
  return nullptr;
}

std::string Checkpoint::meta(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return fallback;
}

void Checkpoint::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata)
    if (k == key) {
      v = value;
      return;
    }
  metadata.emplace_back(key, value);
}

}  // namespace ianmt
