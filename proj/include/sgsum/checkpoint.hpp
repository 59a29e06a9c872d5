#pragma once

// Binary checkpoint layout (all integers u32 little-endian):
//
//   "SGS1" | version | entry count |
//   per entry: name length, name bytes (UTF-8), rank, dims..., float64 LE payload
//
// String metadata travels as rank-1 entries named "__meta__/<key>" whose
// payload holds one byte value per element.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sgsum/error.hpp"
#include "sgsum/params.hpp"
#include "sgsum/tensor.hpp"

namespace sgsum {

inline constexpr char kCheckpointMagic[4] = {'S', 'G', 'S', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::string_view kMetaPrefix = "__meta__/";

struct Checkpoint {
  std::map<std::string, Tensor> tensors;
  std::map<std::string, std::string> metadata;
};

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

inline void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

inline void put_f64(std::string& out, double v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n, std::string_view what) {
    SGSUM_CHECK(pos_ + n <= bytes_.size(), "checkpoint truncated while reading ", what,
                " (need ", n, " bytes at offset ", pos_, ", file has ", bytes_.size(), ")");
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t u32(std::string_view what) {
    std::uint32_t v;
    std::memcpy(&v, take(4, what).data(), 4);
    return v;
  }
  double f64(std::string_view what) {
    double v;
    std::memcpy(&v, take(8, what).data(), 8);
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline void write_entry(std::string& out, const std::string& name, const Tensor& t) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out += name;
  put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
  for (double v : t.data()) put_f64(out, v);
}

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kCheckpointMagic, 4);
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size() + ckpt.metadata.size()));
  for (const auto& [key, text] : ckpt.metadata) {
    std::vector<double> bytes;
    bytes.reserve(text.size());
    for (unsigned char c : text) bytes.push_back(static_cast<double>(c));
    detail::write_entry(out, std::string(kMetaPrefix) + key, Tensor({text.size()}, std::move(bytes)));
  }
  for (const auto& [name, t] : ckpt.tensors) {
    SGSUM_CHECK(!name.starts_with(kMetaPrefix), "tensor name uses reserved prefix: ", name);
    detail::write_entry(out, name, t);
  }
  return out;
}

inline Checkpoint deserialize_checkpoint(std::string_view bytes) {
  detail::Reader in(bytes);
  const auto magic = in.take(4, "magic");
  SGSUM_CHECK(magic == std::string_view(kCheckpointMagic, 4),
              "not a checkpoint file (bad magic bytes)");
  const std::uint32_t version = in.u32("version");
  SGSUM_CHECK(version == kCheckpointVersion, "incompatible checkpoint version ", version,
              " (this build reads version ", kCheckpointVersion, ")");
  const std::uint32_t count = in.u32("entry count");
  Checkpoint ckpt;
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::uint32_t name_len = in.u32("name length");
    std::string name(in.take(name_len, "entry name"));
    const std::uint32_t rank = in.u32("rank");
    std::vector<std::size_t> shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(in.u32("dimension"));
    const std::size_t n = Tensor::element_count(shape);
    SGSUM_CHECK(n <= in.remaining() / 8, "checkpoint truncated in payload of '", name, "'");
    std::vector<double> data;
    data.reserve(n);
    for (std::size_t i = 0; i < n; ++i) data.push_back(in.f64("payload"));
    if (name.starts_with(kMetaPrefix)) {
      std::string text;
      text.reserve(n);
      for (double v : data) {
        SGSUM_CHECK(v >= 0.0 && v <= 255.0 && v == static_cast<double>(static_cast<int>(v)),
                    "corrupt metadata entry ", name);
        text.push_back(static_cast<char>(static_cast<unsigned char>(v)));
      }
      ckpt.metadata.emplace(name.substr(kMetaPrefix.size()), std::move(text));
    } else {
      ckpt.tensors.emplace(std::move(name), Tensor(std::move(shape), std::move(data)));
    }
  }
  SGSUM_CHECK(in.done(), "checkpoint has trailing bytes after ", count, " entries");
  return ckpt;
}

// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    SGSUM_CHECK(out.good(), "cannot open ", tmp.string(), " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out.good()) {
      out.close();
      std::filesystem::remove(tmp);
      detail::fail("write failed for ", tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  SGSUM_CHECK(in.good(), "cannot open ", path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path));
}

inline Checkpoint make_checkpoint(const ParamStore& store,
                                  std::map<std::string, std::string> metadata = {}) {
  return Checkpoint{store.params(), std::move(metadata)};
}

}  // namespace sgsum
