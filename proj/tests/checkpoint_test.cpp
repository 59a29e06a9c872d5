#include "sgsum/checkpoint.hpp"

#include <cstring>
#include <filesystem>

#include "gtest/gtest.h"
#include "sgsum/params.hpp"

namespace sgsum {
namespace {

Checkpoint sample() {
  Checkpoint c;
  c.tensors["a.weight"] = Tensor({2, 3}, {1.5, -0.0, 3.25e-300, 1e300, -7.0, 0.1});
  c.tensors["b"] = Tensor({4}, {1, 2, 3, 4});
  c.tensors["scalar"] = Tensor::scalar(0.2);
  c.metadata["config"] = "{\"hidden\":8}";
  c.metadata["vocab"] = "<unk>\nhà\nnội";
  return c;
}

std::uint32_t read_u32(const std::string& b, std::size_t off) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(b[off + k]);
  return v;
}

TEST(Checkpoint, HeaderLayout) {
  const std::string bytes = serialize_checkpoint(sample());
  ASSERT_GE(bytes.size(), 12u);
  EXPECT_EQ(bytes.substr(0, 4), "SGS1");
  EXPECT_EQ(read_u32(bytes, 4), kCheckpointVersion);
  EXPECT_EQ(read_u32(bytes, 8), 5u);  // three tensors plus two metadata entries
}

TEST(Checkpoint, EntryLayoutIsLittleEndianFloat64) {
  Checkpoint c;
  c.tensors["x"] = Tensor({1, 2}, {1.0, -2.5});
  const std::string bytes = serialize_checkpoint(c);
  std::size_t off = 12;
  EXPECT_EQ(read_u32(bytes, off), 1u);
  EXPECT_EQ(bytes.substr(off + 4, 1), "x");
  off += 5;
  EXPECT_EQ(read_u32(bytes, off), 2u);      // rank
  EXPECT_EQ(read_u32(bytes, off + 4), 1u);  // dims
  EXPECT_EQ(read_u32(bytes, off + 8), 2u);
  off += 12;
  double v = 0.0;
  std::uint64_t raw = 0;
  for (int k = 7; k >= 0; --k) raw = (raw << 8) | static_cast<unsigned char>(bytes[off + 8 + k]);
  std::memcpy(&v, &raw, 8);
  EXPECT_EQ(v, -2.5);
  EXPECT_EQ(bytes.size(), off + 16);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const Checkpoint c = sample();
  const std::string bytes = serialize_checkpoint(c);
  const Checkpoint back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back.tensors, c.tensors);
  EXPECT_EQ(back.metadata, c.metadata);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
  EXPECT_TRUE(std::signbit(back.tensors.at("a.weight")[1]));
}

TEST(Checkpoint, FileSaveLoadSaveIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "sgsum_ckpt_test";
  std::filesystem::create_directories(dir);
  save_checkpoint(dir / "one.sgs", sample());
  save_checkpoint(dir / "two.sgs", load_checkpoint(dir / "one.sgs"));
  EXPECT_EQ(read_file(dir / "one.sgs"), read_file(dir / "two.sgs"));
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, TruncationIsRejectedAtEveryLength) {
  const std::string bytes = serialize_checkpoint(sample());
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    EXPECT_THROW(deserialize_checkpoint(std::string_view(bytes).substr(0, len)), Error) << len;
  }
}

TEST(Checkpoint, ForeignMagicVersionAndTrailingBytes) {
  std::string bytes = serialize_checkpoint(sample());
  std::string foreign = bytes;
  foreign[0] = 'P';
  EXPECT_THROW(deserialize_checkpoint(foreign), Error);
  std::string future = bytes;
  future[4] = 2;
  try {
    deserialize_checkpoint(future);
    FAIL() << "version 2 accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  EXPECT_THROW(deserialize_checkpoint(bytes + "x"), Error);
}

TEST(Checkpoint, MakeCheckpointCopiesStore) {
  ParamStore store;
  store.add("w", Tensor::row({1.0, 2.0}));
  const Checkpoint c = make_checkpoint(store, {{"k", "v"}});
  EXPECT_EQ(c.tensors.at("w"), store.get("w"));
  EXPECT_EQ(c.metadata.at("k"), "v");
}

TEST(Checkpoint, MissingFileIsAnError) {
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/model.sgs"), Error);
}

}  // namespace
}  // namespace sgsum
