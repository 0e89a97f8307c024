#pragma once

// Little-endian binary artifact container shared by every fitted model and the index.
// Layout: "TLAT" | u32 format version | u32 artifact kind | payload.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace topiclens {

constexpr std::uint32_t kArtifactVersion = 1;

enum class ArtifactKind : std::uint32_t {
  TfIdf = 1,
  Lsa = 2,
  Lda = 3,
  Alignment = 4,
  IndexVectors = 5,
};

class BinaryWriter {
 public:
  explicit BinaryWriter(ArtifactKind kind);

  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void str(std::string_view s);

  const std::vector<std::uint8_t>& buffer() const noexcept { return buf_; }
  std::size_t size() const noexcept { return buf_.size(); }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::uint8_t> buf_;
};

class BinaryReader {
 public:
  BinaryReader(std::vector<std::uint8_t> data, ArtifactKind expected, std::string source);
  static BinaryReader open(const std::filesystem::path& path, ArtifactKind expected);

  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::string str();

  std::size_t position() const noexcept { return pos_; }
  void seek(std::size_t pos);
  bool at_end() const noexcept { return pos_ == data_.size(); }
  void expect_end() const;

 private:
  void need(std::size_t n) const;

  std::vector<std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string source_;
};

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace topiclens
