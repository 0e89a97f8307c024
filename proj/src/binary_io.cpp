#include "topiclens/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "topiclens/error.hpp"

namespace topiclens {

namespace {

constexpr char kMagic[4] = {'T', 'L', 'A', 'T'};

template <typename U>
void put_le(std::vector<std::uint8_t>& buf, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

BinaryWriter::BinaryWriter(ArtifactKind kind) {
  buf_.insert(buf_.end(), std::begin(kMagic), std::end(kMagic));
  u32(kArtifactVersion);
  u32(static_cast<std::uint32_t>(kind));
}

void BinaryWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(buf_, v); }
void BinaryWriter::f32(float v) { put_le(buf_, std::bit_cast<std::uint32_t>(v)); }
void BinaryWriter::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void BinaryWriter::save(const std::filesystem::path& path) const { write_file_bytes(path, buf_); }

BinaryReader::BinaryReader(std::vector<std::uint8_t> data, ArtifactKind expected, std::string source)
    : data_(std::move(data)), source_(std::move(source)) {
  need(12);
  if (std::memcmp(data_.data(), kMagic, 4) != 0) fail(ErrorKind::ArtifactFormat, source_ + ": bad magic");
  pos_ = 4;
  const auto version = u32();
  if (version != kArtifactVersion) {
    fail(ErrorKind::ArtifactFormat, source_ + ": unsupported format version " + std::to_string(version));
  }
  const auto kind = u32();
  if (kind != static_cast<std::uint32_t>(expected)) {
    fail(ErrorKind::ArtifactFormat, source_ + ": artifact kind " + std::to_string(kind) + ", expected " +
                                        std::to_string(static_cast<std::uint32_t>(expected)));
  }
}

BinaryReader BinaryReader::open(const std::filesystem::path& path, ArtifactKind expected) {
  return BinaryReader(read_file_bytes(path), expected, path.string());
}

void BinaryReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) fail(ErrorKind::ArtifactFormat, source_ + ": truncated artifact");
}

std::uint32_t BinaryReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

float BinaryReader::f32() { return std::bit_cast<float>(u32()); }
double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
  const auto n = u32();
  need(n);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

void BinaryReader::seek(std::size_t pos) {
  if (pos > data_.size()) fail(ErrorKind::ArtifactFormat, source_ + ": seek past end");
  pos_ = pos;
}

void BinaryReader::expect_end() const {
  if (!at_end()) fail(ErrorKind::ArtifactFormat, source_ + ": trailing bytes");
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoError, "short write to " + path.string());
}

}  // namespace topiclens
