#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace topiclens {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = kFnvOffset) noexcept {
  std::uint64_t h = basis;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

/// Independent per-stage seed: the same (base, label) always yields the same value.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label) noexcept {
  return splitmix64(fnv1a64(label, splitmix64(base)));
}

/// Incremental FNV-1a accumulator used for artifact hashes and index fingerprints.
class Hasher {
 public:
  Hasher& bytes(std::span<const std::uint8_t> data) noexcept {
    for (auto b : data) {
      state_ ^= b;
      state_ *= kFnvPrime;
    }
    return *this;
  }
  Hasher& text(std::string_view s) noexcept {
    state_ = fnv1a64(s, state_);
    // length terminator keeps ("ab","c") distinct from ("a","bc")
    return u64(s.size());
  }
  Hasher& u64(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (v >> (8 * i)) & 0xffU;
      state_ *= kFnvPrime;
    }
    return *this;
  }
  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = kFnvOffset;
};

}  // namespace topiclens
