#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace alaam {

// Seedable generator with a fixed, documented output mapping so results are
// bit-reproducible across standard libraries (std distributions are not).
//
// Stream rule: Rng(seed, stream) seeds std::mt19937_64 with
// splitmix64(seed ^ stream). Independent runs use their run index as stream.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64+splitmix64(seed^stream)/v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, n) by rejection; n > 0.
  std::uint64_t uniformIndex(std::uint64_t n);
  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Standard normal, Marsaglia polar method.
  double normal();

  bool operator==(const Rng& other) const { return engine_ == other.engine_ && spare_ == other.spare_ && hasSpare_ == other.hasSpare_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace alaam
