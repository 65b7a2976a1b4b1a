#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace snra {

/// Seeded uniform source. Every stochastic operation in the simulator takes
/// one of these by reference; the draw counter lets tests check how many
/// variates an operation consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1) from the top 53 bits of one engine output, so the
  /// sequence is identical on every standard library.
  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). One draw.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
  }

  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Child seed for a named purpose and index, e.g. derive_seed(seed, "eval", i).
/// Depends only on its arguments, so work split across threads sees the
/// same streams as a sequential run.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ detail::fnv1a(purpose));
  return detail::splitmix64(h ^ index);
}

}  // namespace snra
