#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snra/error.hpp"

namespace snra {

/// Contents of a binary register. Element k is bit k of the register, so
/// the vector [1,0,1,0] and the register literal 4'b0101 are the same value.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t width) : bits_(width, 0) {}
  BitVector(std::initializer_list<int> elements) {
    bits_.reserve(elements.size());
    for (int e : elements) bits_.push_back(e != 0 ? 1 : 0);
  }

  /// Parses register notation: the leftmost character is the most
  /// significant bit, i.e. element size()-1.
  static BitVector from_register_string(std::string_view text) {
    BitVector out(text.size());
    for (std::size_t k = 0; k < text.size(); ++k) {
      const char c = text[text.size() - 1 - k];
      if (c != '0' && c != '1') {
        throw DomainError("bit string '" + std::string(text) + "' may only contain 0 and 1");
      }
      out.bits_[k] = c == '1' ? 1 : 0;
    }
    return out;
  }

  static BitVector one_hot(std::size_t width, std::size_t hot) {
    if (hot >= width) throw IndexError("one-hot index out of range");
    BitVector out(width);
    out.bits_[hot] = 1;
    return out;
  }

  /// Register notation, most significant bit first.
  std::string to_register_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t k = 0; k < bits_.size(); ++k) {
      if (bits_[k]) s[bits_.size() - 1 - k] = '1';
    }
    return s;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  std::uint8_t operator[](std::size_t k) const noexcept { return bits_[k]; }
  void set(std::size_t k, bool value) { bits_.at(k) = value ? 1 : 0; }
  std::uint8_t at(std::size_t k) const { return bits_.at(k); }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  /// Integer value with element 0 as the least significant bit.
  std::uint64_t to_uint() const {
    if (bits_.size() > 64) throw DimensionError("bit vector wider than 64 bits");
    std::uint64_t x = 0;
    for (std::size_t k = 0; k < bits_.size(); ++k) x |= std::uint64_t{bits_[k]} << k;
    return x;
  }

  static BitVector from_uint(std::uint64_t value, std::size_t width) {
    BitVector out(width);
    for (std::size_t k = 0; k < width && k < 64; ++k) out.bits_[k] = (value >> k) & 1U;
    return out;
  }

  std::span<const std::uint8_t> span() const noexcept { return bits_; }
  auto begin() const noexcept { return bits_.begin(); }
  auto end() const noexcept { return bits_.end(); }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

inline void require_width(const BitVector& v, std::size_t width, const char* what) {
  if (v.size() != width) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(width) + " bits, got " +
                         std::to_string(v.size()));
  }
}

}  // namespace snra
