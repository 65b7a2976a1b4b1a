#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "snra/error.hpp"

namespace snra {

/// Layer widths of a DBN from the input layer up, e.g. {784, 500, 10}.
/// Consecutive pairs are the RBMs of the stack.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw TopologyError("a topology needs at least two layers");
    for (auto s : sizes_) {
      if (s == 0) throw TopologyError("layer sizes must be positive");
    }
  }

  /// Parses "784x500x10" (an upper-case X is accepted too).
  static Topology parse(std::string_view text) {
    std::vector<std::size_t> sizes;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t next = text.find_first_of("xX", pos);
      if (next == std::string_view::npos) next = text.size();
      const std::string_view field = text.substr(pos, next - pos);
      std::size_t value = 0;
      const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
        throw TopologyError("unparsable topology '" + std::string(text) + "'");
      }
      sizes.push_back(value);
      pos = next + 1;
    }
    return Topology(std::move(sizes));
  }

  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  std::size_t layer_count() const noexcept { return sizes_.size(); }
  std::size_t rbm_count() const noexcept { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  std::pair<std::size_t, std::size_t> rbm(std::size_t l) const { return {sizes_.at(l), sizes_.at(l + 1)}; }
  std::size_t input_width() const { return sizes_.front(); }
  std::size_t output_width() const { return sizes_.back(); }

  /// The RBM with the most synapses; the first one wins a tie.
  std::pair<std::size_t, std::size_t> largest_rbm() const {
    if (sizes_.size() < 2) throw TopologyError("empty topology");
    std::pair<std::size_t, std::size_t> best = rbm(0);
    for (std::size_t l = 1; l < rbm_count(); ++l) {
      const auto r = rbm(l);
      if (r.first * r.second > best.first * best.second) best = r;
    }
    return best;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
      if (k) s += 'x';
      s += std::to_string(sizes_[k]);
    }
    return s;
  }

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::vector<std::size_t> sizes_;
};

}  // namespace snra
