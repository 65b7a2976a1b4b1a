#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "snra/error.hpp"
#include "snra/rng.hpp"

namespace snra {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Probabilistic spin-logic neuron. Its output is 1 with sigmoid probability
/// of the (scaled) summed input current.
class PBit {
 public:
  explicit PBit(double input_scale = 1.0) : input_scale_(input_scale) {
    if (!std::isfinite(input_scale)) throw DomainError("p-bit input scale must be finite");
  }

  double input_scale() const noexcept { return input_scale_; }

  double probability(double net_input) const {
    if (!std::isfinite(net_input)) throw DomainError("p-bit input must be finite");
    return sigmoid(input_scale_ * net_input);
  }

  /// Consumes exactly one uniform draw.
  bool sample(double net_input, RandomStream& rng) const {
    const double p = probability(net_input);
    return rng.uniform() < p;
  }

 private:
  double input_scale_;
};

enum class PulseDirection : std::int8_t { Decrease = -1, None = 0, Increase = 1 };

inline PulseDirection direction_of(int difference) {
  if (difference > 0) return PulseDirection::Increase;
  if (difference < 0) return PulseDirection::Decrease;
  return PulseDirection::None;
}

struct SynapseConfig {
  std::uint16_t levels = 32;   // resistive states per device
  std::uint16_t step = 1;      // index change per write pulse
  double w_min = -1.0;
  double w_max = 1.0;
};

/// Domain-wall synapse devices of one crossbar: an n_v x n_h weight block
/// plus one bias device per visible row and per hidden column. Each device
/// stores a quantization index in [0, levels-1]; write pulses move it by
/// `step` and saturate at the ends.
class SynapseGrid {
 public:
  using Index = std::uint16_t;

  SynapseGrid(std::size_t n_visible, std::size_t n_hidden, SynapseConfig config = {})
      : n_v_(n_visible), n_h_(n_hidden), config_(config) {
    if (config_.levels < 2) throw DomainError("a synapse needs at least two levels");
    if (!(config_.w_max > config_.w_min)) throw DomainError("w_max must exceed w_min");
    if (!std::isfinite(config_.w_min) || !std::isfinite(config_.w_max)) {
      throw DomainError("weight bounds must be finite");
    }
    const Index mid = midpoint();
    states_.assign(n_v_ * n_h_, mid);
    visible_bias_.assign(n_v_, mid);
    hidden_bias_.assign(n_h_, mid);
    rebuild_weight_table();
  }

  std::size_t n_visible() const noexcept { return n_v_; }
  std::size_t n_hidden() const noexcept { return n_h_; }
  const SynapseConfig& config() const noexcept { return config_; }
  Index levels() const noexcept { return config_.levels; }
  Index max_index() const noexcept { return static_cast<Index>(config_.levels - 1); }
  // Lower middle index; maps to exactly zero weight when levels is odd.
  Index midpoint() const noexcept { return static_cast<Index>((config_.levels - 1) / 2); }

  /// One weight quantum; equals the learning rate of a single pulse per step.
  double weight_step() const noexcept { return (config_.w_max - config_.w_min) / (config_.levels - 1); }
  double learning_rate() const noexcept { return weight_step() * config_.step; }

  double weight_of(Index d) const { return weight_table_[check_index(d)]; }

  Index state(std::size_t i, std::size_t j) const {
    check_cell(i, j);
    return states_[i * n_h_ + j];
  }
  void set_state(std::size_t i, std::size_t j, Index d) {
    check_cell(i, j);
    states_[i * n_h_ + j] = check_index(d);
  }
  double weight(std::size_t i, std::size_t j) const { return weight_table_[state(i, j)]; }

  Index visible_bias_state(std::size_t i) const { return visible_bias_[check_row(i)]; }
  Index hidden_bias_state(std::size_t j) const { return hidden_bias_[check_column(j)]; }
  void set_visible_bias_state(std::size_t i, Index d) { visible_bias_[check_row(i)] = check_index(d); }
  void set_hidden_bias_state(std::size_t j, Index d) { hidden_bias_[check_column(j)] = check_index(d); }
  double visible_bias(std::size_t i) const { return weight_table_[visible_bias_state(i)]; }
  double hidden_bias(std::size_t j) const { return weight_table_[hidden_bias_state(j)]; }

  Index apply_pulse(std::size_t i, std::size_t j, PulseDirection dir) {
    check_cell(i, j);
    Index& d = states_[i * n_h_ + j];
    d = pulsed(d, dir);
    return d;
  }
  Index pulse_visible_bias(std::size_t i, PulseDirection dir) {
    Index& d = visible_bias_[check_row(i)];
    d = pulsed(d, dir);
    return d;
  }
  Index pulse_hidden_bias(std::size_t j, PulseDirection dir) {
    Index& d = hidden_bias_[check_column(j)];
    d = pulsed(d, dir);
    return d;
  }

  /// Row-major weight indices.
  const std::vector<Index>& states() const noexcept { return states_; }
  const std::vector<Index>& visible_bias_states() const noexcept { return visible_bias_; }
  const std::vector<Index>& hidden_bias_states() const noexcept { return hidden_bias_; }

  /// Stable 64-bit digest of every device index (FNV-1a over the indices).
  std::uint64_t fingerprint() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](Index d) {
      h ^= d & 0xFFU;
      h *= 0x100000001b3ULL;
      h ^= d >> 8;
      h *= 0x100000001b3ULL;
    };
    for (Index d : states_) mix(d);
    for (Index d : visible_bias_) mix(d);
    for (Index d : hidden_bias_) mix(d);
    return h;
  }

  friend bool operator==(const SynapseGrid& a, const SynapseGrid& b) {
    return a.n_v_ == b.n_v_ && a.n_h_ == b.n_h_ && a.config_.levels == b.config_.levels &&
           a.config_.step == b.config_.step && a.config_.w_min == b.config_.w_min &&
           a.config_.w_max == b.config_.w_max && a.states_ == b.states_ &&
           a.visible_bias_ == b.visible_bias_ && a.hidden_bias_ == b.hidden_bias_;
  }

 private:
  void check_cell(std::size_t i, std::size_t j) const {
    if (i >= n_v_ || j >= n_h_) {
      throw IndexError("synapse cell (" + std::to_string(i) + "," + std::to_string(j) + ") outside " +
                       std::to_string(n_v_) + "x" + std::to_string(n_h_) + " grid");
    }
  }
  std::size_t check_row(std::size_t i) const {
    if (i >= n_v_) throw IndexError("visible bias " + std::to_string(i) + " out of range");
    return i;
  }
  std::size_t check_column(std::size_t j) const {
    if (j >= n_h_) throw IndexError("hidden bias " + std::to_string(j) + " out of range");
    return j;
  }
  Index check_index(Index d) const {
    if (d > max_index()) throw IndexError("quantization index " + std::to_string(d) + " out of range");
    return d;
  }
  Index pulsed(Index d, PulseDirection dir) const {
    const int next = int{d} + static_cast<int>(dir) * int{config_.step};
    if (next < 0) return 0;
    if (next > int{max_index()}) return max_index();
    return static_cast<Index>(next);
  }
  void rebuild_weight_table() {
    weight_table_.resize(config_.levels);
    for (std::size_t d = 0; d < config_.levels; ++d) {
      weight_table_[d] = config_.w_min + static_cast<double>(d) * weight_step();
    }
    weight_table_.back() = config_.w_max;
  }

  std::size_t n_v_;
  std::size_t n_h_;
  SynapseConfig config_;
  std::vector<Index> states_;
  std::vector<Index> visible_bias_;
  std::vector<Index> hidden_bias_;
  std::vector<double> weight_table_;
};

}  // namespace snra
