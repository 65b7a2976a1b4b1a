#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "snra/bits.hpp"
#include "snra/device.hpp"
#include "snra/error.hpp"
#include "snra/rng.hpp"

namespace snra {

enum class Phase { Read, Write };

/// Crossbar control lines for one clock.
///
/// Read frames drive RWL high with every WWL low; BL and SL are
/// high-impedance, stored here as all-zero vectors. Write frames drive RWL
/// low and select exactly one hidden column through WWL; each row then gets
/// an increase pulse (BL=1, SL=0), a decrease pulse (BL=0, SL=1) or nothing.
struct SignalFrame {
  Phase phase = Phase::Read;
  BitVector wwl;  // one bit per hidden column
  bool rwl = true;
  BitVector bl;  // one bit per visible row
  BitVector sl;

  static SignalFrame read(std::size_t n_visible, std::size_t n_hidden) {
    return SignalFrame{Phase::Read, BitVector(n_hidden), true, BitVector(n_visible), BitVector(n_visible)};
  }

  static SignalFrame write(std::size_t column, std::size_t n_hidden, BitVector bl, BitVector sl) {
    if (bl.size() != sl.size()) throw DimensionError("BL and SL widths differ");
    return SignalFrame{Phase::Write, BitVector::one_hot(n_hidden, column), false, std::move(bl), std::move(sl)};
  }

  /// Index of the selected write column. Throws unless exactly one WWL bit is set.
  std::size_t selected_column() const {
    if (wwl.count() != 1) {
      throw ProtocolError("write frame must select exactly one column, " + std::to_string(wwl.count()) +
                          " WWL bits set");
    }
    for (std::size_t j = 0; j < wwl.size(); ++j) {
      if (wwl[j]) return j;
    }
    return wwl.size();
  }

  friend bool operator==(const SignalFrame&, const SignalFrame&) = default;
};

/// Configuration of the devices in one RBM crossbar.
struct ArrayConfig {
  SynapseConfig synapse{};
  double input_scale = 1.0;
  bool use_biases = true;
};

/// An RBM realized as a crossbar of domain-wall synapses read out by p-bit
/// neurons. Sampling draws one uniform variate per output neuron in
/// ascending index order.
class RbmArray {
 public:
  RbmArray(std::size_t n_visible, std::size_t n_hidden, ArrayConfig config = {})
      : grid_(n_visible, n_hidden, config.synapse), neuron_(config.input_scale), use_biases_(config.use_biases) {}

  std::size_t n_visible() const noexcept { return grid_.n_visible(); }
  std::size_t n_hidden() const noexcept { return grid_.n_hidden(); }
  bool biases_enabled() const noexcept { return use_biases_; }
  const PBit& neuron() const noexcept { return neuron_; }
  SynapseGrid& grid() noexcept { return grid_; }
  const SynapseGrid& grid() const noexcept { return grid_; }

  ArrayConfig config() const { return ArrayConfig{grid_.config(), neuron_.input_scale(), use_biases_}; }

  /// Summed input of hidden unit j for visible state v (bias included when enabled).
  double hidden_net_input(const BitVector& v, std::size_t j) const {
    double net = use_biases_ ? grid_.hidden_bias(j) : 0.0;
    for (std::size_t i = 0; i < n_visible(); ++i) {
      if (v[i]) net += grid_.weight(i, j);
    }
    return net;
  }

  double visible_net_input(const BitVector& h, std::size_t i) const {
    double net = use_biases_ ? grid_.visible_bias(i) : 0.0;
    for (std::size_t j = 0; j < n_hidden(); ++j) {
      if (h[j]) net += grid_.weight(i, j);
    }
    return net;
  }

  std::vector<double> hidden_net_inputs(const BitVector& v) const {
    require_width(v, n_visible(), "visible vector");
    std::vector<double> net(n_hidden());
    for (std::size_t j = 0; j < n_hidden(); ++j) net[j] = hidden_net_input(v, j);
    return net;
  }

  BitVector forward(const BitVector& v, RandomStream& rng) const {
    require_width(v, n_visible(), "visible vector");
    BitVector h(n_hidden());
    for (std::size_t j = 0; j < n_hidden(); ++j) h.set(j, neuron_.sample(hidden_net_input(v, j), rng));
    return h;
  }

  BitVector backward(const BitVector& h, RandomStream& rng) const {
    require_width(h, n_hidden(), "hidden vector");
    BitVector v(n_visible());
    for (std::size_t i = 0; i < n_visible(); ++i) v.set(i, neuron_.sample(visible_net_input(h, i), rng));
    return v;
  }

  std::vector<double> probabilities_forward(const BitVector& v) const {
    require_width(v, n_visible(), "visible vector");
    std::vector<double> p(n_hidden());
    for (std::size_t j = 0; j < n_hidden(); ++j) p[j] = neuron_.probability(hidden_net_input(v, j));
    return p;
  }

  std::vector<double> probabilities_backward(const BitVector& h) const {
    require_width(h, n_hidden(), "hidden vector");
    std::vector<double> p(n_visible());
    for (std::size_t i = 0; i < n_visible(); ++i) p[i] = neuron_.probability(visible_net_input(h, i));
    return p;
  }

  /// Drives the write path for one clock. Read frames leave the devices untouched.
  void apply_frame(const SignalFrame& frame) {
    if (frame.phase == Phase::Read) return;
    require_width(frame.wwl, n_hidden(), "WWL");
    require_width(frame.bl, n_visible(), "BL");
    require_width(frame.sl, n_visible(), "SL");
    if (frame.rwl) throw ProtocolError("RWL must be low during a write");
    const std::size_t j = frame.selected_column();
    for (std::size_t i = 0; i < n_visible(); ++i) {
      grid_.apply_pulse(i, j, direction_of(int{frame.bl[i]} - int{frame.sl[i]}));
    }
  }

  void pulse_visible_bias(std::size_t i, PulseDirection dir) { grid_.pulse_visible_bias(i, dir); }
  void pulse_hidden_bias(std::size_t j, PulseDirection dir) { grid_.pulse_hidden_bias(j, dir); }

 private:
  SynapseGrid grid_;
  PBit neuron_;
  bool use_biases_;
};

}  // namespace snra
