#pragma once

#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "snra/array.hpp"
#include "snra/bits.hpp"
#include "snra/error.hpp"
#include "snra/rng.hpp"
#include "snra/topology.hpp"

namespace snra {

/// What the controller needs from a crossbar: layer sampling in both
/// directions, the write path, and the bias devices.
template <typename A>
concept CrossbarArray = requires(A& a, const BitVector& bits, RandomStream& rng, const SignalFrame& frame,
                                 std::size_t k, PulseDirection dir) {
  { a.n_visible() } -> std::convertible_to<std::size_t>;
  { a.n_hidden() } -> std::convertible_to<std::size_t>;
  { a.biases_enabled() } -> std::convertible_to<bool>;
  { a.forward(bits, rng) } -> std::same_as<BitVector>;
  { a.backward(bits, rng) } -> std::same_as<BitVector>;
  a.apply_frame(frame);
  a.pulse_visible_bias(k, dir);
  a.pulse_hidden_bias(k, dir);
};

static_assert(CrossbarArray<RbmArray>);

// Two-bit state register encoding.
enum class FsmState : std::uint8_t { FeedForward = 0b00, FeedBack = 0b01, Reconstruct = 0b10, Update = 0b11 };

enum class FsmMode { Test, Train };

inline std::string_view to_string(FsmState s) {
  switch (s) {
    case FsmState::FeedForward: return "feed-forward";
    case FsmState::FeedBack: return "feed-back";
    case FsmState::Reconstruct: return "reconstruct";
    case FsmState::Update: return "update";
  }
  return "?";
}

/// Bits needed by a counter that must hold 0..max_value.
constexpr unsigned counter_width(std::size_t max_value) {
  return static_cast<unsigned>(std::bit_width(max_value));
}

/// One controller clock as seen from outside: the state and counter during
/// the clock and the crossbar signals it drove.
struct ClockRecord {
  FsmState state = FsmState::FeedForward;
  std::size_t counter = 0;
  SignalFrame frame;
};

/// Four-state contrastive-divergence controller with its register file.
///
/// Train mode cycles feed-forward -> feed-back -> reconstruct -> update,
/// spending one clock in each read state and one clock per hidden column in
/// update, so one CD-1 iteration takes n_h + 3 clocks. Test mode stays in
/// feed-forward and never drives the write path.
class CdFsm {
 public:
  CdFsm(std::size_t n_visible, std::size_t n_hidden, FsmMode mode = FsmMode::Train)
      : n_v_(n_visible),
        n_h_(n_hidden),
        mode_(mode),
        v_(n_visible),
        v_bar_(n_visible),
        bl_reg_(n_visible),
        sl_reg_(n_visible),
        h_(n_hidden),
        h_bar_(n_hidden) {
    if (n_visible == 0 || n_hidden == 0) throw DimensionError("controller needs non-empty layers");
  }

  std::size_t n_visible() const noexcept { return n_v_; }
  std::size_t n_hidden() const noexcept { return n_h_; }
  FsmState state() const noexcept { return state_; }
  FsmMode mode() const noexcept { return mode_; }
  std::size_t counter() const noexcept { return counter_; }
  unsigned counter_bits() const noexcept { return counter_width(n_h_); }
  std::uint64_t clock_count() const noexcept { return clock_count_; }
  std::uint64_t weight_pulses() const noexcept { return weight_pulses_; }
  std::uint64_t bias_pulses() const noexcept { return bias_pulses_; }

  const BitVector& v() const noexcept { return v_; }
  const BitVector& h() const noexcept { return h_; }
  const BitVector& v_bar() const noexcept { return v_bar_; }
  const BitVector& h_bar() const noexcept { return h_bar_; }
  const BitVector& bl_reg() const noexcept { return bl_reg_; }
  const BitVector& sl_reg() const noexcept { return sl_reg_; }

  void set_mode(FsmMode mode) {
    if (state_ != FsmState::FeedForward) throw ProtocolError("mode can only change in feed-forward");
    mode_ = mode;
  }

  /// Clock without an input vector (every state except feed-forward).
  template <CrossbarArray A>
  SignalFrame step(A& array, RandomStream& rng) {
    return step_impl(array, nullptr, nullptr, rng);
  }

  /// Feed-forward clock: latch `input` into v and sample h.
  template <CrossbarArray A>
  SignalFrame step(A& array, const BitVector& input, RandomStream& rng) {
    return step_impl(array, &input, nullptr, rng);
  }

  /// Feed-forward clock with the hidden register loaded from `clamped_hidden`
  /// instead of being sampled (label clamping of a supervised top layer).
  template <CrossbarArray A>
  SignalFrame step(A& array, const BitVector& input, const BitVector& clamped_hidden, RandomStream& rng) {
    return step_impl(array, &input, &clamped_hidden, rng);
  }

 private:
  template <CrossbarArray A>
  SignalFrame step_impl(A& array, const BitVector* input, const BitVector* clamped, RandomStream& rng) {
    if (array.n_visible() != n_v_ || array.n_hidden() != n_h_) {
      throw DimensionError("array does not match the controller's register widths");
    }
    const bool wants_input = state_ == FsmState::FeedForward;
    if (wants_input && input == nullptr) throw ProtocolError("feed-forward clock needs an input vector");
    if (!wants_input && input != nullptr) throw ProtocolError("input vector supplied outside feed-forward");

    ++clock_count_;
    switch (state_) {
      case FsmState::FeedForward: {
        require_width(*input, n_v_, "input vector");
        v_ = *input;
        if (clamped != nullptr) {
          require_width(*clamped, n_h_, "clamped hidden vector");
          h_ = *clamped;
        } else {
          h_ = array.forward(v_, rng);
        }
        state_ = mode_ == FsmMode::Train ? FsmState::FeedBack : FsmState::FeedForward;
        return SignalFrame::read(n_v_, n_h_);
      }
      case FsmState::FeedBack:
        v_bar_ = array.backward(h_, rng);
        state_ = FsmState::Reconstruct;
        return SignalFrame::read(n_v_, n_h_);
      case FsmState::Reconstruct:
        h_bar_ = array.forward(v_bar_, rng);
        state_ = FsmState::Update;
        return SignalFrame::read(n_v_, n_h_);
      case FsmState::Update:
        return update_clock(array);
    }
    throw ProtocolError("corrupt state register");
  }

  template <CrossbarArray A>
  SignalFrame update_clock(A& array) {
    const std::size_t j = counter_;
    for (std::size_t i = 0; i < n_v_; ++i) {
      bl_reg_.set(i, v_[i] && h_[j]);
      sl_reg_.set(i, v_bar_[i] && h_bar_[j]);
      if (bl_reg_[i] != sl_reg_[i]) ++weight_pulses_;
    }
    SignalFrame frame = SignalFrame::write(j, n_h_, bl_reg_, sl_reg_);
    array.apply_frame(frame);

    // Bias devices have their own write drivers and update alongside column 0.
    if (j == 0 && array.biases_enabled()) {
      for (std::size_t i = 0; i < n_v_; ++i) {
        const PulseDirection dir = direction_of(int{v_[i]} - int{v_bar_[i]});
        if (dir != PulseDirection::None) ++bias_pulses_;
        array.pulse_visible_bias(i, dir);
      }
      for (std::size_t k = 0; k < n_h_; ++k) {
        const PulseDirection dir = direction_of(int{h_[k]} - int{h_bar_[k]});
        if (dir != PulseDirection::None) ++bias_pulses_;
        array.pulse_hidden_bias(k, dir);
      }
    }

    if (++counter_ == n_h_) {
      counter_ = 0;
      state_ = FsmState::FeedForward;
    }
    return frame;
  }

  std::size_t n_v_;
  std::size_t n_h_;
  FsmMode mode_;
  FsmState state_ = FsmState::FeedForward;
  std::size_t counter_ = 0;
  BitVector v_, v_bar_, bl_reg_, sl_reg_;
  BitVector h_, h_bar_;
  std::uint64_t clock_count_ = 0;
  std::uint64_t weight_pulses_ = 0;
  std::uint64_t bias_pulses_ = 0;
};

struct CdIteration {
  std::vector<ClockRecord> records;
  std::uint64_t clocks = 0;

  std::vector<SignalFrame> frames() const {
    std::vector<SignalFrame> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.frame);
    return out;
  }
};

namespace detail {

template <CrossbarArray A>
CdIteration run_iteration(CdFsm& fsm, A& array, const BitVector& input, const BitVector* clamped,
                          RandomStream& rng) {
  if (fsm.mode() != FsmMode::Train) throw ProtocolError("CD iteration requires train mode");
  if (fsm.state() != FsmState::FeedForward) throw ProtocolError("CD iteration must start in feed-forward");
  CdIteration it;
  it.records.reserve(fsm.n_hidden() + 3);
  const std::uint64_t start = fsm.clock_count();
  do {
    ClockRecord rec{fsm.state(), fsm.counter(), {}};
    if (fsm.state() == FsmState::FeedForward) {
      rec.frame = clamped ? fsm.step(array, input, *clamped, rng) : fsm.step(array, input, rng);
    } else {
      rec.frame = fsm.step(array, rng);
    }
    it.records.push_back(std::move(rec));
  } while (fsm.state() != FsmState::FeedForward);
  it.clocks = fsm.clock_count() - start;
  return it;
}

}  // namespace detail

/// Clocks the controller through one full CD-1 iteration on `input`.
template <CrossbarArray A>
CdIteration run_cd_iteration(CdFsm& fsm, A& array, const BitVector& input, RandomStream& rng) {
  return detail::run_iteration(fsm, array, input, nullptr, rng);
}

/// As run_cd_iteration, with the hidden register clamped to `label` in feed-forward.
template <CrossbarArray A>
CdIteration run_cd_iteration_clamped(CdFsm& fsm, A& array, const BitVector& input, const BitVector& label,
                                     RandomStream& rng) {
  return detail::run_iteration(fsm, array, input, &label, rng);
}

/// One test-mode clock: returns the sampled hidden layer for `input`.
template <CrossbarArray A>
BitVector run_test(CdFsm& fsm, A& array, const BitVector& input, RandomStream& rng) {
  if (fsm.mode() != FsmMode::Test) throw ProtocolError("run_test requires test mode");
  fsm.step(array, input, rng);
  return fsm.h();
}

/// Crossbar stand-in that returns preset register values for the three read
/// clocks and forwards writes to a real array. Used to replay a known
/// (v, h, v_bar, h_bar) assignment through the controller.
template <CrossbarArray Inner>
class ScriptedArray {
 public:
  ScriptedArray(Inner& inner, BitVector h, BitVector v_bar, BitVector h_bar)
      : inner_(inner), h_(std::move(h)), v_bar_(std::move(v_bar)), h_bar_(std::move(h_bar)) {
    require_width(h_, inner_.n_hidden(), "scripted h");
    require_width(h_bar_, inner_.n_hidden(), "scripted h_bar");
    require_width(v_bar_, inner_.n_visible(), "scripted v_bar");
  }

  std::size_t n_visible() const { return inner_.n_visible(); }
  std::size_t n_hidden() const { return inner_.n_hidden(); }
  bool biases_enabled() const { return inner_.biases_enabled(); }

  // Alternates h (feed-forward) and h_bar (reconstruct).
  BitVector forward(const BitVector&, RandomStream&) { return (forward_calls_++ % 2 == 0) ? h_ : h_bar_; }
  BitVector backward(const BitVector&, RandomStream&) { return v_bar_; }
  void apply_frame(const SignalFrame& frame) { inner_.apply_frame(frame); }
  void pulse_visible_bias(std::size_t i, PulseDirection dir) { inner_.pulse_visible_bias(i, dir); }
  void pulse_hidden_bias(std::size_t j, PulseDirection dir) { inner_.pulse_hidden_bias(j, dir); }

 private:
  Inner& inner_;
  BitVector h_, v_bar_, h_bar_;
  std::size_t forward_calls_ = 0;
};

inline constexpr double kDefaultClockHz = 500e6;

struct ClockBudget {
  std::uint64_t clocks = 0;
  double seconds = 0.0;
};

/// Clocks for greedy CD training of every RBM in `topology` over
/// `samples` x `epochs` iterations each.
inline ClockBudget train_clock_budget(const Topology& topology, std::uint64_t samples, std::uint64_t epochs,
                                      double clock_hz = kDefaultClockHz) {
  if (topology.rbm_count() == 0) throw TopologyError("empty topology");
  ClockBudget b;
  for (std::size_t l = 0; l < topology.rbm_count(); ++l) {
    b.clocks += samples * epochs * (topology.rbm(l).second + 3);
  }
  b.seconds = static_cast<double>(b.clocks) / clock_hz;
  return b;
}

}  // namespace snra
