#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "snra/array.hpp"
#include "snra/bits.hpp"
#include "snra/dataset.hpp"
#include "snra/error.hpp"
#include "snra/fsm.hpp"
#include "snra/rng.hpp"
#include "snra/topology.hpp"

namespace snra {

/// Device settings shared by every layer of a network.
struct DeviceConfig {
  std::uint16_t levels = 32;
  std::uint16_t step = 1;
  double input_scale = 1.0;
  double w_min = -1.0;
  double w_max = 1.0;
  bool use_biases = true;

  ArrayConfig array_config() const { return ArrayConfig{SynapseConfig{levels, step, w_min, w_max}, input_scale, use_biases}; }
  friend bool operator==(const DeviceConfig&, const DeviceConfig&) = default;
};

enum class WeightInit {
  Midpoint,      // every device at the lower middle index
  NearMidpoint,  // lower middle index or the one above it, chosen at random
  Uniform,       // any index, uniformly
};

/// A stack of crossbars; layer l maps topology[l] visible units to topology[l+1] hidden units.
class DbnModel {
 public:
  DbnModel(Topology topology, DeviceConfig device = {}, std::uint64_t seed = 0,
           WeightInit init = WeightInit::NearMidpoint)
      : topology_(std::move(topology)), device_(device), seed_(seed) {
    RandomStream rng(derive_seed(seed_, "init", 0));
    for (std::size_t l = 0; l < topology_.rbm_count(); ++l) {
      const auto [nv, nh] = topology_.rbm(l);
      layers_.emplace_back(nv, nh, device_.array_config());
      initialize(layers_.back().grid(), init, rng);
    }
  }

  const Topology& topology() const noexcept { return topology_; }
  const DeviceConfig& device() const noexcept { return device_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::vector<RbmArray>& layers() noexcept { return layers_; }
  const std::vector<RbmArray>& layers() const noexcept { return layers_; }
  std::size_t class_count() const { return topology_.output_width(); }

  std::uint64_t fingerprint() const {
    std::uint64_t h = 0;
    for (const auto& layer : layers_) h = derive_seed(h, "layer", layer.grid().fingerprint());
    return h;
  }

  friend bool operator==(const DbnModel& a, const DbnModel& b) {
    if (!(a.topology_ == b.topology_ && a.device_ == b.device_ && a.seed_ == b.seed_)) return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
      if (!(a.layers_[l].grid() == b.layers_[l].grid())) return false;
    }
    return true;
  }

 private:
  static void initialize(SynapseGrid& g, WeightInit init, RandomStream& rng) {
    if (init == WeightInit::Midpoint) return;
    auto pick = [&]() -> SynapseGrid::Index {
      if (init == WeightInit::Uniform) return static_cast<SynapseGrid::Index>(rng.below(g.levels()));
      return static_cast<SynapseGrid::Index>(g.midpoint() + rng.below(2));
    };
    for (std::size_t i = 0; i < g.n_visible(); ++i) {
      for (std::size_t j = 0; j < g.n_hidden(); ++j) g.set_state(i, j, pick());
    }
    for (std::size_t i = 0; i < g.n_visible(); ++i) g.set_visible_bias_state(i, pick());
    for (std::size_t j = 0; j < g.n_hidden(); ++j) g.set_hidden_bias_state(j, pick());
  }

  Topology topology_;
  DeviceConfig device_;
  std::uint64_t seed_;
  std::vector<RbmArray> layers_;
};

struct LayerReport {
  std::size_t n_visible = 0;
  std::size_t n_hidden = 0;
  std::uint64_t iterations = 0;
  std::uint64_t clocks = 0;
  std::uint64_t weight_pulses = 0;
  std::uint64_t bias_pulses = 0;
  bool label_clamped = false;
  std::uint64_t fingerprint = 0;  // layer grid right after its training finished
};

struct TrainingReport {
  std::vector<LayerReport> layers;

  std::uint64_t total_clocks() const {
    std::uint64_t c = 0;
    for (const auto& l : layers) c += l.clocks;
    return c;
  }
};

struct TrainOptions {
  // Clamp the top layer's hidden register to the one-hot label during training.
  bool clamp_labels = true;
};

/// CD training of layer `l` through its controller for `epochs` passes over
/// `inputs`. `labels` is either empty or one class index per input; when
/// given, the hidden register is clamped to the one-hot label.
inline LayerReport train_layer(DbnModel& model, std::size_t l, std::span<const BitVector> inputs,
                               std::span<const std::size_t> labels, std::size_t epochs) {
  RbmArray& array = model.layers().at(l);
  if (!labels.empty() && labels.size() != inputs.size()) throw DimensionError("one label per input required");
  CdFsm fsm(array.n_visible(), array.n_hidden(), FsmMode::Train);
  RandomStream rng(derive_seed(model.seed(), "train", l));

  std::vector<BitVector> one_hot;
  if (!labels.empty()) {
    one_hot.reserve(array.n_hidden());
    for (std::size_t k = 0; k < array.n_hidden(); ++k) one_hot.push_back(BitVector::one_hot(array.n_hidden(), k));
  }

  LayerReport report{array.n_visible(), array.n_hidden()};
  report.label_clamped = !labels.empty();
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t s = 0; s < inputs.size(); ++s) {
      require_width(inputs[s], array.n_visible(), "training sample");
      if (labels.empty()) {
        run_cd_iteration(fsm, array, inputs[s], rng);
      } else {
        if (labels[s] >= array.n_hidden()) throw IndexError("label exceeds output width");
        run_cd_iteration_clamped(fsm, array, inputs[s], one_hot[labels[s]], rng);
      }
      ++report.iterations;
    }
  }
  report.clocks = fsm.clock_count();
  report.weight_pulses = fsm.weight_pulses();
  report.bias_pulses = fsm.bias_pulses();
  report.fingerprint = array.grid().fingerprint();
  return report;
}

/// Greedy layer-wise training: train layer 0 on the data, freeze it, pass
/// every sample up once (sampled binary states) to form the next layer's
/// data, and repeat. The top layer is label-clamped when labels are present.
inline TrainingReport greedy_train(DbnModel& model, const LabeledBitSet& data, std::size_t epochs,
                                   TrainOptions options = {}) {
  const Topology& topo = model.topology();
  for (const auto& img : data.images) require_width(img, topo.input_width(), "training image");
  const bool supervised = options.clamp_labels && !data.labels.empty();
  if (supervised && data.labels.size() != data.images.size()) throw DimensionError("image/label count mismatch");

  TrainingReport report;
  std::vector<BitVector> inputs = data.images;
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    const bool top = l + 1 == model.layers().size();
    const std::span<const std::size_t> labels =
        top && supervised ? std::span<const std::size_t>(data.labels) : std::span<const std::size_t>{};
    report.layers.push_back(train_layer(model, l, inputs, labels, epochs));
    if (!top) {
      RandomStream rng(derive_seed(model.seed(), "transfer", l));
      for (auto& x : inputs) x = model.layers()[l].forward(x, rng);
    }
  }
  return report;
}

/// Class of `image`: sampled propagation through the lower layers, then the
/// top unit with the largest activation probability (lowest index on a tie).
/// The sampling stream depends only on the model seed and `sample_index`.
inline std::size_t predict(const DbnModel& model, const BitVector& image, std::uint64_t sample_index = 0) {
  require_width(image, model.topology().input_width(), "image");
  RandomStream rng(derive_seed(model.seed(), "eval", sample_index));
  const auto& layers = model.layers();
  BitVector x = image;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) x = layers[l].forward(x, rng);
  // sigmoid is monotone, so comparing net inputs ranks the probabilities
  // without the ties that saturation at 1.0 would create.
  const std::vector<double> net = layers.back().hidden_net_inputs(x);
  return static_cast<std::size_t>(std::distance(net.begin(), std::max_element(net.begin(), net.end())));
}

/// Fraction of misclassified samples. Work is split over `workers` threads;
/// the result does not depend on the split.
inline double error_rate(const DbnModel& model, std::span<const BitVector> images, std::span<const std::size_t> labels,
                         unsigned workers = 1) {
  if (images.empty()) throw DomainError("empty test set");
  if (images.size() != labels.size()) throw DimensionError("image/label count mismatch");
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(images.size())));
  std::vector<std::size_t> wrong(workers, 0);
  auto run = [&](unsigned w) {
    for (std::size_t s = w; s < images.size(); s += workers) {
      if (predict(model, images[s], s) != labels[s]) ++wrong[w];
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  std::size_t total = 0;
  for (auto n : wrong) total += n;
  return static_cast<double>(total) / static_cast<double>(images.size());
}

inline double error_rate(const DbnModel& model, const LabeledBitSet& data, unsigned workers = 1) {
  return error_rate(model, data.images, data.labels, workers);
}

// ---------------------------------------------------------------------------
// Model files. All integers little-endian, floats as IEEE-754 binary64 bits.
//
//   "SNRA"                 4 bytes
//   version                u16 (= 1)
//   layer count L          u16
//   layer sizes            u32 x L
//   levels Q               u16
//   pulse step             u16
//   input_scale            f64
//   seed                   u64
//   w_min, w_max           f64, f64
//   use_biases             u8
//   per RBM l (n_v x n_h): weight indices u16 x n_v*n_h (row-major),
//                          visible bias indices u16 x n_v,
//                          hidden bias indices u16 x n_h
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kModelFormatVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  void u8(std::uint8_t x) { out_.push_back(static_cast<char>(x)); }
  void u16(std::uint16_t x) { le(x, 2); }
  void u32(std::uint32_t x) { le(x, 4); }
  void u64(std::uint64_t x) { le(x, 8); }
  void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
  std::vector<char> take() { return std::move(out_); }

 private:
  void le(std::uint64_t x, int n) {
    for (int k = 0; k < n; ++k) out_.push_back(static_cast<char>((x >> (8 * k)) & 0xFFU));
  }
  std::vector<char> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const char> in) : in_(in) {}
  void bytes(char* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("model file truncated");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t x = 0;
    for (int k = 0; k < n; ++k) x |= std::uint64_t{static_cast<unsigned char>(in_[pos_ + k])} << (8 * k);
    pos_ += static_cast<std::size_t>(n);
    return x;
  }
  std::span<const char> in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<char> serialize_model(const DbnModel& model) {
  detail::ByteWriter w;
  w.bytes("SNRA", 4);
  w.u16(kModelFormatVersion);
  const auto& sizes = model.topology().sizes();
  w.u16(static_cast<std::uint16_t>(sizes.size()));
  for (auto s : sizes) w.u32(static_cast<std::uint32_t>(s));
  const DeviceConfig& d = model.device();
  w.u16(d.levels);
  w.u16(d.step);
  w.f64(d.input_scale);
  w.u64(model.seed());
  w.f64(d.w_min);
  w.f64(d.w_max);
  w.u8(d.use_biases ? 1 : 0);
  for (const auto& layer : model.layers()) {
    const SynapseGrid& g = layer.grid();
    for (auto x : g.states()) w.u16(x);
    for (auto x : g.visible_bias_states()) w.u16(x);
    for (auto x : g.hidden_bias_states()) w.u16(x);
  }
  return w.take();
}

inline DbnModel deserialize_model(std::span<const char> bytes) {
  detail::ByteReader r(bytes);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, "SNRA", 4) != 0) throw FormatError("not a model file (bad magic)");
  if (const auto v = r.u16(); v != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(v));
  }
  std::vector<std::size_t> sizes(r.u16());
  for (auto& s : sizes) s = r.u32();
  DeviceConfig d;
  d.levels = r.u16();
  d.step = r.u16();
  d.input_scale = r.f64();
  const std::uint64_t seed = r.u64();
  d.w_min = r.f64();
  d.w_max = r.f64();
  d.use_biases = r.u8() != 0;
  DbnModel model(Topology(std::move(sizes)), d, seed, WeightInit::Midpoint);
  for (auto& layer : model.layers()) {
    SynapseGrid& g = layer.grid();
    for (std::size_t i = 0; i < g.n_visible(); ++i) {
      for (std::size_t j = 0; j < g.n_hidden(); ++j) g.set_state(i, j, r.u16());
    }
    for (std::size_t i = 0; i < g.n_visible(); ++i) g.set_visible_bias_state(i, r.u16());
    for (std::size_t j = 0; j < g.n_hidden(); ++j) g.set_hidden_bias_state(j, r.u16());
  }
  if (!r.done()) throw FormatError("trailing bytes after model data");
  return model;
}

inline void save_model(const DbnModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing model '" + path.string() + "'");
}

inline DbnModel load_model(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.empty() || !std::filesystem::is_regular_file(path, ec)) {
    throw IoError("model not found: '" + path.string() + "'");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("model not found: '" + path.string() + "'");
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace snra
