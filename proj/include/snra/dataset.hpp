#pragma once

#include <zlib.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "snra/bits.hpp"
#include "snra/error.hpp"
#include "snra/rng.hpp"

namespace snra {

struct LabeledBitSet {
  std::vector<BitVector> images;
  std::vector<std::size_t> labels;
  std::string source;

  std::size_t size() const noexcept { return images.size(); }
  bool empty() const noexcept { return images.empty(); }
  std::size_t width() const noexcept { return images.empty() ? 0 : images.front().size(); }

  /// First n samples (or all of them when n exceeds the size).
  LabeledBitSet head(std::size_t n) const {
    LabeledBitSet out;
    out.source = source;
    n = std::min(n, size());
    out.images.assign(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(n));
    out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }
};

class IdxError : public FormatError {
 public:
  enum class Kind { Open, BadMagic, Truncated, Dimension, CountMismatch, BadLabel };

  IdxError(Kind kind, const std::string& what) : FormatError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kIdxImageMagic = 2051;
inline constexpr std::uint32_t kIdxLabelMagic = 2049;
inline constexpr std::size_t kMnistSide = 28;
inline constexpr std::size_t kMnistClasses = 10;

inline bool binarize(std::uint8_t pixel, std::uint8_t threshold = 127) { return pixel > threshold; }

struct BinarizeOptions {
  std::uint8_t threshold = 127;
  // Sample each pixel as Bernoulli(intensity / 255) instead of thresholding.
  bool bernoulli = false;
  std::uint64_t seed = 0;
};

namespace detail {

struct GzCloser {
  void operator()(gzFile_s* f) const { gzclose(f); }
};

/// Sequential reader over a plain or gzip-compressed file.
class GzReader {
 public:
  explicit GzReader(const std::filesystem::path& path) : path_(path.string()) {
    file_.reset(gzopen(path_.c_str(), "rb"));
    if (!file_) throw IdxError(IdxError::Kind::Open, "cannot open '" + path_ + "'");
  }

  void read(void* out, std::size_t n) {
    auto* dst = static_cast<unsigned char*>(out);
    while (n > 0) {
      const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1U << 30));
      const int got = gzread(file_.get(), dst, chunk);
      if (got <= 0) throw IdxError(IdxError::Kind::Truncated, "'" + path_ + "' is truncated");
      dst += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  std::uint32_t read_be32() {
    unsigned char b[4];
    read(b, 4);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
  }

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  std::unique_ptr<gzFile_s, GzCloser> file_;
};

}  // namespace detail

/// Loads up to `limit` MNIST samples from IDX files (gzip accepted) and
/// binarizes the pixels.
inline LabeledBitSet load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                              std::size_t limit = std::numeric_limits<std::size_t>::max(),
                              const BinarizeOptions& options = {}) {
  detail::GzReader images(images_path);
  detail::GzReader labels(labels_path);

  if (const auto m = images.read_be32(); m != kIdxImageMagic) {
    throw IdxError(IdxError::Kind::BadMagic, "'" + images.path() + "': bad image magic " + std::to_string(m));
  }
  if (const auto m = labels.read_be32(); m != kIdxLabelMagic) {
    throw IdxError(IdxError::Kind::BadMagic, "'" + labels.path() + "': bad label magic " + std::to_string(m));
  }
  const std::uint32_t n_images = images.read_be32();
  const std::uint32_t rows = images.read_be32();
  const std::uint32_t cols = images.read_be32();
  const std::uint32_t n_labels = labels.read_be32();
  if (rows != kMnistSide || cols != kMnistSide) {
    throw IdxError(IdxError::Kind::Dimension,
                   "images are " + std::to_string(rows) + "x" + std::to_string(cols) + ", expected 28x28");
  }
  if (n_images != n_labels) {
    throw IdxError(IdxError::Kind::CountMismatch,
                   std::to_string(n_images) + " images but " + std::to_string(n_labels) + " labels");
  }

  const std::size_t n = std::min<std::size_t>(limit, n_images);
  const std::size_t pixels = std::size_t{rows} * cols;
  LabeledBitSet out;
  out.source = images.path();
  out.images.reserve(n);
  out.labels.reserve(n);
  RandomStream rng(options.seed);
  std::vector<std::uint8_t> raw(pixels);
  for (std::size_t s = 0; s < n; ++s) {
    images.read(raw.data(), pixels);
    BitVector img(pixels);
    for (std::size_t p = 0; p < pixels; ++p) {
      img.set(p, options.bernoulli ? rng.uniform() < raw[p] / 255.0 : binarize(raw[p], options.threshold));
    }
    out.images.push_back(std::move(img));
    std::uint8_t label = 0;
    labels.read(&label, 1);
    if (label >= kMnistClasses) {
      throw IdxError(IdxError::Kind::BadLabel, "label " + std::to_string(label) + " outside 0-9");
    }
    out.labels.push_back(label);
  }
  return out;
}

/// Class k's prototype sets bits [k*width/classes, (k+1)*width/classes).
/// Samples cycle through the classes (sample s has label s % classes) and
/// each bit is flipped independently with probability `noise_flip_prob`.
inline LabeledBitSet synthetic_orthogonal(std::size_t width, std::size_t classes, std::size_t samples_per_class,
                                          double noise_flip_prob, std::uint64_t seed) {
  if (classes == 0 || classes > width) throw DomainError("need 1 <= classes <= width");
  if (!(noise_flip_prob >= 0.0 && noise_flip_prob <= 1.0)) throw DomainError("flip probability outside [0,1]");
  LabeledBitSet out;
  out.source = "synthetic-orthogonal";
  RandomStream rng(seed);
  const std::size_t total = classes * samples_per_class;
  out.images.reserve(total);
  out.labels.reserve(total);
  for (std::size_t s = 0; s < total; ++s) {
    const std::size_t k = s % classes;
    const std::size_t lo = k * width / classes, hi = (k + 1) * width / classes;
    BitVector img(width);
    for (std::size_t i = 0; i < width; ++i) {
      const bool proto = i >= lo && i < hi;
      const bool flip = noise_flip_prob > 0.0 && rng.uniform() < noise_flip_prob;
      img.set(i, proto != flip);
    }
    out.images.push_back(std::move(img));
    out.labels.push_back(k);
  }
  return out;
}

}  // namespace snra
