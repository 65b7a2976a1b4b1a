#pragma once

// Brute-force reference computations for small RBMs. Nothing here shares
// code with the sampling path in array.hpp / fsm.hpp, so tests can use these
// routines as ground truth.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "snra/array.hpp"
#include "snra/bits.hpp"
#include "snra/error.hpp"

namespace snra::oracle {

/// Real-valued RBM: W is n_v x n_h (row-major), b visible biases, c hidden biases.
struct DenseRbm {
  std::size_t n_v = 0;
  std::size_t n_h = 0;
  std::vector<double> W;
  std::vector<double> b;
  std::vector<double> c;

  DenseRbm() = default;
  DenseRbm(std::size_t nv, std::size_t nh) : n_v(nv), n_h(nh), W(nv * nh, 0.0), b(nv, 0.0), c(nh, 0.0) {}

  double& w(std::size_t i, std::size_t j) { return W[i * n_h + j]; }
  double w(std::size_t i, std::size_t j) const { return W[i * n_h + j]; }

  void validate() const {
    if (W.size() != n_v * n_h || b.size() != n_v || c.size() != n_h) throw DimensionError("inconsistent DenseRbm");
    for (double x : W) {
      if (!std::isfinite(x)) throw DomainError("non-finite weight");
    }
    for (double x : b) {
      if (!std::isfinite(x)) throw DomainError("non-finite bias");
    }
    for (double x : c) {
      if (!std::isfinite(x)) throw DomainError("non-finite bias");
    }
  }
};

/// Effective real-valued model of a crossbar: device weights times the
/// neuron's input gain, biases zeroed when the array does not use them.
inline DenseRbm dense_from_array(const RbmArray& array) {
  const double k = array.neuron().input_scale();
  DenseRbm r(array.n_visible(), array.n_hidden());
  for (std::size_t i = 0; i < r.n_v; ++i) {
    for (std::size_t j = 0; j < r.n_h; ++j) r.w(i, j) = k * array.grid().weight(i, j);
  }
  if (array.biases_enabled()) {
    for (std::size_t i = 0; i < r.n_v; ++i) r.b[i] = k * array.grid().visible_bias(i);
    for (std::size_t j = 0; j < r.n_h; ++j) r.c[j] = k * array.grid().hidden_bias(j);
  }
  return r;
}

/// E(v, h) = -sum_i b_i v_i - sum_j c_j h_j - sum_ij v_i W_ij h_j
inline double energy(const DenseRbm& rbm, const BitVector& v, const BitVector& h) {
  require_width(v, rbm.n_v, "visible state");
  require_width(h, rbm.n_h, "hidden state");
  double e = 0.0;
  for (std::size_t i = 0; i < rbm.n_v; ++i) e -= rbm.b[i] * v[i];
  for (std::size_t j = 0; j < rbm.n_h; ++j) e -= rbm.c[j] * h[j];
  for (std::size_t i = 0; i < rbm.n_v; ++i) {
    for (std::size_t j = 0; j < rbm.n_h; ++j) e -= v[i] * rbm.w(i, j) * h[j];
  }
  return e;
}

inline constexpr std::size_t kMaxEnumeratedUnits = 20;

/// Joint state index: bits 0..n_v-1 hold v (v_0 least significant), the
/// next n_h bits hold h.
inline std::uint64_t joint_index(const BitVector& v, const BitVector& h) {
  return v.to_uint() | (h.to_uint() << v.size());
}

/// Boltzmann distribution P(v,h) = exp(-E(v,h)) / Z over all joint states,
/// indexed by joint_index.
inline std::vector<double> exact_distribution(const DenseRbm& rbm) {
  rbm.validate();
  const std::size_t units = rbm.n_v + rbm.n_h;
  if (units > kMaxEnumeratedUnits) {
    throw SizeLimitError("exact enumeration limited to " + std::to_string(kMaxEnumeratedUnits) + " units, got " +
                         std::to_string(units));
  }
  const std::uint64_t states = std::uint64_t{1} << units;
  std::vector<double> neg_energy(states);
  double max_ne = -INFINITY;
  for (std::uint64_t s = 0; s < states; ++s) {
    const BitVector v = BitVector::from_uint(s, rbm.n_v);
    const BitVector h = BitVector::from_uint(s >> rbm.n_v, rbm.n_h);
    neg_energy[s] = -energy(rbm, v, h);
    if (neg_energy[s] > max_ne) max_ne = neg_energy[s];
  }
  // Shift by the largest exponent before exponentiating.
  double z = 0.0;
  std::vector<double> p(states);
  for (std::uint64_t s = 0; s < states; ++s) {
    p[s] = std::exp(neg_energy[s] - max_ne);
    z += p[s];
  }
  for (double& x : p) x /= z;
  return p;
}

/// P(v) summed over hidden states, indexed by v.to_uint().
inline std::vector<double> visible_marginal(const DenseRbm& rbm, const std::vector<double>& joint) {
  std::vector<double> m(std::size_t{1} << rbm.n_v, 0.0);
  for (std::uint64_t s = 0; s < joint.size(); ++s) m[s & ((std::uint64_t{1} << rbm.n_v) - 1)] += joint[s];
  return m;
}

/// P(h_j = 1 | v) read off the joint distribution by conditioning.
inline double conditional_hidden(const DenseRbm& rbm, const std::vector<double>& joint, const BitVector& v,
                                 std::size_t j) {
  const std::uint64_t vbits = v.to_uint();
  double on = 0.0, all = 0.0;
  for (std::uint64_t hbits = 0; hbits < (std::uint64_t{1} << rbm.n_h); ++hbits) {
    const double p = joint[vbits | (hbits << rbm.n_v)];
    all += p;
    if ((hbits >> j) & 1U) on += p;
  }
  return on / all;
}

/// Contrastive-divergence weight change eta * (v h^T - v' h'^T), n_v x n_h row-major.
inline std::vector<double> cd_delta(const BitVector& v, const BitVector& h, const BitVector& v_bar,
                                    const BitVector& h_bar, double eta) {
  require_width(v_bar, v.size(), "v_bar");
  require_width(h_bar, h.size(), "h_bar");
  std::vector<double> dw(v.size() * h.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      dw[i * h.size() + j] = eta * (double(v[i] * h[j]) - double(v_bar[i] * h_bar[j]));
    }
  }
  return dw;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DimensionError("distributions differ in support size");
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) d += std::abs(p[k] - q[k]);
  return 0.5 * d;
}

/// Empirical joint distribution of alternating Gibbs sampling on `array`:
/// each sweep samples h from v, records (v, h), then samples v from h.
inline std::vector<double> gibbs_joint_frequencies(const RbmArray& array, std::uint64_t sweeps, RandomStream& rng,
                                                   std::uint64_t burn_in = 1000) {
  const std::size_t units = array.n_visible() + array.n_hidden();
  if (units > kMaxEnumeratedUnits) throw SizeLimitError("joint histogram too large");
  std::vector<std::uint64_t> counts(std::size_t{1} << units, 0);
  BitVector v(array.n_visible());
  for (std::uint64_t s = 0; s < burn_in + sweeps; ++s) {
    const BitVector h = array.forward(v, rng);
    if (s >= burn_in) ++counts[joint_index(v, h)];
    v = array.backward(h, rng);
  }
  std::vector<double> freq(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) freq[k] = double(counts[k]) / double(sweeps);
  return freq;
}

}  // namespace snra::oracle
