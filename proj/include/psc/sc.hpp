#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psc/pmf.hpp"
#include "psc/xform.hpp"

namespace psc::sc {

using pmf::BinaryInputChannel;

// Exact successive-cancellation posteriors P(U_i = a | u^{i-1}, y^n) for
// U^n = T^n G_n, T_j i.i.d. Bernoulli(prior1), Y_j ~ W(.|T_j).
//
// The computation runs on the binary tree over observation segments: the node
// at depth d, index k covers y-positions [k 2^{m-d}, (k+1) 2^{m-d}). All nodes
// at depth d sit at local phase (i >> d); a node's current pair comes from its
// children's pairs by the check combine (even local phase) or the variable
// combine with the node's stored even-phase bit (odd local phase). One full
// pass costs O(n log n).
//
// Probabilities are carried in the linear domain. Check combines preserve
// normalization exactly; variable combines renormalize, and a zero-mass
// conditioning path yields the uniform pair (1/2, 1/2).
class ScSession {
 public:
  ScSession(double prior1, BinaryInputChannel channel, std::span<const std::uint8_t> obs)
      : prior1_(prior1), channel_(std::move(channel)) {
    if (!(prior1_ >= 0.0 && prior1_ <= 1.0))
      throw std::invalid_argument("prior must lie in [0, 1]");
    init_layout(obs.size());
    load_observations(obs);
  }

  // Convenience: a null-channel session of length n needs no observations.
  ScSession(double prior1, std::size_t n)
      : prior1_(prior1), channel_(BinaryInputChannel::null_channel()) {
    init_layout(n);
    load_observations({});
  }

  int n() const { return static_cast<int>(n_); }
  int cursor() const { return phase_; }
  bool exhausted() const { return phase_ >= static_cast<int>(n_); }

  // Reuse the session (same prior and channel) for a fresh pass.
  void reset(std::span<const std::uint8_t> obs) {
    load_observations(obs);
    phase_ = 0;
    refreshed_ = -1;
  }

  std::pair<double, double> next_posterior() {
    if (exhausted()) throw std::runtime_error("SC session exhausted");
    if (uniform_shortcut_) return {0.5, 0.5};
    ensure_current();
    double p0 = pr_[0], p1 = pr_[1];
    double s = p0 + p1;
    if (!(s > 0.0)) return {0.5, 0.5};
    return {p0 / s, p1 / s};
  }

  void feed(int bit) {
    if (exhausted()) throw std::runtime_error("SC session exhausted");
    if (uniform_shortcut_) {
      ++phase_;
      return;
    }
    ensure_current();
    casc_[0] = static_cast<std::uint8_t>(bit & 1);
    int d = 0;
    while (d < m_ && ((phase_ >> d) & 1)) {
      std::size_t cnt = std::size_t{1} << d;
      std::size_t base = cnt - 1;
      for (std::size_t k = 0; k < cnt; ++k) {
        std::uint8_t even = beta_[base + k];
        std::uint8_t odd = casc_[k];
        casc2_[2 * k] = even ^ odd;
        casc2_[2 * k + 1] = odd;
      }
      std::swap(casc_, casc2_);
      ++d;
    }
    std::size_t cnt = std::size_t{1} << d;
    std::size_t base = cnt - 1;
    for (std::size_t k = 0; k < cnt; ++k) beta_[base + k] = casc_[k];
    ++phase_;
  }

 private:
  void init_layout(std::size_t n) {
    n_ = n;
    m_ = xform::log2_exact(n_);
    std::size_t nodes = 2 * n_ - 1;
    pr_.assign(2 * nodes, 0.0);
    beta_.assign(nodes, 0);
    casc_.assign(n_, 0);
    casc2_.assign(n_, 0);
    // Uniform prior with no observations: every posterior is (1/2, 1/2) and
    // the tree carries no information, so skip it entirely.
    uniform_shortcut_ = channel_.is_null() && prior1_ == 0.5;
  }

  void load_observations(std::span<const std::uint8_t> obs) {
    if (channel_.is_null() && obs.empty()) {
      init_leaves_null();
      return;
    }
    if (obs.size() != n_) throw std::invalid_argument("observation length mismatch");
    if (uniform_shortcut_) return;
    std::size_t leaf_base = n_ - 1;
    for (std::size_t k = 0; k < n_; ++k) {
      int y = obs[k];
      if (y < 0 || y >= channel_.outputs())
        throw std::invalid_argument("observation symbol outside channel alphabet");
      double a = (1.0 - prior1_) * channel_(y, 0);
      double b = prior1_ * channel_(y, 1);
      double s = a + b;
      if (s > 0.0) {
        pr_[2 * (leaf_base + k)] = a / s;
        pr_[2 * (leaf_base + k) + 1] = b / s;
      } else {
        pr_[2 * (leaf_base + k)] = 0.5;
        pr_[2 * (leaf_base + k) + 1] = 0.5;
      }
    }
    phase_ = 0;
    refreshed_ = -1;
  }

  void init_leaves_null() {
    if (uniform_shortcut_) return;
    std::size_t leaf_base = n_ - 1;
    for (std::size_t k = 0; k < n_; ++k) {
      pr_[2 * (leaf_base + k)] = 1.0 - prior1_;
      pr_[2 * (leaf_base + k) + 1] = prior1_;
    }
    phase_ = 0;
    refreshed_ = -1;
  }

  void refresh_f(int depth) {
    std::size_t cnt = std::size_t{1} << depth;
    std::size_t base = cnt - 1;
    std::size_t cbase = 2 * cnt - 1;
    for (std::size_t k = 0; k < cnt; ++k) {
      const double* l = &pr_[2 * (cbase + 2 * k)];
      const double* r = &pr_[2 * (cbase + 2 * k + 1)];
      double* out = &pr_[2 * (base + k)];
      out[0] = l[0] * r[0] + l[1] * r[1];
      out[1] = l[1] * r[0] + l[0] * r[1];
    }
  }

  void refresh_g(int depth) {
    std::size_t cnt = std::size_t{1} << depth;
    std::size_t base = cnt - 1;
    std::size_t cbase = 2 * cnt - 1;
    for (std::size_t k = 0; k < cnt; ++k) {
      const double* l = &pr_[2 * (cbase + 2 * k)];
      const double* r = &pr_[2 * (cbase + 2 * k + 1)];
      double* out = &pr_[2 * (base + k)];
      int c = beta_[base + k];
      double q0 = l[c] * r[0];
      double q1 = l[c ^ 1] * r[1];
      double s = q0 + q1;
      if (s > 0.0) {
        out[0] = q0 / s;
        out[1] = q1 / s;
      } else {
        out[0] = 0.5;
        out[1] = 0.5;
      }
    }
  }

  void ensure_current() {
    if (refreshed_ == phase_) return;
    if (phase_ == 0) {
      for (int d = m_ - 1; d >= 0; --d) refresh_f(d);
    } else {
      int lowest = std::countr_zero(static_cast<unsigned>(phase_));
      refresh_g(lowest);
      for (int d = lowest - 1; d >= 0; --d) refresh_f(d);
    }
    refreshed_ = phase_;
  }

  double prior1_;
  BinaryInputChannel channel_;
  std::size_t n_ = 0;
  int m_ = 0;
  int phase_ = 0;
  int refreshed_ = -1;
  bool uniform_shortcut_ = false;
  std::vector<double> pr_;           // (p0, p1) per tree node, heap layout
  std::vector<std::uint8_t> beta_;   // stored even-phase bit per node
  std::vector<std::uint8_t> casc_, casc2_;
};

}  // namespace psc::sc
