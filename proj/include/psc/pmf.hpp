#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psc/rng.hpp"

namespace psc::pmf {

inline constexpr double kMassTol = 1e-12;
inline constexpr double kDefaultIndepTol = 1e-10;  // bits
inline constexpr int kMaxAlphabet = 8;

inline double log2_safe(double x) { return x > 0 ? std::log2(x) : 0.0; }

// Binary entropy in bits.
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Crossover of two cascaded BSCs.
inline double binary_convolve(double a, double b) { return a * (1.0 - b) + (1.0 - a) * b; }

// W(y|u) for binary u and a finite output alphabet. This is the shape every
// successive-cancellation conditioning is fed in: the "decoder side" of a
// test channel, possibly with a product output alphabet.
class BinaryInputChannel {
 public:
  BinaryInputChannel() : outputs_(1), rows_{{1.0}, {1.0}} {}

  BinaryInputChannel(std::vector<double> row0, std::vector<double> row1)
      : outputs_(static_cast<int>(row0.size())), rows_{std::move(row0), std::move(row1)} {
    if (rows_[0].size() != rows_[1].size() || rows_[0].empty())
      throw std::invalid_argument("channel rows must be same nonempty size");
    for (const auto& row : rows_) {
      double sum = 0.0;
      for (double v : row) {
        if (!(v >= 0.0)) throw std::invalid_argument("channel entries must be >= 0");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("channel row must sum to 1");
    }
  }

  static BinaryInputChannel null_channel() { return BinaryInputChannel(); }

  static BinaryInputChannel bsc(double eps) {
    return BinaryInputChannel({1.0 - eps, eps}, {eps, 1.0 - eps});
  }

  static BinaryInputChannel identity() { return bsc(0.0); }

  int outputs() const { return outputs_; }
  double operator()(int y, int u) const { return rows_[u][y]; }
  const std::vector<double>& row(int u) const { return rows_[u]; }

  bool is_null() const { return outputs_ == 1; }

  bool operator==(const BinaryInputChannel& o) const {
    return outputs_ == o.outputs_ && rows_[0] == o.rows_[0] && rows_[1] == o.rows_[1];
  }

 private:
  int outputs_;
  std::vector<double> rows_[2];
};

// d(x, t) >= 0 over source alphabet x reproduction alphabet {0, 1}.
class DistortionMeasure {
 public:
  DistortionMeasure(int src_size, std::vector<double> entries)
      : src_size_(src_size), d_(std::move(entries)) {
    if (src_size_ < 1 || d_.size() != static_cast<std::size_t>(2 * src_size_))
      throw std::invalid_argument("distortion matrix must be src_size x 2");
    for (double v : d_)
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("distortion entries must be finite and >= 0");
  }

  static DistortionMeasure hamming() { return DistortionMeasure(2, {0.0, 1.0, 1.0, 0.0}); }

  double operator()(int x, int t) const { return d_[static_cast<std::size_t>(x) * 2 + t]; }
  int source_size() const { return src_size_; }
  double max_entry() const { return *std::max_element(d_.begin(), d_.end()); }

 private:
  int src_size_;
  std::vector<double> d_;  // row-major, reproduction axis fastest
};

// Conditional distribution P(target | given) as a dense row table. Rows whose
// conditioning event has zero mass are flagged undefined rather than filled.
struct ConditionalTable {
  std::vector<int> given_sizes;
  std::vector<int> target_sizes;
  long n_rows = 0;
  long n_cols = 0;
  std::vector<double> rows;        // n_rows x n_cols, row-major
  std::vector<std::uint8_t> defined;  // per row

  double at(long row, long col) const { return rows[row * n_cols + col]; }

  // Interpret as a channel with binary input (requires exactly one binary
  // given-axis). Undefined rows become uniform: such conditioning events have
  // zero mass, so no expectation changes, and downstream SC code stays NaN-free.
  BinaryInputChannel to_channel() const {
    if (n_rows != 2)
      throw std::invalid_argument("to_channel requires a single binary conditioning axis");
    std::vector<double> r0(rows.begin(), rows.begin() + n_cols);
    std::vector<double> r1(rows.begin() + n_cols, rows.begin() + 2 * n_cols);
    if (!defined[0]) std::fill(r0.begin(), r0.end(), 1.0 / static_cast<double>(n_cols));
    if (!defined[1]) std::fill(r1.begin(), r1.end(), 1.0 / static_cast<double>(n_cols));
    return BinaryInputChannel(std::move(r0), std::move(r1));
  }
};

// Reconstruction map f : A x B -> {0,1}, supplied as a dense table.
struct ReconMap {
  int a_size = 0;
  int b_size = 0;
  std::vector<std::uint8_t> table;  // row-major, b fastest

  ReconMap() = default;
  ReconMap(int a, int b, std::vector<std::uint8_t> t) : a_size(a), b_size(b), table(std::move(t)) {
    if (table.size() != static_cast<std::size_t>(a_size) * b_size)
      throw std::invalid_argument("reconstruction map shape mismatch");
    for (auto v : table)
      if (v > 1) throw std::invalid_argument("reconstruction map values must be bits");
  }

  // f(a, b) = a; the map used by the shipped doubly-symmetric constructions.
  static ReconMap first_arg(int a_size, int b_size) {
    std::vector<std::uint8_t> t(static_cast<std::size_t>(a_size) * b_size);
    for (int a = 0; a < a_size; ++a)
      for (int b = 0; b < b_size; ++b) t[static_cast<std::size_t>(a) * b_size + b] = a & 1;
    return ReconMap(a_size, b_size, std::move(t));
  }

  std::uint8_t operator()(int a, int b) const {
    return table[static_cast<std::size_t>(a) * b_size + b];
  }
};

// Dense joint distribution over named finite alphabets. Immutable after
// construction; row-major storage with the last axis fastest.
class JointPmf {
 public:
  struct Axis {
    std::string name;
    int size;
  };

  JointPmf(std::vector<Axis> axes, std::vector<double> table)
      : axes_(std::move(axes)), table_(std::move(table)) {
    std::size_t cells = 1;
    for (const auto& a : axes_) {
      if (a.size < 1 || a.size > kMaxAlphabet)
        throw std::invalid_argument("axis size out of range [1," +
                                    std::to_string(kMaxAlphabet) + "]: " + a.name);
      for (const auto& b : axes_)
        if (&a != &b && a.name == b.name)
          throw std::invalid_argument("duplicate axis name: " + a.name);
      cells *= static_cast<std::size_t>(a.size);
    }
    if (table_.size() != cells) throw std::invalid_argument("table size does not match axes");
    double total = 0.0;
    for (double v : table_) {
      if (!(v >= 0.0)) throw std::invalid_argument("probability entries must be >= 0");
      total += v;
    }
    if (std::abs(total - 1.0) > kMassTol)
      throw std::invalid_argument("total mass must be 1 within 1e-12");
    strides_.resize(axes_.size());
    std::size_t s = 1;
    for (std::size_t k = axes_.size(); k-- > 0;) {
      strides_[k] = s;
      s *= static_cast<std::size_t>(axes_[k].size);
    }
  }

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t cells() const { return table_.size(); }

  int axis_index(const std::string& name) const {
    for (std::size_t k = 0; k < axes_.size(); ++k)
      if (axes_[k].name == name) return static_cast<int>(k);
    throw std::invalid_argument("unknown axis name: " + name);
  }

  bool has_axis(const std::string& name) const {
    for (const auto& a : axes_)
      if (a.name == name) return true;
    return false;
  }

  int axis_size(const std::string& name) const { return axes_[axis_index(name)].size; }

  double mass(const std::vector<int>& config) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < axes_.size(); ++k) idx += strides_[k] * config[k];
    return table_[idx];
  }

  // Visit every cell; fn(config, p).
  template <typename Fn>
  void for_each(Fn&& fn) const {
    std::vector<int> cfg(axes_.size(), 0);
    for (std::size_t idx = 0; idx < table_.size(); ++idx) {
      fn(cfg, table_[idx]);
      for (std::size_t k = axes_.size(); k-- > 0;) {
        if (++cfg[k] < axes_[k].size) break;
        cfg[k] = 0;
      }
    }
  }

  JointPmf marginalize(const std::vector<std::string>& keep) const {
    std::vector<int> keep_idx = resolve(keep);
    // Result axes follow the joint's declared order.
    std::vector<int> kept;
    for (std::size_t k = 0; k < axes_.size(); ++k)
      if (std::find(keep_idx.begin(), keep_idx.end(), static_cast<int>(k)) != keep_idx.end())
        kept.push_back(static_cast<int>(k));
    std::vector<Axis> out_axes;
    std::vector<std::size_t> out_strides(kept.size());
    std::size_t s = 1;
    for (std::size_t k = kept.size(); k-- > 0;) {
      out_strides[k] = s;
      s *= static_cast<std::size_t>(axes_[kept[k]].size);
    }
    for (int k : kept) out_axes.push_back(axes_[k]);
    std::vector<double> out(s, 0.0);
    for_each([&](const std::vector<int>& cfg, double p) {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < kept.size(); ++k) idx += out_strides[k] * cfg[kept[k]];
      out[idx] += p;
    });
    return JointPmf(std::move(out_axes), std::move(out));
  }

  // P(target | given); axes not mentioned are summed out. The packing order of
  // rows/columns follows the order the names are passed in.
  ConditionalTable conditional(const std::vector<std::string>& target,
                               const std::vector<std::string>& given) const {
    std::vector<int> t_idx = resolve(target);
    std::vector<int> g_idx = resolve(given);
    for (int t : t_idx)
      for (int g : g_idx)
        if (t == g) throw std::invalid_argument("conditional: target and given overlap");
    ConditionalTable ct;
    long n_cols = 1, n_rows = 1;
    for (int t : t_idx) {
      ct.target_sizes.push_back(axes_[t].size);
      n_cols *= axes_[t].size;
    }
    for (int g : g_idx) {
      ct.given_sizes.push_back(axes_[g].size);
      n_rows *= axes_[g].size;
    }
    ct.n_rows = n_rows;
    ct.n_cols = n_cols;
    ct.rows.assign(static_cast<std::size_t>(n_rows) * n_cols, 0.0);
    std::vector<double> row_mass(n_rows, 0.0);
    for_each([&](const std::vector<int>& cfg, double p) {
      long r = 0, c = 0;
      for (int g : g_idx) r = r * axes_[g].size + cfg[g];
      for (int t : t_idx) c = c * axes_[t].size + cfg[t];
      ct.rows[static_cast<std::size_t>(r) * n_cols + c] += p;
      row_mass[r] += p;
    });
    ct.defined.assign(n_rows, 1);
    for (long r = 0; r < n_rows; ++r) {
      if (row_mass[r] <= 0.0) {
        ct.defined[r] = 0;  // zero-mass conditioning event, flagged not filled
        continue;
      }
      for (long c = 0; c < n_cols; ++c) ct.rows[static_cast<std::size_t>(r) * n_cols + c] /= row_mass[r];
    }
    return ct;
  }

  BinaryInputChannel channel(const std::string& input_axis,
                             const std::vector<std::string>& output_axes) const {
    if (axis_size(input_axis) != 2)
      throw std::invalid_argument("channel input axis must be binary: " + input_axis);
    return conditional(output_axes, {input_axis}).to_channel();
  }

  // Shannon entropy of the marginal over `names`, in bits. H() = 0.
  double entropy(const std::vector<std::string>& names) const {
    if (names.empty()) return 0.0;
    JointPmf m = marginalize(names);
    double h = 0.0;
    for (double p : m.table_)
      if (p > 0.0) h -= p * std::log2(p);
    return h;
  }

  // I(A; B | C) in bits; C may be empty. Clamped tiny negatives are the
  // caller's business: the raw value is returned.
  double mutual_information(const std::vector<std::string>& a, const std::vector<std::string>& b,
                            const std::vector<std::string>& c = {}) const {
    check_disjoint(a, b, "mutual_information");
    check_disjoint(a, c, "mutual_information");
    check_disjoint(b, c, "mutual_information");
    std::vector<std::string> ac = concat(a, c), bc = concat(b, c), abc = concat(concat(a, b), c);
    return entropy(ac) + entropy(bc) - entropy(abc) - entropy(c);
  }

  struct MarkovReport {
    bool pass = true;
    double max_violation_bits = 0.0;
  };

  // Chain G1 -> G2 -> ... -> Gk. For every interior group the information
  // between everything before and everything after, conditioned on the group,
  // must vanish; that is exactly the factorization property of the chain.
  MarkovReport check_markov(const std::vector<std::vector<std::string>>& groups,
                            double tol = kDefaultIndepTol) const {
    if (groups.size() < 3) throw std::invalid_argument("check_markov needs at least 3 groups");
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = i + 1; j < groups.size(); ++j)
        check_disjoint(groups[i], groups[j], "check_markov");
    MarkovReport rep;
    for (std::size_t k = 1; k + 1 < groups.size(); ++k) {
      std::vector<std::string> left, right;
      for (std::size_t i = 0; i < k; ++i) left = concat(left, groups[i]);
      for (std::size_t i = k + 1; i < groups.size(); ++i) right = concat(right, groups[i]);
      double v = mutual_information(left, right, groups[k]);
      rep.max_violation_bits = std::max(rep.max_violation_bits, v);
    }
    rep.pass = rep.max_violation_bits <= tol;
    return rep;
  }

  double expected_distortion(const std::string& src_axis, const std::string& rep_axis,
                             const DistortionMeasure& d) const {
    int xs = axis_index(src_axis), ts = axis_index(rep_axis);
    if (axes_[xs].size != d.source_size() || axes_[ts].size != 2)
      throw std::invalid_argument("distortion matrix shape mismatch");
    double acc = 0.0;
    for_each([&](const std::vector<int>& cfg, double p) { acc += p * d(cfg[xs], cfg[ts]); });
    return acc;
  }

  // E d(X, f(A, B)) for a reconstruction map applied cellwise.
  double expected_map_distortion(const std::string& src_axis, const std::string& a_axis,
                                 const std::string& b_axis, const ReconMap& f,
                                 const DistortionMeasure& d) const {
    int xs = axis_index(src_axis), as = axis_index(a_axis), bs = axis_index(b_axis);
    if (axes_[as].size != f.a_size || axes_[bs].size != f.b_size)
      throw std::invalid_argument("reconstruction map shape mismatch");
    if (axes_[xs].size != d.source_size())
      throw std::invalid_argument("distortion matrix shape mismatch");
    double acc = 0.0;
    for_each([&](const std::vector<int>& cfg, double p) {
      acc += p * d(cfg[xs], f(cfg[as], cfg[bs]));
    });
    return acc;
  }

  // Inverse-CDF sampler for the marginal over `names` (in that order).
  class Sampler {
   public:
    Sampler(const JointPmf& j, const std::vector<std::string>& names) {
      JointPmf m = j.marginalize(names);
      // marginalize() keeps the joint's axis order; re-pack to the caller's.
      std::vector<int> order;
      for (const auto& nm : names) order.push_back(m.axis_index(nm));
      sizes_.resize(names.size());
      for (std::size_t k = 0; k < names.size(); ++k) sizes_[k] = m.axes()[order[k]].size;
      cum_.reserve(m.cells());
      configs_.reserve(m.cells());
      double acc = 0.0;
      m.for_each([&](const std::vector<int>& cfg, double p) {
        acc += p;
        cum_.push_back(acc);
        std::vector<int> packed(names.size());
        for (std::size_t k = 0; k < names.size(); ++k) packed[k] = cfg[order[k]];
        configs_.push_back(std::move(packed));
      });
      if (!cum_.empty()) cum_.back() = 1.0;
    }

    const std::vector<int>& draw(Rng& rng) const {
      double u = rng.uniform01();
      std::size_t lo = 0, hi = cum_.size() - 1;
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (cum_[mid] > u)
          hi = mid;
        else
          lo = mid + 1;
      }
      return configs_[lo];
    }

    const std::vector<int>& sizes() const { return sizes_; }

   private:
    std::vector<double> cum_;
    std::vector<std::vector<int>> configs_;
    std::vector<int> sizes_;
  };

  Sampler sampler(const std::vector<std::string>& names) const { return Sampler(*this, names); }

  // Marginal over `names`, re-packed row-major in exactly that order.
  std::vector<double> table_in_order(const std::vector<std::string>& names) const {
    std::vector<int> idx = resolve(names);
    std::vector<std::size_t> strides(names.size());
    std::size_t cells = 1;
    for (std::size_t k = names.size(); k-- > 0;) {
      strides[k] = cells;
      cells *= static_cast<std::size_t>(axes_[idx[k]].size);
    }
    std::vector<double> out(cells, 0.0);
    for_each([&](const std::vector<int>& cfg, double p) {
      std::size_t pos = 0;
      for (std::size_t k = 0; k < names.size(); ++k) pos += strides[k] * cfg[idx[k]];
      out[pos] += p;
    });
    return out;
  }

  // FNV-1a over a canonical rendering; used as cache key material.
  std::uint64_t digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](const char* data, std::size_t len) {
      for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
      }
    };
    for (const auto& a : axes_) {
      eat(a.name.data(), a.name.size());
      char buf[16];
      int len = std::snprintf(buf, sizeof buf, ":%d;", a.size);
      eat(buf, static_cast<std::size_t>(len));
    }
    for (double v : table_) {
      char buf[40];
      int len = std::snprintf(buf, sizeof buf, "%a,", v);
      eat(buf, static_cast<std::size_t>(len));
    }
    return h;
  }

 private:
  std::vector<int> resolve(const std::vector<std::string>& names) const {
    std::vector<int> idx;
    idx.reserve(names.size());
    for (const auto& nm : names) idx.push_back(axis_index(nm));
    return idx;
  }

  static std::vector<std::string> concat(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b) {
    std::vector<std::string> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }

  void check_disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b,
                      const char* where) const {
    for (const auto& x : a)
      for (const auto& y : b)
        if (x == y) throw std::invalid_argument(std::string(where) + ": axis sets overlap: " + x);
  }

  std::vector<Axis> axes_;
  std::vector<double> table_;
  std::vector<std::size_t> strides_;
};

// ---- Shipped source/test-channel builders ---------------------------------

// Binary symmetric source with backward test channel at distortion D:
// T ~ Bern(1/2), X = T xor Bern(D). Axes (T, X).
inline JointPmf build_bss_rd(double distortion) {
  if (!(distortion > 0.0 && distortion < 0.5))
    throw std::domain_error("build_bss_rd: D must lie in (0, 1/2)");
  double D = distortion;
  std::vector<double> t = {(1 - D) / 2, D / 2, D / 2, (1 - D) / 2};
  return JointPmf({{"T", 2}, {"X", 2}}, std::move(t));
}

// Two-layer refinement joint: W ~ Bern(1/2), X = W xor Bern(D2),
// T = W xor Bern(delta) with delta chosen so that E d(X,T) = D1.
// Axes (T, W, X); the chain X -> W -> T holds by construction.
// D1 = D2 is the degenerate refinement T = W.
inline JointPmf build_bss_sr(double d1, double d2) {
  if (!(d2 > 0.0 && d2 <= d1 && d1 < 0.5))
    throw std::domain_error("build_bss_sr: need 0 < D2 <= D1 < 1/2");
  double delta = (d1 - d2) / (1.0 - 2.0 * d2);
  std::vector<double> table(8, 0.0);
  for (int t = 0; t < 2; ++t)
    for (int w = 0; w < 2; ++w)
      for (int x = 0; x < 2; ++x) {
        double p = 0.5;
        p *= (t == w) ? (1.0 - delta) : delta;
        p *= (x == w) ? (1.0 - d2) : d2;
        table[static_cast<std::size_t>(t) * 4 + w * 2 + x] = p;
      }
  return JointPmf({{"T", 2}, {"W", 2}, {"X", 2}}, std::move(table));
}

// Doubly symmetric binary source with side information:
// T ~ Bern(1/2), X = T xor Bern(D), Z = X xor Bern(p). Axes (T, X, Z).
// The shipped reconstruction is f(t, z) = t.
struct WzConstruction {
  JointPmf joint;
  ReconMap f;
};

inline WzConstruction build_dsbs_wz(double distortion, double side_noise) {
  if (!(distortion > 0.0 && distortion < 0.5))
    throw std::domain_error("build_dsbs_wz: D must lie in (0, 1/2)");
  if (!(side_noise > 0.0 && side_noise < 0.5))
    throw std::domain_error("build_dsbs_wz: p must lie in (0, 1/2)");
  double D = distortion, p = side_noise;
  std::vector<double> table(8, 0.0);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < 2; ++x)
      for (int z = 0; z < 2; ++z) {
        double q = 0.5;
        q *= (x == t) ? (1.0 - D) : D;
        q *= (z == x) ? (1.0 - p) : p;
        table[static_cast<std::size_t>(t) * 4 + x * 2 + z] = q;
      }
  return {JointPmf({{"T", 2}, {"X", 2}, {"Z", 2}}, std::move(table)), ReconMap::first_arg(2, 2)};
}

// Degraded-side-information quintuple built from the refinement joint:
// Y is a copy of X and Z is a constant. Satisfies the two chain conditions
// of the refinement-with-side-information setting (conditions on the joint),
// but not the coarse-side independence condition, which the validator reports.
struct SrwzConstruction {
  JointPmf joint;
  ReconMap f1;  // (T, Z) -> reproduction
  ReconMap f2;  // (W, Y) -> reproduction
};

inline SrwzConstruction build_srwz_degenerate(double d1, double d2) {
  JointPmf base = build_bss_sr(d1, d2);  // axes T, W, X
  std::vector<double> table(2 * 2 * 2 * 2 * 1, 0.0);
  base.for_each([&](const std::vector<int>& cfg, double p) {
    int t = cfg[0], w = cfg[1], x = cfg[2];
    int y = x, z = 0;
    table[(((static_cast<std::size_t>(t) * 2 + w) * 2 + x) * 2 + y) * 1 + z] = p;
  });
  JointPmf joint({{"T", 2}, {"W", 2}, {"X", 2}, {"Y", 2}, {"Z", 1}}, std::move(table));
  ReconMap f1 = ReconMap::first_arg(2, 1);
  ReconMap f2 = ReconMap::first_arg(2, 2);
  return {std::move(joint), std::move(f1), std::move(f2)};
}

// ---- Text-file joint format -------------------------------------------------
//
//   # comment
//   axis T 2
//   axis X 2
//   table
//   0.445 0.055 0.055 0.445
//
// Probabilities are row-major in axis declaration order, last axis fastest.

inline JointPmf load_joint_text(std::istream& in) {
  std::vector<JointPmf::Axis> axes;
  std::vector<double> table;
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (!in_table && tok == "axis") {
      std::string name;
      int size = 0;
      if (!(ls >> name >> size)) throw std::invalid_argument("malformed axis declaration");
      axes.push_back({name, size});
    } else if (!in_table && tok == "table") {
      in_table = true;
    } else {
      // Numbers may start right away or follow the "table" keyword.
      in_table = true;
      std::istringstream rest(line);
      double v;
      while (rest >> v) table.push_back(v);
    }
  }
  if (axes.empty()) throw std::invalid_argument("joint file declares no axes");
  return JointPmf(std::move(axes), std::move(table));
}

inline JointPmf load_joint_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open joint file: " + path);
  return load_joint_text(in);
}

inline void save_joint_text(const JointPmf& j, std::ostream& out) {
  for (const auto& a : j.axes()) out << "axis " << a.name << ' ' << a.size << '\n';
  out << "table\n";
  char buf[40];
  for (std::size_t i = 0; i < j.table().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", j.table()[i]);
    out << buf << ((i + 1) % 8 == 0 ? '\n' : ' ');
  }
  out << '\n';
}

// ---- Degraded-side-information validation report ----------------------------

struct SrwzCheck {
  std::string name;
  double residual = 0.0;
  bool pass = true;
};

struct SrwzReport {
  std::vector<SrwzCheck> checks;
  double i_xt_given_z = 0.0;  // reported value for condition 1 (not certified optimal)
  double i_xw_given_y = 0.0;  // reported value for condition 2
  bool conditions_34_pass = true;
  bool all_pass = true;
};

inline SrwzReport validate_srwz_conditions(const JointPmf& j, const ReconMap& f1,
                                           const ReconMap& f2, double d1, double d2,
                                           double tol = kDefaultIndepTol,
                                           const DistortionMeasure& d = DistortionMeasure::hamming()) {
  for (const char* nm : {"T", "W", "X", "Y", "Z"})
    if (!j.has_axis(nm)) throw std::invalid_argument(std::string("missing axis: ") + nm);
  SrwzReport rep;
  auto add = [&rep](const std::string& name, double residual, bool pass) {
    rep.checks.push_back({name, residual, pass});
    rep.all_pass = rep.all_pass && pass;
  };

  double ed1 = j.expected_map_distortion("X", "T", "Z", f1, d);
  add("E d(X, f1(T,Z)) <= D1", ed1 - d1, ed1 <= d1 + tol);
  rep.i_xt_given_z = j.mutual_information({"X"}, {"T"}, {"Z"});

  double ed2 = j.expected_map_distortion("X", "W", "Y", f2, d);
  add("E d(X, f2(W,Y)) <= D2", ed2 - d2, ed2 <= d2 + tol);
  rep.i_xw_given_y = j.mutual_information({"X"}, {"W"}, {"Y"});

  auto m3 = j.check_markov({{"T", "W"}, {"X"}, {"Y"}, {"Z"}}, tol);
  add("(T,W) -> X -> Y -> Z", m3.max_violation_bits, m3.pass);
  auto m4 = j.check_markov({{"T"}, {"W", "Y"}, {"X"}}, tol);
  add("T -> (W,Y) -> X", m4.max_violation_bits, m4.pass);
  rep.conditions_34_pass = m3.pass && m4.pass;

  double ityz = j.mutual_information({"T"}, {"Y"}, {"Z"});
  add("I(T;Y|Z) = 0", ityz, ityz <= tol);
  return rep;
}

}  // namespace psc::pmf
