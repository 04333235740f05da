#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "psc/pmf.hpp"

namespace psc::sc {

// Everything in this header defines correctness by brute force. It shares no
// code with the SC engine or the butterfly transform: the polarizing matrix is
// constructed entry by entry and applied by naive multiplication, so an
// index-ordering bug in the fast paths cannot hide here.

inline constexpr int kOracleMaxN = 16;

namespace oracle_detail {

inline int naive_log2(std::size_t n) {
  int m = 0;
  while ((std::size_t{1} << m) < n) ++m;
  if ((std::size_t{1} << m) != n) throw std::invalid_argument("n must be a power of two");
  return m;
}

inline std::size_t reverse_bits(std::size_t v, int m) {
  std::size_t r = 0;
  for (int b = 0; b < m; ++b)
    if (v & (std::size_t{1} << b)) r |= std::size_t{1} << (m - 1 - b);
  return r;
}

}  // namespace oracle_detail

// Rows of G_n = B_n F^{x m} as n-bit masks; bit j of row i is G[i][j],
// with F^{x m}[i][j] = 1 iff the binary expansion of j is contained in i.
inline std::vector<std::uint32_t> naive_gn_rows(int n) {
  if (n < 1 || n > (1 << kOracleMaxN)) throw std::invalid_argument("oracle: n out of range");
  int m = oracle_detail::naive_log2(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> rows(n, 0);
  for (int i = 0; i < n; ++i) {
    std::size_t ri = oracle_detail::reverse_bits(static_cast<std::size_t>(i), m);
    for (int j = 0; j < n; ++j)
      if ((static_cast<std::size_t>(j) & ri) == static_cast<std::size_t>(j))
        rows[i] |= 1u << j;
  }
  return rows;
}

// x * G_n by naive row accumulation; x and the result are bit vectors.
inline std::vector<std::uint8_t> naive_transform(const std::vector<std::uint8_t>& x) {
  int n = static_cast<int>(x.size());
  auto rows = naive_gn_rows(n);
  std::uint32_t acc = 0;
  for (int i = 0; i < n; ++i)
    if (x[i]) acc ^= rows[i];
  std::vector<std::uint8_t> out(n);
  for (int j = 0; j < n; ++j) out[j] = (acc >> j) & 1;
  return out;
}

// Joint table P(u^n = *, weights) for one fixed observation sequence:
// tbl[pack(u)] = sum over t^n consistent with u = t G_n of prod_j w_j(t_j).
// pack(u) places u_0 in the most significant bit so prefixes are index blocks.
inline std::vector<double> oracle_joint_table(int n,
                                              const std::function<double(int pos, int t)>& w) {
  auto rows = naive_gn_rows(n);
  std::vector<double> tbl(std::size_t{1} << n, 0.0);
  for (std::uint32_t t = 0; t < (std::uint32_t{1} << n); ++t) {
    double mass = 1.0;
    std::uint32_t u_mask = 0;
    for (int j = 0; j < n; ++j) {
      int tj = (t >> j) & 1;
      mass *= w(j, tj);
      if (tj) u_mask ^= rows[j];
    }
    if (mass == 0.0) continue;
    std::size_t idx = 0;
    for (int j = 0; j < n; ++j) idx |= static_cast<std::size_t>((u_mask >> j) & 1) << (n - 1 - j);
    tbl[idx] += mass;
  }
  return tbl;
}

// Block sums of a joint table at every prefix granularity, heap layout:
// level k (0..n) holds 2^k entries at offset 2^k - 1; level n is the table.
struct PrefixSums {
  int n = 0;
  std::vector<double> s;

  explicit PrefixSums(const std::vector<double>& tbl) {
    std::size_t cells = tbl.size();
    n = oracle_detail::naive_log2(cells);
    s.assign(2 * cells - 1, 0.0);
    std::copy(tbl.begin(), tbl.end(), s.begin() + (cells - 1));
    for (std::size_t k = cells - 1; k-- > 0;) s[k] = s[2 * k + 1] + s[2 * k + 2];
  }

  double total() const { return s[0]; }

  // (P(prefix,0,.), P(prefix,1,.)) for a 0-based index i and i-bit prefix.
  std::pair<double, double> pair_at(int i, std::size_t prefix) const {
    std::size_t node = (std::size_t{1} << i) - 1 + prefix;  // level i node
    return {s[2 * node + 1], s[2 * node + 2]};
  }

  std::pair<double, double> cond_at(int i, std::size_t prefix) const {
    auto [a, b] = pair_at(i, prefix);
    double t = a + b;
    if (!(t > 0.0)) return {0.5, 0.5};
    return {a / t, b / t};
  }

  int argmax_at(int i, std::size_t prefix) const {
    auto [a, b] = pair_at(i, prefix);
    return b > a ? 1 : 0;  // ties to 0
  }
};

namespace oracle_detail {

// Enumerate observation sequences o^n over an alphabet of size M.
template <typename Fn>
void for_each_sequence(int n, int M, Fn&& fn) {
  std::vector<std::uint8_t> o(n, 0);
  for (;;) {
    fn(o);
    int k = n - 1;
    while (k >= 0 && ++o[k] == M) o[k--] = 0;
    if (k < 0) return;
  }
}

inline void check_cost(int n, int M, const char* what) {
  if (n > 8) throw std::invalid_argument(std::string(what) + ": n too large (max 8)");
  double cost = std::pow(static_cast<double>(M), n) * std::ldexp(1.0, n) * n;
  if (cost > 6.0e9) throw std::invalid_argument(std::string(what) + ": alphabet too large for exact enumeration");
}

}  // namespace oracle_detail

// Exact posterior P(U_i = a | u^{i-1}, y^n) by direct summation over t^n.
// The index is prefix.size() (0-based).
inline std::pair<double, double> oracle_posterior(double prior1,
                                                  const pmf::BinaryInputChannel& ch,
                                                  const std::vector<std::uint8_t>& obs,
                                                  const std::vector<std::uint8_t>& prefix) {
  int n = static_cast<int>(obs.size());
  if (n > kOracleMaxN) throw std::invalid_argument("oracle_posterior: n too large (max 16)");
  int i = static_cast<int>(prefix.size());
  if (i >= n) throw std::invalid_argument("oracle_posterior: prefix covers all indices");
  auto tbl = oracle_joint_table(n, [&](int pos, int t) {
    return (t ? prior1 : 1.0 - prior1) * ch(obs[pos], t);
  });
  std::size_t p = 0;
  for (int k = 0; k < i; ++k) p = (p << 1) | prefix[k];
  PrefixSums ps(tbl);
  return ps.cond_at(i, p);
}

// Exact Z(U_i | U^{i-1}, Y^n) for every index at once, by enumerating y^n.
inline std::vector<double> oracle_z_profile(double prior1, const pmf::BinaryInputChannel& ch,
                                            int n) {
  oracle_detail::check_cost(n, ch.outputs(), "oracle_z_profile");
  std::vector<double> z(n, 0.0);
  oracle_detail::for_each_sequence(n, ch.outputs(), [&](const std::vector<std::uint8_t>& y) {
    auto tbl = oracle_joint_table(n, [&](int pos, int t) {
      return (t ? prior1 : 1.0 - prior1) * ch(y[pos], t);
    });
    PrefixSums ps(tbl);
    for (int i = 0; i < n; ++i)
      for (std::size_t p = 0; p < (std::size_t{1} << i); ++p) {
        auto [a, b] = ps.pair_at(i, p);
        z[i] += 2.0 * std::sqrt(a * b);
      }
  });
  return z;
}

inline double oracle_bhattacharyya(double prior1, const pmf::BinaryInputChannel& ch, int index,
                                   int n) {
  if (index < 0 || index >= n) throw std::invalid_argument("oracle_bhattacharyya: bad index");
  return oracle_z_profile(prior1, ch, n)[index];
}

// Disjoint cover of [0, n) into frozen / deterministic / information indices,
// as membership classes.
enum class IndexClass : std::uint8_t { kFrozen = 0, kDeterministic = 1, kInformation = 2 };

inline std::vector<IndexClass> classes_from_sets(int n, const std::vector<int>& h,
                                                 const std::vector<int>& l,
                                                 const std::vector<int>& i) {
  std::vector<IndexClass> cls(n, IndexClass::kInformation);
  std::vector<int> seen(n, 0);
  auto mark = [&](const std::vector<int>& set, IndexClass c) {
    for (int idx : set) {
      if (idx < 0 || idx >= n) throw std::invalid_argument("index set out of range");
      if (seen[idx]++) throw std::invalid_argument("index sets overlap");
      cls[idx] = c;
    }
  };
  mark(h, IndexClass::kFrozen);
  mark(l, IndexClass::kDeterministic);
  mark(i, IndexClass::kInformation);
  for (int k = 0; k < n; ++k)
    if (!seen[k]) throw std::invalid_argument("index sets do not cover [n]");
  return cls;
}

struct L1GapResult {
  double l1_exact = 0.0;       // sum |P - Q| over the full joint
  double bound = 0.0;          // sum_L Z(.|L-rule view) + sum_H 2 sqrt(1/2 - Z(.|full view)/2)
  double e_dist_p = 0.0;       // E_P of the per-letter average distortion
  double e_dist_q = 0.0;       // E_Q of the same
};

// Exact total-variation machinery for one coding layer. The encoder-induced
// law Q draws frozen indices uniformly, samples information indices from the
// conditional given the full observation, and resolves deterministic indices
// by argmax of the conditional given the coarsened observation sigma(o).
//
// `letter_distortion(o, rep)` gives d for one position; pass nullptr to skip
// the distortion accounting.
inline L1GapResult oracle_l1_gap(double prior1, const pmf::BinaryInputChannel& ch_full,
                                 const std::vector<std::uint8_t>& sigma,
                                 const std::vector<IndexClass>& cls, int n,
                                 const std::function<double(int obs, int rep)>& letter_distortion) {
  int M = ch_full.outputs();
  if (static_cast<int>(sigma.size()) != M)
    throw std::invalid_argument("oracle_l1_gap: sigma must map the full observation alphabet");
  oracle_detail::check_cost(n, M, "oracle_l1_gap");
  int ml = 0;
  for (int s : sigma) ml = std::max(ml, s + 1);

  // Coarsened channel for the deterministic rule.
  std::vector<double> r0(ml, 0.0), r1(ml, 0.0);
  for (int y = 0; y < M; ++y) {
    r0[sigma[y]] += ch_full(y, 0);
    r1[sigma[y]] += ch_full(y, 1);
  }
  pmf::BinaryInputChannel ch_l(r0, r1);

  L1GapResult res;
  // Bound from exact Bhattacharyya parameters of the two conditionings.
  std::vector<double> z_l = oracle_z_profile(prior1, ch_l, n);
  std::vector<double> z_full = oracle_z_profile(prior1, ch_full, n);
  for (int i = 0; i < n; ++i) {
    if (cls[i] == IndexClass::kDeterministic) res.bound += z_l[i];
    if (cls[i] == IndexClass::kFrozen)
      res.bound += 2.0 * std::sqrt(std::max(0.0, 0.5 - 0.5 * z_full[i]));
  }

  // Prefix tables for every coarsened observation sequence. When sigma is the
  // identity the deterministic rule sees the full observation and the main
  // table serves directly.
  bool sigma_identity = ml == M;
  if (sigma_identity)
    for (int y = 0; y < M; ++y)
      if (sigma[y] != y) sigma_identity = false;
  std::vector<PrefixSums> l_tables;
  if (!sigma_identity) {
    std::size_t ml_seqs = 1;
    for (int k = 0; k < n; ++k) ml_seqs *= static_cast<std::size_t>(ml);
    l_tables.reserve(ml_seqs);
    oracle_detail::for_each_sequence(n, ml, [&](const std::vector<std::uint8_t>& s) {
      l_tables.emplace_back(oracle_joint_table(n, [&](int pos, int t) {
        return (t ? prior1 : 1.0 - prior1) * ch_l(s[pos], t);
      }));
    });
  }

  auto rows = naive_gn_rows(n);
  oracle_detail::for_each_sequence(n, M, [&](const std::vector<std::uint8_t>& o) {
    auto tbl = oracle_joint_table(n, [&](int pos, int t) {
      return (t ? prior1 : 1.0 - prior1) * ch_full(o[pos], t);
    });
    PrefixSums ps(tbl);
    double p_obs = ps.total();
    std::size_t l_key = 0;
    if (!sigma_identity)
      for (int k = 0; k < n; ++k) l_key = l_key * ml + sigma[o[k]];
    const PrefixSums& lt = sigma_identity ? ps : l_tables[l_key];

    for (std::size_t u = 0; u < (std::size_t{1} << n); ++u) {
      double q = p_obs;
      std::size_t prefix = 0;
      for (int i = 0; i < n && q > 0.0; ++i) {
        int bit = static_cast<int>((u >> (n - 1 - i)) & 1);
        switch (cls[i]) {
          case IndexClass::kFrozen:
            q *= 0.5;
            break;
          case IndexClass::kInformation: {
            auto [c0, c1] = ps.cond_at(i, prefix);
            q *= bit ? c1 : c0;
            break;
          }
          case IndexClass::kDeterministic:
            if (bit != lt.argmax_at(i, prefix)) q = 0.0;
            break;
        }
        prefix = (prefix << 1) | static_cast<std::size_t>(bit);
      }
      double p = tbl[u];
      res.l1_exact += std::abs(p - q);
      if (letter_distortion && (p > 0.0 || q > 0.0)) {
        // Reproduction sequence t = u G_n, recovered bit by bit.
        std::uint32_t t_mask = 0;
        for (int i = 0; i < n; ++i)
          if ((u >> (n - 1 - i)) & 1) t_mask ^= rows[i];
        double dbar = 0.0;
        for (int j = 0; j < n; ++j)
          dbar += letter_distortion(o[j], static_cast<int>((t_mask >> j) & 1));
        dbar /= n;
        res.e_dist_p += p * dbar;
        res.e_dist_q += q * dbar;
      }
    }
  });
  return res;
}

struct MismatchResult {
  double p_mismatch = 0.0;  // P(some deterministic index disagrees on the true path)
  double bound = 0.0;       // sum_L [ Z(.|enc view) + Z(.|dec view) ]
};

// Exact probability, under the true joint, that the encoder-side and
// decoder-side argmax rules disagree at some deterministic index along the
// true path. p_vab[v][a][b] is the per-position joint of the code variable
// and the two observation symbols.
inline MismatchResult oracle_rule_mismatch(const std::vector<double>& p_vab, int ma, int mb,
                                           const std::vector<IndexClass>& cls, int n) {
  if (p_vab.size() != static_cast<std::size_t>(2 * ma * mb))
    throw std::invalid_argument("oracle_rule_mismatch: joint shape mismatch");
  // Support of the observation pair; enumeration cost scales with its size.
  std::vector<std::pair<int, int>> support;
  for (int a = 0; a < ma; ++a)
    for (int b = 0; b < mb; ++b)
      if (p_vab[static_cast<std::size_t>(0) * ma * mb + a * mb + b] +
              p_vab[static_cast<std::size_t>(1) * ma * mb + a * mb + b] >
          0.0)
        support.emplace_back(a, b);
  oracle_detail::check_cost(n, static_cast<int>(support.size()), "oracle_rule_mismatch");

  auto p3 = [&](int v, int a, int b) {
    return p_vab[static_cast<std::size_t>(v) * ma * mb + a * mb + b];
  };
  auto pa = [&](int v, int a) {
    double s = 0.0;
    for (int b = 0; b < mb; ++b) s += p3(v, a, b);
    return s;
  };
  auto pb = [&](int v, int b) {
    double s = 0.0;
    for (int a = 0; a < ma; ++a) s += p3(v, a, b);
    return s;
  };

  MismatchResult res;
  {
    std::vector<double> ra0(ma), ra1(ma), rb0(mb), rb1(mb);
    double m0 = 0.0, m1 = 0.0;
    for (int a = 0; a < ma; ++a) {
      m0 += pa(0, a);
      m1 += pa(1, a);
    }
    for (int a = 0; a < ma; ++a) {
      ra0[a] = m0 > 0 ? pa(0, a) / m0 : 1.0 / ma;
      ra1[a] = m1 > 0 ? pa(1, a) / m1 : 1.0 / ma;
    }
    for (int b = 0; b < mb; ++b) {
      rb0[b] = m0 > 0 ? pb(0, b) / m0 : 1.0 / mb;
      rb1[b] = m1 > 0 ? pb(1, b) / m1 : 1.0 / mb;
    }
    double prior1 = m1;
    auto za = oracle_z_profile(prior1, pmf::BinaryInputChannel(ra0, ra1), n);
    auto zb = oracle_z_profile(prior1, pmf::BinaryInputChannel(rb0, rb1), n);
    for (int i = 0; i < n; ++i)
      if (cls[i] == IndexClass::kDeterministic) res.bound += za[i] + zb[i];
  }

  // Enumerate joint observation pairs over the support, then true paths.
  int msupp = static_cast<int>(support.size());
  oracle_detail::for_each_sequence(n, msupp, [&](const std::vector<std::uint8_t>& idx) {
    auto tbl_ab = oracle_joint_table(n, [&](int pos, int t) {
      auto [a, b] = support[idx[pos]];
      return p3(t, a, b);
    });
    auto tbl_a = oracle_joint_table(n, [&](int pos, int t) { return pa(t, support[idx[pos]].first); });
    auto tbl_b = oracle_joint_table(n, [&](int pos, int t) { return pb(t, support[idx[pos]].second); });
    PrefixSums psa(tbl_a), psb(tbl_b);
    for (std::size_t u = 0; u < (std::size_t{1} << n); ++u) {
      double mass = tbl_ab[u];
      if (mass == 0.0) continue;
      std::size_t prefix = 0;
      for (int i = 0; i < n; ++i) {
        if (cls[i] == IndexClass::kDeterministic &&
            psa.argmax_at(i, prefix) != psb.argmax_at(i, prefix)) {
          res.p_mismatch += mass;
          break;
        }
        prefix = (prefix << 1) | ((u >> (n - 1 - i)) & 1);
      }
    }
  });
  return res;
}

}  // namespace psc::sc
