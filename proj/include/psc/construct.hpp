#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psc/parallel.hpp"
#include "psc/pmf.hpp"
#include "psc/rng.hpp"
#include "psc/sc.hpp"
#include "psc/sc_oracle.hpp"
#include "psc/xform.hpp"

namespace psc::construct {

using pmf::BinaryInputChannel;

struct ZProfile {
  int n = 0;
  std::vector<double> z;       // estimates, clamped to [0, 1]
  std::vector<double> stderr_; // standard error of each estimate
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

// MC samples are processed in fixed chunks of 1024 with per-chunk derived
// seeds; chunk partials are merged in chunk order, so the estimates are a pure
// function of (seed, samples) regardless of thread count.
inline constexpr std::int64_t kChunkSamples = 1024;

struct ZProfilePair {
  ZProfile enc;  // conditioned on the encoder-side observations
  ZProfile dec;  // conditioned on the decoder-side observations
};

namespace detail {

struct ChunkAccum {
  std::vector<double> enc_sum, enc_sq, dec_sum, dec_sq;
};

inline void finalize(ZProfile& p, const std::vector<double>& sum, const std::vector<double>& sq,
                     std::int64_t samples) {
  int n = p.n;
  p.z.resize(n);
  p.stderr_.resize(n);
  for (int i = 0; i < n; ++i) {
    double mean = sum[i] / static_cast<double>(samples);
    double var = 0.0;
    if (samples > 1)
      var = std::max(0.0, (sq[i] - sum[i] * sum[i] / static_cast<double>(samples)) /
                              static_cast<double>(samples - 1));
    p.z[i] = std::clamp(mean, 0.0, 1.0);
    p.stderr_[i] = std::sqrt(var / static_cast<double>(samples));
  }
}

}  // namespace detail

// One SC pass per sample and per conditioning, feeding the true bits; the
// per-index statistic 2 sqrt(p0 p1) averages to the Bhattacharyya parameter
// because the fed path is distributed exactly as P_{U^n, Y^n}.
inline ZProfilePair estimate_z_profiles(double prior1, const BinaryInputChannel& ch_enc,
                                        const BinaryInputChannel& ch_dec, int n,
                                        std::int64_t samples, std::uint64_t seed,
                                        int threads = 1) {
  if (samples < 1) throw std::invalid_argument("estimate_z_profiles: samples must be >= 1");
  (void)xform::log2_exact(static_cast<std::size_t>(n));

  ZProfilePair out;
  out.enc.n = out.dec.n = n;
  out.enc.samples = out.dec.samples = samples;
  out.enc.seed = out.dec.seed = seed;

  // A null conditioning with a uniform prior pins every posterior at
  // (1/2, 1/2); the statistic is identically 1 and sampling adds nothing.
  bool enc_trivial = ch_enc.is_null() && prior1 == 0.5;
  bool dec_trivial = ch_dec.is_null() && prior1 == 0.5;
  if (enc_trivial) {
    out.enc.z.assign(n, 1.0);
    out.enc.stderr_.assign(n, 0.0);
  }
  if (dec_trivial) {
    out.dec.z.assign(n, 1.0);
    out.dec.stderr_.assign(n, 0.0);
  }
  if (enc_trivial && dec_trivial) return out;

  std::size_t chunks = static_cast<std::size_t>((samples + kChunkSamples - 1) / kChunkSamples);
  std::vector<detail::ChunkAccum> partials(chunks);

  // Cumulative channel rows for observation sampling.
  auto cum_rows = [](const BinaryInputChannel& ch) {
    std::array<std::vector<double>, 2> c;
    for (int u = 0; u < 2; ++u) {
      double acc = 0.0;
      for (int y = 0; y < ch.outputs(); ++y) {
        acc += ch(y, u);
        c[u].push_back(acc);
      }
      c[u].back() = 1.0;
    }
    return c;
  };
  auto cum_enc = cum_rows(ch_enc);
  auto cum_dec = cum_rows(ch_dec);
  auto draw_sym = [](const std::vector<double>& cum, double x) {
    std::size_t lo = 0, hi = cum.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cum[mid] > x)
        hi = mid;
      else
        lo = mid + 1;
    }
    return static_cast<std::uint8_t>(lo);
  };

  parallel_for(chunks, threads, [&](std::size_t c) {
    std::int64_t begin = static_cast<std::int64_t>(c) * kChunkSamples;
    std::int64_t end = std::min(samples, begin + kChunkSamples);
    Rng rng(derive_seed(seed, c, 0, StreamRole::kConstruction));
    detail::ChunkAccum acc;
    if (!enc_trivial) {
      acc.enc_sum.assign(n, 0.0);
      acc.enc_sq.assign(n, 0.0);
    }
    if (!dec_trivial) {
      acc.dec_sum.assign(n, 0.0);
      acc.dec_sq.assign(n, 0.0);
    }
    xform::BitVec t(n), u;
    std::vector<std::uint8_t> obs_enc(n), obs_dec(n);
    std::optional<sc::ScSession> se, sd;
    for (std::int64_t s = begin; s < end; ++s) {
      for (int j = 0; j < n; ++j) t[j] = static_cast<std::uint8_t>(rng.bit(prior1));
      if (!enc_trivial)
        for (int j = 0; j < n; ++j) obs_enc[j] = draw_sym(cum_enc[t[j]], rng.uniform01());
      if (!dec_trivial)
        for (int j = 0; j < n; ++j) obs_dec[j] = draw_sym(cum_dec[t[j]], rng.uniform01());
      u = t;
      xform::polar_transform_inplace(u);
      if (!enc_trivial) {
        if (!se)
          se.emplace(prior1, ch_enc, obs_enc);
        else
          se->reset(obs_enc);
        for (int i = 0; i < n; ++i) {
          auto [p0, p1] = se->next_posterior();
          double v = 2.0 * std::sqrt(p0 * p1);
          acc.enc_sum[i] += v;
          acc.enc_sq[i] += v * v;
          se->feed(u[i]);
        }
      }
      if (!dec_trivial) {
        if (!sd)
          sd.emplace(prior1, ch_dec, obs_dec);
        else
          sd->reset(obs_dec);
        for (int i = 0; i < n; ++i) {
          auto [p0, p1] = sd->next_posterior();
          double v = 2.0 * std::sqrt(p0 * p1);
          acc.dec_sum[i] += v;
          acc.dec_sq[i] += v * v;
          sd->feed(u[i]);
        }
      }
    }
    partials[c] = std::move(acc);
  });

  std::vector<double> es(n, 0.0), eq(n, 0.0), ds(n, 0.0), dq(n, 0.0);
  for (const auto& p : partials) {
    for (int i = 0; i < n; ++i) {
      if (!enc_trivial) {
        es[i] += p.enc_sum[i];
        eq[i] += p.enc_sq[i];
      }
      if (!dec_trivial) {
        ds[i] += p.dec_sum[i];
        dq[i] += p.dec_sq[i];
      }
    }
  }
  if (!enc_trivial) detail::finalize(out.enc, es, eq, samples);
  if (!dec_trivial) detail::finalize(out.dec, ds, dq, samples);
  return out;
}

// Exact profiles by full enumeration; feasible at n <= 8 for small alphabets.
inline ZProfilePair exact_z_profiles(double prior1, const BinaryInputChannel& ch_enc,
                                     const BinaryInputChannel& ch_dec, int n) {
  ZProfilePair out;
  out.enc.n = out.dec.n = n;
  out.enc.samples = out.dec.samples = 0;
  out.enc.z = sc::oracle_z_profile(prior1, ch_enc, n);
  out.dec.z = sc::oracle_z_profile(prior1, ch_dec, n);
  out.enc.stderr_.assign(n, 0.0);
  out.dec.stderr_.assign(n, 0.0);
  return out;
}

struct DeltaPolicy {
  double beta = 0.3;
  double floor = 1e-6;
  std::optional<double> fixed;  // overrides the schedule when set

  double delta_n(int n) const {
    if (fixed) return *fixed;
    return std::max(std::exp2(-std::pow(static_cast<double>(n), beta)), floor);
  }
};

struct IndexPartition {
  int n = 0;
  std::vector<int> frozen;        // H: nearly uniform given the encoder-side view
  std::vector<int> deterministic; // L: nearly fixed given the decoder-side view
  std::vector<int> information;   // I: the payload
  double delta = 0.0;
  std::string provenance;
  int overlap_count = 0;  // indices passing both threshold tests, kept in H

  double rate() const { return static_cast<double>(information.size()) / n; }

  std::uint64_t digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat_int = [&h](long v) {
      for (int b = 0; b < 8; ++b) {
        h ^= static_cast<unsigned char>(v >> (8 * b));
        h *= 0x100000001b3ULL;
      }
    };
    eat_int(n);
    eat_int(static_cast<long>(delta * 1e15));
    for (const auto* set : {&frozen, &deterministic, &information}) {
      eat_int(static_cast<long>(set->size()));
      for (int i : *set) eat_int(i);
    }
    return h;
  }
};

// Threshold partition: H collects indices whose encoder-conditioned Z is near
// one, L those whose decoder-side Z is near zero, I the rest. An index passing
// both tests (possible only under MC noise or a coarse delta) goes to H:
// freezing costs rate but never distortion, while a wrong L assignment breaks
// the decoder.
inline IndexPartition partition_indices(const ZProfile& enc, const ZProfile& dec,
                                        const DeltaPolicy& policy) {
  if (enc.n != dec.n) throw std::invalid_argument("partition_indices: profile sizes differ");
  IndexPartition part;
  part.n = enc.n;
  part.delta = policy.delta_n(enc.n);
  part.provenance = enc.samples > 0 ? "mc" : "exact";
  for (int i = 0; i < enc.n; ++i) {
    bool in_h = enc.z[i] >= 1.0 - part.delta;
    bool in_l = dec.z[i] <= part.delta;
    if (in_h && in_l) ++part.overlap_count;
    if (in_h)
      part.frozen.push_back(i);
    else if (in_l)
      part.deterministic.push_back(i);
    else
      part.information.push_back(i);
  }
  return part;
}

// Rate-targeted partition: the ceil(rate * n) indices with the largest
// polarization gap (decoder-side Z minus encoder-conditioned Z) carry
// information. A remaining index is deterministic only when the decoder-side
// Z clears the same delta_n threshold the threshold construction uses -- the
// deterministic rule runs on the decoder's view, and an index that view
// cannot pin down essentially surely must freeze instead: freezing costs
// rate, a wrong deterministic assignment cascades through the decoder. Ties
// break toward the lower index.
inline IndexPartition partition_by_rate(const ZProfile& enc, const ZProfile& dec,
                                        double target_rate,
                                        const DeltaPolicy& policy = {}) {
  if (enc.n != dec.n) throw std::invalid_argument("partition_by_rate: profile sizes differ");
  if (!(target_rate >= 0.0 && target_rate <= 1.0))
    throw std::invalid_argument("partition_by_rate: rate must lie in [0, 1]");
  int n = enc.n;
  int k = static_cast<int>(std::ceil(target_rate * n));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double ga = dec.z[a] - enc.z[a], gb = dec.z[b] - enc.z[b];
    if (ga != gb) return ga > gb;
    return a < b;
  });
  std::vector<std::uint8_t> info(n, 0);
  for (int j = 0; j < k; ++j) info[order[j]] = 1;
  IndexPartition part;
  part.n = n;
  part.delta = policy.delta_n(n);
  part.provenance = "rate-target";
  for (int i = 0; i < n; ++i) {
    if (info[i])
      part.information.push_back(i);
    else if (dec.z[i] <= part.delta)
      part.deterministic.push_back(i);
    else
      part.frozen.push_back(i);
  }
  return part;
}

// ---- JSON serialization ------------------------------------------------------

inline nlohmann::json to_json(const ZProfile& p) {
  return {{"n", p.n},        {"z", p.z},           {"stderr", p.stderr_},
          {"samples", p.samples}, {"seed", p.seed}};
}

inline ZProfile z_profile_from_json(const nlohmann::json& j) {
  ZProfile p;
  p.n = j.at("n").get<int>();
  p.z = j.at("z").get<std::vector<double>>();
  p.stderr_ = j.at("stderr").get<std::vector<double>>();
  p.samples = j.at("samples").get<std::int64_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

inline nlohmann::json to_json(const IndexPartition& p) {
  return {{"n", p.n},
          {"H", p.frozen},
          {"L", p.deterministic},
          {"I", p.information},
          {"delta", p.delta},
          {"provenance", p.provenance},
          {"overlap_count", p.overlap_count},
          {"digest", p.digest()}};
}

inline IndexPartition partition_from_json(const nlohmann::json& j) {
  IndexPartition p;
  p.n = j.at("n").get<int>();
  p.frozen = j.at("H").get<std::vector<int>>();
  p.deterministic = j.at("L").get<std::vector<int>>();
  p.information = j.at("I").get<std::vector<int>>();
  p.delta = j.at("delta").get<double>();
  p.provenance = j.at("provenance").get<std::string>();
  p.overlap_count = j.at("overlap_count").get<int>();
  if (j.contains("digest") && j.at("digest").get<std::uint64_t>() != p.digest())
    throw std::runtime_error("partition digest mismatch on load");
  return p;
}

}  // namespace psc::construct
