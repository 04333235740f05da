#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "psc/construct.hpp"
#include "psc/pmf.hpp"
#include "psc/rng.hpp"
#include "psc/sc.hpp"
#include "psc/xform.hpp"

namespace psc::schemes {

using construct::IndexPartition;
using pmf::BinaryInputChannel;
using pmf::DistortionMeasure;
using pmf::JointPmf;
using pmf::ReconMap;
using xform::BitVec;

enum class SchemeId : std::uint8_t { kRd = 1, kSr = 2, kWz = 3, kSrwz = 4 };

inline const char* scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::kRd: return "rd";
    case SchemeId::kSr: return "sr";
    case SchemeId::kWz: return "wz";
    case SchemeId::kSrwz: return "srwz";
  }
  return "?";
}

inline SchemeId scheme_from_name(const std::string& name) {
  if (name == "rd") return SchemeId::kRd;
  if (name == "sr") return SchemeId::kSr;
  if (name == "wz") return SchemeId::kWz;
  if (name == "srwz") return SchemeId::kSrwz;
  throw std::invalid_argument("unknown scheme: " + name);
}

// Everything one coding layer needs. The deterministic (L-class) rule may
// condition differently at the encoder and at the decoder: the encoder's rule
// sees a per-symbol coarsening of its own observations, the decoder's rule
// sees the decoder channel. When the two procedures must be identical (the
// schemes without decoder-only side information), they are byte-identical by
// construction: same channel, same argmax, ties to zero.
struct LayerCodeSpec {
  int n = 0;
  IndexPartition partition;
  std::uint64_t frozen_seed = 0;
  double prior1 = 0.5;
  BinaryInputChannel enc_channel;              // conditioning for I-class sampling
  BinaryInputChannel enc_l_channel;            // conditioning for the encoder's L rule
  std::vector<std::uint8_t> enc_l_map;         // per-symbol map onto the L-rule alphabet
  bool enc_l_shares_session = false;           // L rule reads the I-sampling session
  BinaryInputChannel dec_channel;              // decoder-side conditioning
  std::uint8_t scheme_id = 0;
  std::uint8_t layer_id = 0;

  void finalize() {
    n = partition.n;
    enc_l_shares_session = enc_l_channel == enc_channel && identity_map();
  }

 private:
  bool identity_map() const {
    if (static_cast<int>(enc_l_map.size()) != enc_channel.outputs()) return false;
    for (std::size_t k = 0; k < enc_l_map.size(); ++k)
      if (enc_l_map[k] != k) return false;
    return true;
  }
};

inline std::vector<std::uint8_t> null_obs_map(int outputs) {
  return std::vector<std::uint8_t>(outputs, 0);
}

inline std::vector<std::uint8_t> identity_obs_map(int outputs) {
  std::vector<std::uint8_t> m(outputs);
  for (int k = 0; k < outputs; ++k) m[k] = static_cast<std::uint8_t>(k);
  return m;
}

// The transmitted information bits of one layer, in index order.
struct EncodedLayer {
  std::uint8_t scheme_id = 0;
  std::uint8_t layer_id = 0;
  int n = 0;
  std::uint64_t partition_digest = 0;
  BitVec info_bits;

  // 8-byte header: scheme id, layer id, log2 n, low 40 bits of the partition
  // digest (little-endian); then the info bits packed LSB-first.
  static constexpr std::uint64_t kDigestMask = (std::uint64_t{1} << 40) - 1;

  std::vector<std::uint8_t> serialize() const {
    std::vector<std::uint8_t> out(8 + (info_bits.size() + 7) / 8, 0);
    out[0] = scheme_id;
    out[1] = layer_id;
    out[2] = static_cast<std::uint8_t>(xform::log2_exact(static_cast<std::size_t>(n)));
    std::uint64_t d = partition_digest & kDigestMask;
    for (int b = 0; b < 5; ++b) out[3 + b] = static_cast<std::uint8_t>(d >> (8 * b));
    for (std::size_t i = 0; i < info_bits.size(); ++i)
      if (info_bits[i]) out[8 + i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    return out;
  }

  static EncodedLayer deserialize(std::span<const std::uint8_t> bytes, std::size_t info_count) {
    if (bytes.size() < 8 + (info_count + 7) / 8)
      throw std::runtime_error("payload too short");
    EncodedLayer out;
    out.scheme_id = bytes[0];
    out.layer_id = bytes[1];
    out.n = 1 << bytes[2];
    std::uint64_t d = 0;
    for (int b = 0; b < 5; ++b) d |= static_cast<std::uint64_t>(bytes[3 + b]) << (8 * b);
    out.partition_digest = d;
    out.info_bits.resize(info_count);
    for (std::size_t i = 0; i < info_count; ++i)
      out.info_bits[i] = (bytes[8 + i / 8] >> (i % 8)) & 1;
    return out;
  }
};

struct TrialRecord {
  std::string scheme;
  int m = 0;
  int n = 0;
  int trial = 0;
  std::uint64_t frozen_seed = 0;
  std::uint64_t rounding_seed = 0;
  std::uint64_t source_seed = 0;
  double rate1 = 0.0, rate2 = 0.0;
  double dist1 = 0.0, dist2 = 0.0;
  long mismatch_l = 0;
  double target_rate1 = 0.0, target_rate2 = 0.0;
  double target_d1 = 0.0, target_d2 = 0.0;
};

// The (prior, encoder conditioning, decoder conditioning) triple of one layer;
// the same channels drive both the codec and the profile construction.
struct LayerConditioning {
  double prior1 = 0.5;
  BinaryInputChannel enc;
  BinaryInputChannel dec;
};

namespace detail {

inline std::vector<sc::IndexClass> classes_of(const IndexPartition& p) {
  return sc::classes_from_sets(p.n, p.frozen, p.deterministic, p.information);
}

inline Rng frozen_stream(const LayerCodeSpec& spec) {
  return Rng(derive_seed(spec.frozen_seed, spec.layer_id, 0, StreamRole::kFrozen));
}

}  // namespace detail

struct EncodeResult {
  BitVec u;
  EncodedLayer payload;
};

// One SC pass. Frozen indices draw from the shared seeded stream, information
// indices sample from the encoder-conditioned posterior (randomized rounding),
// deterministic indices take the argmax of the encoder-side L conditioning
// with ties to zero.
inline EncodeResult encode_layer(const LayerCodeSpec& spec,
                                 std::span<const std::uint8_t> enc_obs, Rng& rounding) {
  auto cls = detail::classes_of(spec.partition);
  Rng frozen = detail::frozen_stream(spec);
  sc::ScSession enc_session(spec.prior1, spec.enc_channel, enc_obs);
  std::optional<sc::ScSession> l_session;
  std::vector<std::uint8_t> l_obs;
  if (!spec.enc_l_shares_session) {
    l_obs.resize(enc_obs.size());
    for (std::size_t j = 0; j < enc_obs.size(); ++j) l_obs[j] = spec.enc_l_map[enc_obs[j]];
    l_session.emplace(spec.prior1, spec.enc_l_channel, l_obs);
  }

  EncodeResult out;
  out.u.resize(spec.n);
  out.payload.scheme_id = spec.scheme_id;
  out.payload.layer_id = spec.layer_id;
  out.payload.n = spec.n;
  out.payload.partition_digest = spec.partition.digest();
  out.payload.info_bits.reserve(spec.partition.information.size());

  for (int i = 0; i < spec.n; ++i) {
    int bit = 0;
    switch (cls[i]) {
      case sc::IndexClass::kFrozen:
        bit = frozen.fair_bit();
        break;
      case sc::IndexClass::kInformation: {
        auto [p0, p1] = enc_session.next_posterior();
        bit = rounding.uniform01() < p1 ? 1 : 0;
        out.payload.info_bits.push_back(static_cast<std::uint8_t>(bit));
        break;
      }
      case sc::IndexClass::kDeterministic: {
        auto [p0, p1] = spec.enc_l_shares_session ? enc_session.next_posterior()
                                                  : l_session->next_posterior();
        bit = p1 > p0 ? 1 : 0;
        break;
      }
    }
    out.u[i] = static_cast<std::uint8_t>(bit);
    enc_session.feed(bit);
    if (l_session) l_session->feed(bit);
  }
  return out;
}

// The receiving SC pass: frozen bits from the shared stream, information bits
// from the payload, deterministic bits by argmax of the decoder conditioning.
inline BitVec decode_layer(const LayerCodeSpec& spec, const EncodedLayer& payload,
                           std::span<const std::uint8_t> dec_obs) {
  if (payload.n != spec.n || payload.scheme_id != spec.scheme_id ||
      payload.layer_id != spec.layer_id ||
      ((payload.partition_digest ^ spec.partition.digest()) & EncodedLayer::kDigestMask) != 0)
    throw std::runtime_error("payload does not match the layer spec (construction skew)");
  if (payload.info_bits.size() != spec.partition.information.size())
    throw std::runtime_error("payload bit count does not match the partition");

  auto cls = detail::classes_of(spec.partition);
  Rng frozen = detail::frozen_stream(spec);
  sc::ScSession session = dec_obs.empty() && spec.dec_channel.is_null()
                              ? sc::ScSession(spec.prior1, static_cast<std::size_t>(spec.n))
                              : sc::ScSession(spec.prior1, spec.dec_channel, dec_obs);
  BitVec u(spec.n);
  std::size_t next_info = 0;
  for (int i = 0; i < spec.n; ++i) {
    int bit = 0;
    switch (cls[i]) {
      case sc::IndexClass::kFrozen:
        bit = frozen.fair_bit();
        break;
      case sc::IndexClass::kInformation:
        bit = payload.info_bits[next_info++];
        break;
      case sc::IndexClass::kDeterministic: {
        auto [p0, p1] = session.next_posterior();
        bit = p1 > p0 ? 1 : 0;
        break;
      }
    }
    u[i] = static_cast<std::uint8_t>(bit);
    session.feed(bit);
  }
  return u;
}

inline double hamming_fraction(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += a[j] != b[j];
  return static_cast<double>(d) / static_cast<double>(a.size());
}

inline long count_l_mismatches(const IndexPartition& part, const BitVec& u, const BitVec& v) {
  long c = 0;
  for (int i : part.deterministic) c += u[i] != v[i];
  return c;
}

inline std::vector<std::uint8_t> pack_pairs(std::span<const std::uint8_t> a,
                                            std::span<const std::uint8_t> b, int b_size) {
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j)
    out[j] = static_cast<std::uint8_t>(a[j] * b_size + b[j]);
  return out;
}

// ---- Plain rate-distortion coding ------------------------------------------

struct RdScheme {
  JointPmf joint;  // axes (T, X)
  LayerCodeSpec layer;
  DistortionMeasure d = DistortionMeasure::hamming();
  double target_rate = 0.0;
  double target_d = 0.0;

  static LayerConditioning conditioning(const JointPmf& joint) {
    return {joint.marginalize({"T"}).table()[1], joint.channel("T", {"X"}),
            BinaryInputChannel::null_channel()};
  }

  static RdScheme make(const JointPmf& joint, IndexPartition partition,
                       std::uint64_t frozen_seed) {
    RdScheme s{joint, {}, DistortionMeasure::hamming(), 0.0, 0.0};
    auto cond = conditioning(joint);
    s.layer.partition = std::move(partition);
    s.layer.frozen_seed = frozen_seed;
    s.layer.prior1 = cond.prior1;
    s.layer.enc_channel = cond.enc;
    s.layer.enc_l_channel = BinaryInputChannel::null_channel();
    s.layer.enc_l_map = null_obs_map(s.layer.enc_channel.outputs());
    s.layer.dec_channel = cond.dec;
    s.layer.scheme_id = static_cast<std::uint8_t>(SchemeId::kRd);
    s.layer.layer_id = 1;
    s.layer.finalize();
    s.target_rate = joint.mutual_information({"X"}, {"T"});
    s.target_d = joint.expected_distortion("X", "T", s.d);
    return s;
  }

  // Encode, decode, reproduce; the record carries rate and distortion.
  std::pair<BitVec, TrialRecord> roundtrip(const BitVec& x, Rng& rounding) const {
    auto enc = encode_layer(layer, x, rounding);
    BitVec u_hat = decode_layer(layer, enc.payload, {});
    BitVec t = xform::polar_transform(u_hat);
    TrialRecord rec;
    rec.scheme = "rd";
    rec.n = layer.n;
    rec.rate1 = layer.partition.rate();
    rec.dist1 = hamming_fraction(x, t);
    rec.target_rate1 = target_rate;
    rec.target_d1 = target_d;
    return {std::move(t), rec};
  }
};

// ---- Two-layer successive refinement ----------------------------------------

struct SrScheme {
  JointPmf joint;  // axes (T, W, X)
  LayerCodeSpec coarse;   // codes T^n against X^n
  LayerCodeSpec refine;   // codes W^n against (T^n, X^n)
  DistortionMeasure d = DistortionMeasure::hamming();
  double target_rate1 = 0.0, target_rate2 = 0.0;
  double target_d1 = 0.0, target_d2 = 0.0;

  static LayerConditioning coarse_conditioning(const JointPmf& joint) {
    return {joint.marginalize({"T"}).table()[1], joint.channel("T", {"X"}),
            BinaryInputChannel::null_channel()};
  }

  static LayerConditioning refine_conditioning(const JointPmf& joint) {
    return {joint.marginalize({"W"}).table()[1], joint.channel("W", {"T", "X"}),
            joint.channel("W", {"T"})};
  }

  static SrScheme make(const JointPmf& joint, IndexPartition coarse_part,
                       IndexPartition refine_part, std::uint64_t frozen_seed) {
    SrScheme s{joint, {}, {}, DistortionMeasure::hamming(), 0, 0, 0, 0};
    auto cond1 = coarse_conditioning(joint);
    auto cond2 = refine_conditioning(joint);
    s.coarse.partition = std::move(coarse_part);
    s.coarse.frozen_seed = frozen_seed;
    s.coarse.prior1 = cond1.prior1;
    s.coarse.enc_channel = cond1.enc;
    s.coarse.enc_l_channel = BinaryInputChannel::null_channel();
    s.coarse.enc_l_map = null_obs_map(s.coarse.enc_channel.outputs());
    s.coarse.dec_channel = cond1.dec;
    s.coarse.scheme_id = static_cast<std::uint8_t>(SchemeId::kSr);
    s.coarse.layer_id = 1;
    s.coarse.finalize();

    s.refine.partition = std::move(refine_part);
    s.refine.frozen_seed = frozen_seed;
    s.refine.prior1 = cond2.prior1;
    s.refine.enc_channel = cond2.enc;
    s.refine.enc_l_channel = cond2.dec;
    // Observation symbols pack as t * |X| + x; the L rule keeps t.
    int xs = joint.axis_size("X");
    s.refine.enc_l_map.resize(static_cast<std::size_t>(2) * xs);
    for (int t = 0; t < 2; ++t)
      for (int x = 0; x < xs; ++x)
        s.refine.enc_l_map[static_cast<std::size_t>(t) * xs + x] = static_cast<std::uint8_t>(t);
    s.refine.dec_channel = s.refine.enc_l_channel;
    s.refine.scheme_id = static_cast<std::uint8_t>(SchemeId::kSr);
    s.refine.layer_id = 2;
    s.refine.finalize();

    s.target_rate1 = joint.mutual_information({"X"}, {"T"});
    s.target_rate2 = joint.mutual_information({"X"}, {"W"}, {"T"});
    s.target_d1 = joint.expected_distortion("X", "T", s.d);
    s.target_d2 = joint.expected_distortion("X", "W", s.d);
    return s;
  }

  struct Encoded {
    EncodedLayer payload1, payload2;
    BitVec u, v;  // kept for chaining and for bit-exactness checks
  };

  Encoded encode(const BitVec& x, Rng& rounding) const {
    Encoded out;
    auto enc1 = encode_layer(coarse, x, rounding);
    out.u = std::move(enc1.u);
    out.payload1 = std::move(enc1.payload);
    BitVec t = xform::polar_transform(out.u);
    auto obs2 = pack_pairs(t, x, joint.axis_size("X"));
    auto enc2 = encode_layer(refine, obs2, rounding);
    out.v = std::move(enc2.u);
    out.payload2 = std::move(enc2.payload);
    return out;
  }

  // Returns the coarse and refined reproductions (t^n, w^n).
  std::pair<BitVec, BitVec> decode(const EncodedLayer& payload1,
                                   const EncodedLayer& payload2) const {
    BitVec u = decode_layer(coarse, payload1, {});
    BitVec t = xform::polar_transform(u);
    BitVec v = decode_layer(refine, payload2, t);
    BitVec w = xform::polar_transform(v);
    return {std::move(t), std::move(w)};
  }

  TrialRecord roundtrip(const BitVec& x, Rng& rounding) const {
    auto enc = encode(x, rounding);
    auto [t, w] = decode(enc.payload1, enc.payload2);
    TrialRecord rec;
    rec.scheme = "sr";
    rec.n = coarse.n;
    rec.rate1 = coarse.partition.rate();
    rec.rate2 = refine.partition.rate();
    rec.dist1 = hamming_fraction(x, t);
    rec.dist2 = hamming_fraction(x, w);
    rec.target_rate1 = target_rate1;
    rec.target_rate2 = target_rate2;
    rec.target_d1 = target_d1;
    rec.target_d2 = target_d2;
    return rec;
  }
};

// ---- Wyner-Ziv coding with decoder side information --------------------------

struct WzScheme {
  JointPmf joint;  // axes (T, X, Z)
  ReconMap f;      // reproduction from (t, z)
  LayerCodeSpec layer;
  DistortionMeasure d = DistortionMeasure::hamming();
  double target_rate = 0.0;
  double target_d = 0.0;

  static LayerConditioning conditioning(const JointPmf& joint) {
    return {joint.marginalize({"T"}).table()[1], joint.channel("T", {"X"}),
            joint.channel("T", {"Z"})};
  }

  static WzScheme make(const JointPmf& joint, ReconMap f, IndexPartition partition,
                       std::uint64_t frozen_seed) {
    WzScheme s{joint, std::move(f), {}, DistortionMeasure::hamming(), 0, 0};
    auto cond = conditioning(joint);
    s.layer.partition = std::move(partition);
    s.layer.frozen_seed = frozen_seed;
    s.layer.prior1 = cond.prior1;
    s.layer.enc_channel = cond.enc;
    // The encoder's deterministic rule conditions on its own observations.
    s.layer.enc_l_channel = s.layer.enc_channel;
    s.layer.enc_l_map = identity_obs_map(s.layer.enc_channel.outputs());
    s.layer.dec_channel = cond.dec;
    s.layer.scheme_id = static_cast<std::uint8_t>(SchemeId::kWz);
    s.layer.layer_id = 1;
    s.layer.finalize();
    s.target_rate = joint.mutual_information({"X"}, {"T"}, {"Z"});
    s.target_d = joint.expected_map_distortion("X", "T", "Z", s.f, s.d);
    return s;
  }

  // The encoder sees x^n only; the decoder sees z^n and the payload. The
  // deterministic indices may disagree between the two passes; the count is
  // recorded alongside the distortion.
  std::pair<BitVec, TrialRecord> roundtrip(const BitVec& x, const std::vector<std::uint8_t>& z,
                                           Rng& rounding) const {
    auto enc = encode_layer(layer, x, rounding);
    BitVec u_hat = decode_layer(layer, enc.payload, z);
    BitVec t_hat = xform::polar_transform(u_hat);
    BitVec s_out(layer.n);
    for (int j = 0; j < layer.n; ++j) s_out[j] = f(t_hat[j], z[j]);
    TrialRecord rec;
    rec.scheme = "wz";
    rec.n = layer.n;
    rec.rate1 = layer.partition.rate();
    rec.dist1 = hamming_fraction(x, s_out);
    rec.mismatch_l = count_l_mismatches(layer.partition, enc.u, u_hat);
    rec.target_rate1 = target_rate;
    rec.target_d1 = target_d;
    return {std::move(s_out), rec};
  }
};

// ---- Successive refinement with degraded side information --------------------

struct SrwzScheme {
  JointPmf joint;  // axes (T, W, X, Y, Z)
  ReconMap f1, f2;
  LayerCodeSpec coarse;
  LayerCodeSpec refine;
  DistortionMeasure d = DistortionMeasure::hamming();
  pmf::SrwzReport validation;
  double target_rate1 = 0.0, target_rate2 = 0.0;
  double target_d1 = 0.0, target_d2 = 0.0;

  static LayerConditioning coarse_conditioning(const JointPmf& joint) {
    // The coarse deterministic rule is observation-free even though the
    // decoder holds z; the side information enters only through f1.
    return {joint.marginalize({"T"}).table()[1], joint.channel("T", {"X"}),
            BinaryInputChannel::null_channel()};
  }

  static LayerConditioning refine_conditioning(const JointPmf& joint) {
    return {joint.marginalize({"W"}).table()[1], joint.channel("W", {"T", "X"}),
            joint.channel("W", {"T", "Y"})};
  }

  // `strict` refuses joints that fail the two chain conditions; pass false to
  // run report-only.
  static SrwzScheme make(const JointPmf& joint, ReconMap f1, ReconMap f2,
                         IndexPartition coarse_part, IndexPartition refine_part,
                         std::uint64_t frozen_seed, double d1_design, double d2_design,
                         bool strict = true) {
    SrwzScheme s{joint, std::move(f1), std::move(f2), {}, {}, DistortionMeasure::hamming(),
                 {},    0,             0,             0,  0};
    s.validation = pmf::validate_srwz_conditions(joint, s.f1, s.f2, d1_design, d2_design);
    if (strict && !s.validation.conditions_34_pass)
      throw std::invalid_argument("joint fails the chain conditions; rerun as report-only");

    auto cond1 = coarse_conditioning(joint);
    auto cond2 = refine_conditioning(joint);
    s.coarse.partition = std::move(coarse_part);
    s.coarse.frozen_seed = frozen_seed;
    s.coarse.prior1 = cond1.prior1;
    s.coarse.enc_channel = cond1.enc;
    s.coarse.enc_l_channel = BinaryInputChannel::null_channel();
    s.coarse.enc_l_map = null_obs_map(s.coarse.enc_channel.outputs());
    s.coarse.dec_channel = cond1.dec;
    s.coarse.scheme_id = static_cast<std::uint8_t>(SchemeId::kSrwz);
    s.coarse.layer_id = 1;
    s.coarse.finalize();

    s.refine.partition = std::move(refine_part);
    s.refine.frozen_seed = frozen_seed;
    s.refine.prior1 = cond2.prior1;
    s.refine.enc_channel = cond2.enc;
    s.refine.enc_l_channel = s.refine.enc_channel;
    s.refine.enc_l_map = identity_obs_map(s.refine.enc_channel.outputs());
    s.refine.dec_channel = cond2.dec;
    s.refine.scheme_id = static_cast<std::uint8_t>(SchemeId::kSrwz);
    s.refine.layer_id = 2;
    s.refine.finalize();

    s.target_rate1 = joint.mutual_information({"X"}, {"T"});
    s.target_rate2 = joint.mutual_information({"X"}, {"W"}, {"T", "Y"});
    s.target_d1 = joint.expected_map_distortion("X", "T", "Z", s.f1, s.d);
    s.target_d2 = joint.expected_map_distortion("X", "W", "Y", s.f2, s.d);
    return s;
  }

  struct Result {
    BitVec coarse_rep;   // r^n = f1(t, z)
    BitVec refined_rep;  // s^n = f2(w, y)
    TrialRecord record;
  };

  Result roundtrip(const BitVec& x, const std::vector<std::uint8_t>& y,
                   const std::vector<std::uint8_t>& z, Rng& rounding) const {
    int n = coarse.n;
    auto enc1 = encode_layer(coarse, x, rounding);
    BitVec t_enc = xform::polar_transform(enc1.u);
    auto obs2 = pack_pairs(t_enc, x, joint.axis_size("X"));
    auto enc2 = encode_layer(refine, obs2, rounding);

    // Decoder: the coarse layer's deterministic rule is observation-free, so
    // its pass reproduces the encoder's sequence; the refinement layer
    // conditions on (t, y) and may diverge where the encoder used (t, x).
    BitVec u_hat = decode_layer(coarse, enc1.payload, {});
    BitVec t_hat = xform::polar_transform(u_hat);
    auto dec_obs2 = pack_pairs(t_hat, y, joint.axis_size("Y"));
    BitVec v_hat = decode_layer(refine, enc2.payload, dec_obs2);
    BitVec w_hat = xform::polar_transform(v_hat);

    Result res;
    res.coarse_rep.resize(n);
    res.refined_rep.resize(n);
    for (int j = 0; j < n; ++j) {
      res.coarse_rep[j] = f1(t_hat[j], z[j]);
      res.refined_rep[j] = f2(w_hat[j], y[j]);
    }
    res.record.scheme = "srwz";
    res.record.n = n;
    res.record.rate1 = coarse.partition.rate();
    res.record.rate2 = refine.partition.rate();
    res.record.dist1 = hamming_fraction(x, res.coarse_rep);
    res.record.dist2 = hamming_fraction(x, res.refined_rep);
    res.record.mismatch_l = count_l_mismatches(refine.partition, enc2.u, v_hat);
    res.record.target_rate1 = target_rate1;
    res.record.target_rate2 = target_rate2;
    res.record.target_d1 = target_d1;
    res.record.target_d2 = target_d2;
    return res;
  }
};

// ---- Operating point for arbitrary (non-chain) refinement joints -------------

struct OperatingPoint {
  double r1 = 0.0, r2 = 0.0, d1 = 0.0, d2 = 0.0;
};

// (I(X;T), I(X;W,T), E d(X,T), E d(X,W)): the rate/distortion targets the
// refinement codec attains whether or not the chain condition holds.
inline OperatingPoint rimoldi_operating_point(const JointPmf& joint) {
  OperatingPoint p;
  auto d = DistortionMeasure::hamming();
  p.r1 = joint.mutual_information({"X"}, {"T"});
  p.r2 = joint.mutual_information({"X"}, {"W", "T"});
  p.d1 = joint.expected_distortion("X", "T", d);
  p.d2 = joint.expected_distortion("X", "W", d);
  return p;
}

}  // namespace psc::schemes
