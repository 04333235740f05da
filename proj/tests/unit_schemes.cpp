#include <doctest.h>

#include <cmath>
#include <psc/construct.hpp>
#include <psc/pmf.hpp>
#include <psc/rng.hpp>
#include <psc/sc_oracle.hpp>
#include <psc/schemes.hpp>
#include <psc/xform.hpp>

using namespace psc;
using pmf::JointPmf;
using schemes::SchemeId;
using xform::BitVec;

namespace {

construct::IndexPartition mc_partition(const schemes::LayerConditioning& cond, int n,
                                       std::int64_t samples = 3000, std::uint64_t seed = 5) {
  auto prof = construct::estimate_z_profiles(cond.prior1, cond.enc, cond.dec, n, samples, seed);
  return construct::partition_indices(prof.enc, prof.dec, {});
}

construct::IndexPartition sets_partition(int n, std::vector<int> h, std::vector<int> l,
                                         std::vector<int> i) {
  construct::IndexPartition p;
  p.n = n;
  p.frozen = std::move(h);
  p.deterministic = std::move(l);
  p.information = std::move(i);
  p.provenance = "test";
  return p;
}

BitVec sample_bits(int n, double p1, Rng& rng) {
  BitVec x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(rng.bit(p1));
  return x;
}

}  // namespace

TEST_SUITE_BEGIN("schemes");

TEST_CASE("payload serialization round trip") {
  schemes::EncodedLayer layer;
  layer.scheme_id = 2;
  layer.layer_id = 1;
  layer.n = 256;
  layer.partition_digest = 0xdeadbeefcafe1234ULL;
  Rng rng(9);
  layer.info_bits.resize(37);
  for (auto& b : layer.info_bits) b = static_cast<std::uint8_t>(rng.fair_bit());
  auto bytes = layer.serialize();
  CHECK(bytes.size() == 8 + (37 + 7) / 8);
  auto back = schemes::EncodedLayer::deserialize(bytes, 37);
  CHECK(back.scheme_id == 2);
  CHECK(back.layer_id == 1);
  CHECK(back.n == 256);
  CHECK(back.partition_digest == (layer.partition_digest & schemes::EncodedLayer::kDigestMask));
  CHECK(back.info_bits == layer.info_bits);
}

TEST_CASE("rd: payload size is exactly |I| and rate is definitional") {
  auto joint = pmf::build_bss_rd(0.11);
  int n = 64;
  auto part = mc_partition(schemes::RdScheme::conditioning(joint), n);
  auto scheme = schemes::RdScheme::make(joint, part, 42);
  Rng source(1), rounding(2);
  auto x = sample_bits(n, 0.5, source);
  auto enc = schemes::encode_layer(scheme.layer, x, rounding);
  CHECK(enc.payload.info_bits.size() == part.information.size());
  auto [t, rec] = scheme.roundtrip(x, rounding);
  CHECK(rec.rate1 == doctest::Approx(part.rate()));
}

TEST_CASE("rd: decode reproduces the encoder sequence bit-exactly") {
  auto joint = pmf::build_bss_rd(0.11);
  int n = 256;
  auto part = mc_partition(schemes::RdScheme::conditioning(joint), n);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto scheme = schemes::RdScheme::make(joint, part, seed);
    Rng source(derive_seed(7, seed, 0, StreamRole::kSource));
    Rng rounding(derive_seed(7, seed, 0, StreamRole::kRounding));
    auto x = sample_bits(n, 0.5, source);
    auto enc = schemes::encode_layer(scheme.layer, x, rounding);
    auto u_hat = schemes::decode_layer(scheme.layer, enc.payload, {});
    CHECK(u_hat == enc.u);
  }
}

TEST_CASE("rd: all-frozen partition yields source-independent output near d=1/2") {
  auto joint = pmf::build_bss_rd(0.11);
  int n = 1 << 10;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  auto part = sets_partition(n, all, {}, {});
  auto scheme = schemes::RdScheme::make(joint, part, 3);
  Rng source(11), rounding(12);
  auto x = sample_bits(n, 0.5, source);
  auto [t, rec] = scheme.roundtrip(x, rounding);
  CHECK(rec.rate1 == 0.0);
  CHECK(rec.dist1 == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("rd: all-information partition under an identity view is lossless") {
  // Encoder conditioning that reveals x exactly, everything transmitted:
  // randomized rounding samples from a degenerate posterior, so t = x.
  JointPmf ident({{"T", 2}, {"X", 2}}, {0.5, 0.0, 0.0, 0.5});
  int n = 64;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  auto part = sets_partition(n, {}, {}, all);
  auto scheme = schemes::RdScheme::make(ident, part, 5);
  Rng source(21), rounding(22);
  auto x = sample_bits(n, 0.5, source);
  auto [t, rec] = scheme.roundtrip(x, rounding);
  CHECK(rec.dist1 == 0.0);
}

TEST_CASE("encoder law matches the enumerated Q distribution at n=4") {
  // Frozen and rounding randomness both vary across encodings; the empirical
  // law of u^4 for a fixed source block must match Q(.|x^4) from enumeration.
  auto joint = pmf::build_bss_rd(0.11);
  int n = 4;
  auto cond = schemes::RdScheme::conditioning(joint);
  auto prof = construct::exact_z_profiles(cond.prior1, cond.enc, cond.dec, n);
  construct::DeltaPolicy coarse;
  coarse.fixed = 0.35;
  auto part = construct::partition_indices(prof.enc, prof.dec, coarse);
  REQUIRE(!part.information.empty());
  REQUIRE(!part.frozen.empty());

  BitVec x = {1, 0, 1, 1};
  auto cls = sc::classes_from_sets(n, part.frozen, part.deterministic, part.information);
  // Enumerate Q(u | x) with the oracle machinery.
  auto tbl = sc::oracle_joint_table(n, [&](int pos, int t) {
    return (t ? cond.prior1 : 1.0 - cond.prior1) * cond.enc(x[pos], t);
  });
  sc::PrefixSums ps(tbl);
  std::vector<double> q(16, 0.0);
  for (std::size_t u = 0; u < 16; ++u) {
    double mass = 1.0;
    std::size_t prefix = 0;
    for (int i = 0; i < n; ++i) {
      int bit = static_cast<int>((u >> (n - 1 - i)) & 1);
      if (cls[i] == sc::IndexClass::kFrozen) {
        mass *= 0.5;
      } else if (cls[i] == sc::IndexClass::kInformation) {
        auto [c0, c1] = ps.cond_at(i, prefix);
        mass *= bit ? c1 : c0;
      } else {
        if (bit != ps.argmax_at(i, prefix)) mass = 0.0;
      }
      prefix = (prefix << 1) | static_cast<std::size_t>(bit);
    }
    q[u] = mass;
  }

  const int reps = 100000;
  std::vector<int> counts(16, 0);
  auto spec = schemes::RdScheme::make(joint, part, 0).layer;
  for (int r = 0; r < reps; ++r) {
    spec.frozen_seed = derive_seed(99, r, 0, StreamRole::kFrozen);
    Rng rounding(derive_seed(99, r, 0, StreamRole::kRounding));
    auto enc = schemes::encode_layer(spec, x, rounding);
    std::size_t u = 0;
    for (int i = 0; i < n; ++i) u = (u << 1) | enc.u[i];
    counts[u]++;
  }
  double chi2 = 0.0;
  for (std::size_t u = 0; u < 16; ++u) {
    double expect = q[u] * reps;
    if (expect < 1e-9) {
      CHECK(counts[u] == 0);  // impossible outcomes must never occur
      continue;
    }
    chi2 += (counts[u] - expect) * (counts[u] - expect) / expect;
  }
  // Deterministic given the seeds; threshold is the far chi^2 tail (dof <= 15).
  CHECK(chi2 < 60.0);
}

TEST_CASE("sr: decode recovers both encoder sequences bit-exactly") {
  auto joint = pmf::build_bss_sr(0.25, 0.11);
  int n = 256;
  auto p1 = mc_partition(schemes::SrScheme::coarse_conditioning(joint), n);
  auto p2 = mc_partition(schemes::SrScheme::refine_conditioning(joint), n);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto scheme = schemes::SrScheme::make(joint, p1, p2, seed);
    Rng source(derive_seed(8, seed, 0, StreamRole::kSource));
    Rng rounding(derive_seed(8, seed, 0, StreamRole::kRounding));
    auto x = sample_bits(n, 0.5, source);
    auto enc = scheme.encode(x, rounding);
    CHECK(enc.payload1.info_bits.size() == p1.information.size());
    CHECK(enc.payload2.info_bits.size() == p2.information.size());
    auto [t, w] = scheme.decode(enc.payload1, enc.payload2);
    CHECK(t == xform::polar_transform(enc.u));
    CHECK(w == xform::polar_transform(enc.v));
  }
}

TEST_CASE("sr: degenerate refinement carries almost no extra rate") {
  // D1 ~ D2 makes T ~ W; the refinement layer's conditioning already knows w.
  auto joint = pmf::build_bss_sr(0.1100000001, 0.11);
  int n = 256;
  auto cond2 = schemes::SrScheme::refine_conditioning(joint);
  auto part2 = mc_partition(cond2, n);
  CHECK(part2.rate() < 0.05);
}

TEST_CASE("wz: perfect side information makes decoder rules identical") {
  // Z = X exactly: the decoder's argmax sees the same conditioning symbols.
  std::vector<double> t(8, 0.0);
  for (int tt = 0; tt < 2; ++tt)
    for (int x = 0; x < 2; ++x) {
      double p = 0.5 * ((x == tt) ? 0.89 : 0.11);
      t[static_cast<std::size_t>(tt) * 4 + x * 2 + x] = p;
    }
  JointPmf joint({{"T", 2}, {"X", 2}, {"Z", 2}}, t);
  int n = 128;
  auto cond = schemes::WzScheme::conditioning(joint);
  auto part = mc_partition(cond, n);
  auto scheme = schemes::WzScheme::make(joint, pmf::ReconMap::first_arg(2, 2), part, 4);
  Rng source(31), rounding(32);
  auto xz = joint.sampler({"X", "Z"});
  BitVec x(n);
  std::vector<std::uint8_t> z(n);
  for (int j = 0; j < n; ++j) {
    const auto& cfg = xz.draw(source);
    x[j] = static_cast<std::uint8_t>(cfg[0]);
    z[j] = static_cast<std::uint8_t>(cfg[1]);
  }
  auto [s, rec] = scheme.roundtrip(x, z, rounding);
  CHECK(rec.mismatch_l == 0);
}

TEST_CASE("wz: roundtrip records rate, distortion and mismatches") {
  auto c = pmf::build_dsbs_wz(0.11, 0.25);
  int n = 1 << 9;
  auto cond = schemes::WzScheme::conditioning(c.joint);
  auto part = mc_partition(cond, n, 4000);
  auto scheme = schemes::WzScheme::make(c.joint, c.f, part, 77);
  auto xz = c.joint.sampler({"X", "Z"});
  Rng source(41), rounding(42);
  BitVec x(n);
  std::vector<std::uint8_t> z(n);
  for (int j = 0; j < n; ++j) {
    const auto& cfg = xz.draw(source);
    x[j] = static_cast<std::uint8_t>(cfg[0]);
    z[j] = static_cast<std::uint8_t>(cfg[1]);
  }
  auto [s, rec] = scheme.roundtrip(x, z, rounding);
  CHECK(rec.rate1 == doctest::Approx(part.rate()));
  CHECK(rec.dist1 > 0.0);
  CHECK(rec.dist1 < 0.5);
  CHECK(rec.target_rate1 == doctest::Approx(0.38740129811).epsilon(1e-6));
}

TEST_CASE("decode_layer rejects payloads from a different construction") {
  auto joint = pmf::build_bss_rd(0.11);
  int n = 64;
  auto part = mc_partition(schemes::RdScheme::conditioning(joint), n);
  auto scheme = schemes::RdScheme::make(joint, part, 42);
  Rng rounding(5), source(6);
  auto x = sample_bits(n, 0.5, source);
  auto enc = schemes::encode_layer(scheme.layer, x, rounding);
  // Skewed spec: move one index between classes.
  auto part2 = part;
  REQUIRE(!part2.frozen.empty());
  part2.information.push_back(part2.frozen.back());
  part2.frozen.pop_back();
  std::sort(part2.information.begin(), part2.information.end());
  auto scheme2 = schemes::RdScheme::make(joint, part2, 42);
  CHECK_THROWS_AS(schemes::decode_layer(scheme2.layer, enc.payload, {}), std::runtime_error);
}

TEST_CASE("srwz: degenerate joint decodes with zero refinement mismatches") {
  auto c = pmf::build_srwz_degenerate(0.25, 0.11);
  int n = 128;
  auto p1 = mc_partition(schemes::SrwzScheme::coarse_conditioning(c.joint), n);
  auto p2 = mc_partition(schemes::SrwzScheme::refine_conditioning(c.joint), n);
  auto scheme = schemes::SrwzScheme::make(c.joint, c.f1, c.f2, p1, p2, 9, 0.25, 0.11);
  CHECK(scheme.validation.conditions_34_pass);
  auto sampler = c.joint.sampler({"X", "Y", "Z"});
  Rng source(51), rounding(52);
  BitVec x(n);
  std::vector<std::uint8_t> y(n), z(n);
  for (int j = 0; j < n; ++j) {
    const auto& cfg = sampler.draw(source);
    x[j] = static_cast<std::uint8_t>(cfg[0]);
    y[j] = static_cast<std::uint8_t>(cfg[1]);
    z[j] = static_cast<std::uint8_t>(cfg[2]);
  }
  auto res = scheme.roundtrip(x, y, z, rounding);
  CHECK(res.record.mismatch_l == 0);
  CHECK(res.record.rate1 == doctest::Approx(p1.rate()));
  CHECK(res.record.rate2 == doctest::Approx(p2.rate()));
  CHECK(res.record.dist2 < 0.35);
}

TEST_CASE("srwz: strict validation refuses a broken chain") {
  // Y copies T rather than X: I(T,W ; Y | X) = H(T|X) > 0 breaks the chain
  // (T,W) -> X -> Y -> Z.
  std::vector<double> t(2 * 2 * 2 * 2 * 1, 0.0);
  for (int tt = 0; tt < 2; ++tt)
    for (int w = 0; w < 2; ++w)
      for (int x = 0; x < 2; ++x) {
        double p = 0.25 * ((x == tt) ? 0.8 : 0.2);
        t[(((static_cast<std::size_t>(tt) * 2 + w) * 2 + x) * 2 + tt) * 1 + 0] = p;
      }
  JointPmf joint({{"T", 2}, {"W", 2}, {"X", 2}, {"Y", 2}, {"Z", 1}}, t);
  auto p1 = sets_partition(4, {0}, {}, {1, 2, 3});
  CHECK_THROWS_AS(schemes::SrwzScheme::make(joint, pmf::ReconMap::first_arg(2, 1),
                                            pmf::ReconMap::first_arg(2, 2), p1, p1, 1, 0.3, 0.3,
                                            true),
                  std::invalid_argument);
  auto lenient = schemes::SrwzScheme::make(joint, pmf::ReconMap::first_arg(2, 1),
                                           pmf::ReconMap::first_arg(2, 2), p1, p1, 1, 0.3, 0.3,
                                           false);
  CHECK_FALSE(lenient.validation.conditions_34_pass);
}

TEST_CASE("rimoldi operating point") {
  auto sr = pmf::build_bss_sr(0.25, 0.11);
  auto op = schemes::rimoldi_operating_point(sr);
  // Chain joint: R2 collapses to I(X;W).
  CHECK(op.r2 == doctest::Approx(sr.mutual_information({"X"}, {"W"})).epsilon(1e-10));
  CHECK(op.r1 == doctest::Approx(0.188721875541).epsilon(1e-9));
  CHECK(op.d1 == doctest::Approx(0.25));
  CHECK(op.d2 == doctest::Approx(0.11));

  // W independent of (X, T): the refinement rate equals the coarse rate.
  std::vector<double> t(8);
  auto rd = pmf::build_bss_rd(0.2);
  for (int tt = 0; tt < 2; ++tt)
    for (int w = 0; w < 2; ++w)
      for (int x = 0; x < 2; ++x)
        t[static_cast<std::size_t>(tt) * 4 + w * 2 + x] = rd.mass({tt, x}) * 0.5;
  JointPmf indep({{"T", 2}, {"W", 2}, {"X", 2}}, t);
  auto op2 = schemes::rimoldi_operating_point(indep);
  CHECK(op2.r2 == doctest::Approx(op2.r1).epsilon(1e-10));

  // T = W: both rates coincide as well.
  std::vector<double> t3(8, 0.0);
  for (int w = 0; w < 2; ++w)
    for (int x = 0; x < 2; ++x)
      t3[static_cast<std::size_t>(w) * 4 + w * 2 + x] = rd.mass({w, x});
  JointPmf copy({{"T", 2}, {"W", 2}, {"X", 2}}, t3);
  auto op3 = schemes::rimoldi_operating_point(copy);
  CHECK(op3.r1 == doctest::Approx(op3.r2).epsilon(1e-10));
}

TEST_CASE("sr accepts non-chain joints and codes at the reported operating point") {
  // W pure noise, T correlated with X: the chain X -> W -> T fails badly, yet
  // the codec runs and its targets are the operating-point quantities.
  auto rd = pmf::build_bss_rd(0.2);
  std::vector<double> t(8);
  for (int tt = 0; tt < 2; ++tt)
    for (int w = 0; w < 2; ++w)
      for (int x = 0; x < 2; ++x)
        t[static_cast<std::size_t>(tt) * 4 + w * 2 + x] = rd.mass({tt, x}) * 0.5;
  JointPmf joint({{"T", 2}, {"W", 2}, {"X", 2}}, t);
  CHECK_FALSE(joint.check_markov({{"X"}, {"W"}, {"T"}}).pass);
  int n = 128;
  auto p1 = mc_partition(schemes::SrScheme::coarse_conditioning(joint), n);
  auto p2 = mc_partition(schemes::SrScheme::refine_conditioning(joint), n);
  auto scheme = schemes::SrScheme::make(joint, p1, p2, 3);
  auto op = schemes::rimoldi_operating_point(joint);
  CHECK(scheme.target_rate1 == doctest::Approx(op.r1).epsilon(1e-12));
  CHECK(scheme.target_rate1 + scheme.target_rate2 == doctest::Approx(op.r2).epsilon(1e-10));
  CHECK(scheme.target_d2 == doctest::Approx(op.d2).epsilon(1e-12));
  Rng source(61), rounding(62);
  BitVec x = sample_bits(n, 0.5, source);
  auto rec = scheme.roundtrip(x, rounding);
  CHECK(rec.dist1 >= 0.0);
  CHECK(rec.dist2 == doctest::Approx(0.5).epsilon(0.25));  // W carries no information about X
}

TEST_CASE("wz mismatch probability bound holds on random small instances") {
  // The step bound behind the side-information decoder analysis, randomized
  // over partitions at n = 4 and 8.
  Rng rng(777);
  auto c = pmf::build_dsbs_wz(0.11, 0.25);
  auto p_txz = c.joint.table_in_order({"T", "X", "Z"});
  for (int n : {4, 8}) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<int> h, l, i;
      for (int k = 0; k < n; ++k) {
        switch (rng.next_u64() % 3) {
          case 0: h.push_back(k); break;
          case 1: l.push_back(k); break;
          default: i.push_back(k); break;
        }
      }
      auto cls = sc::classes_from_sets(n, h, l, i);
      auto mm = sc::oracle_rule_mismatch(p_txz, 2, 2, cls, n);
      CHECK(mm.p_mismatch <= mm.bound + 1e-12);
    }
  }
}

TEST_SUITE_END();
