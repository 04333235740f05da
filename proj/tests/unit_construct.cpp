#include <doctest.h>

#include <cmath>
#include <psc/construct.hpp>
#include <psc/pmf.hpp>
#include <psc/rng.hpp>
#include <psc/sc_oracle.hpp>
#include <psc/schemes.hpp>

using namespace psc;
using pmf::BinaryInputChannel;

TEST_SUITE_BEGIN("construct");

TEST_CASE("estimates agree with the exact oracle at small n") {
  auto joint = pmf::build_bss_rd(0.11);
  auto enc = joint.channel("T", {"X"});
  auto dec = BinaryInputChannel::null_channel();
  int hits = 0, total = 0;
  for (int n : {2, 4, 8}) {
    auto exact = construct::exact_z_profiles(0.5, enc, dec, n);
    for (std::uint64_t seed : {11, 22, 33}) {
      auto est = construct::estimate_z_profiles(0.5, enc, dec, n, 20000, seed);
      for (int i = 0; i < n; ++i) {
        ++total;
        double tol = 4.0 * est.enc.stderr_[i] + 1e-12;
        if (std::abs(est.enc.z[i] - exact.enc.z[i]) <= tol) ++hits;
        // Null conditioning with a uniform prior is exact by construction.
        CHECK(est.dec.z[i] == 1.0);
        CHECK(est.dec.stderr_[i] == 0.0);
      }
    }
  }
  CHECK(static_cast<double>(hits) / total >= 0.95);
}

TEST_CASE("estimates carry sane standard errors and clamped values") {
  auto c = pmf::build_dsbs_wz(0.11, 0.25);
  auto cond = schemes::WzScheme::conditioning(c.joint);
  auto est = construct::estimate_z_profiles(cond.prior1, cond.enc, cond.dec, 16, 5000, 3);
  for (int i = 0; i < 16; ++i) {
    CHECK(est.enc.z[i] >= 0.0);
    CHECK(est.enc.z[i] <= 1.0);
    CHECK(est.enc.stderr_[i] >= 0.0);
    CHECK(est.dec.stderr_[i] >= 0.0);
  }
  CHECK(est.enc.samples == 5000);
  CHECK(est.enc.seed == 3);
}

TEST_CASE("sampling is deterministic given the seed, independent of threads") {
  auto joint = pmf::build_bss_rd(0.2);
  auto enc = joint.channel("T", {"X"});
  auto a = construct::estimate_z_profiles(0.5, enc, enc, 64, 5000, 9, 1);
  auto b = construct::estimate_z_profiles(0.5, enc, enc, 64, 5000, 9, 4);
  CHECK(a.enc.z == b.enc.z);
  CHECK(a.dec.z == b.dec.z);
  CHECK(a.enc.stderr_ == b.enc.stderr_);
  auto c = construct::estimate_z_profiles(0.5, enc, enc, 64, 5000, 10, 1);
  CHECK(a.enc.z != c.enc.z);
}

TEST_CASE("samples must be positive") {
  auto enc = BinaryInputChannel::bsc(0.1);
  CHECK_THROWS_AS(construct::estimate_z_profiles(0.5, enc, enc, 4, 0, 1), std::invalid_argument);
}

TEST_CASE("partition covers the index range disjointly") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 1 << (2 + rep % 4);
    construct::ZProfile e, d;
    e.n = d.n = n;
    e.samples = d.samples = 1;
    for (int i = 0; i < n; ++i) {
      double ze = rng.uniform01();
      e.z.push_back(ze);
      e.stderr_.push_back(0);
      // Decoder-side Z never falls below the better-informed side.
      d.z.push_back(ze + (1.0 - ze) * rng.uniform01());
      d.stderr_.push_back(0);
    }
    construct::DeltaPolicy policy;
    policy.fixed = 0.1 + 0.3 * rng.uniform01();
    auto part = construct::partition_indices(e, d, policy);
    std::vector<int> seen(n, 0);
    for (int i : part.frozen) seen[i]++;
    for (int i : part.deterministic) seen[i]++;
    for (int i : part.information) seen[i]++;
    for (int i = 0; i < n; ++i) CHECK(seen[i] == 1);

    auto by_rate = construct::partition_by_rate(e, d, rng.uniform01());
    std::fill(seen.begin(), seen.end(), 0);
    for (int i : by_rate.frozen) seen[i]++;
    for (int i : by_rate.deterministic) seen[i]++;
    for (int i : by_rate.information) seen[i]++;
    for (int i = 0; i < n; ++i) CHECK(seen[i] == 1);
  }
}

TEST_CASE("threshold partition honors the delta tests and reports overlap") {
  construct::ZProfile e, d;
  e.n = d.n = 4;
  e.z = {0.99, 0.5, 0.001, 0.9};
  d.z = {0.999, 0.7, 0.002, 0.05};
  e.stderr_ = d.stderr_ = {0, 0, 0, 0};
  e.samples = d.samples = 1;
  construct::DeltaPolicy policy;
  policy.fixed = 0.1;
  auto part = construct::partition_indices(e, d, policy);
  CHECK(part.frozen == std::vector<int>{0, 3});          // enc z >= 0.9
  CHECK(part.deterministic == std::vector<int>{2});      // dec z <= 0.1, not frozen
  CHECK(part.information == std::vector<int>{1});
  // Index 3 passes both tests (enc 0.9 >= 0.9, dec 0.05 <= 0.1): counted, kept in H.
  CHECK(part.overlap_count == 1);
}

TEST_CASE("perfectly polarized identity profile freezes nothing") {
  auto exact = construct::exact_z_profiles(0.5, BinaryInputChannel::identity(),
                                           BinaryInputChannel::identity(), 8);
  construct::DeltaPolicy policy;
  policy.fixed = 0.5;
  auto part = construct::partition_indices(exact.enc, exact.dec, policy);
  CHECK(part.deterministic.size() == 8);
  CHECK(part.frozen.empty());
}

TEST_CASE("rate-targeted partition cardinalities are exact") {
  auto joint = pmf::build_bss_rd(0.11);
  auto enc = joint.channel("T", {"X"});
  auto prof = construct::estimate_z_profiles(0.5, enc, BinaryInputChannel::null_channel(),
                                             1 << 10, 2000, 7);
  auto p0 = construct::partition_by_rate(prof.enc, prof.dec, 0.0);
  CHECK(p0.information.empty());
  auto p1 = construct::partition_by_rate(prof.enc, prof.dec, 1.0);
  CHECK(p1.information.size() == 1 << 10);
  auto ph = construct::partition_by_rate(prof.enc, prof.dec, 0.5);
  CHECK(ph.information.size() == 512);
}

TEST_CASE("set inclusions under conditioning at exact small n") {
  // The better-informed side polarizes faster: frozen sets shrink and
  // deterministic sets grow when conditioning is added, at every delta.
  auto joint = pmf::build_bss_rd(0.11);
  auto ch = joint.channel("T", {"X"});
  for (int n : {4, 8}) {
    auto with = sc::oracle_z_profile(0.5, ch, n);
    auto without = sc::oracle_z_profile(0.5, BinaryInputChannel::null_channel(), n);
    for (double delta : {0.05, 0.1, 0.2}) {
      for (int i = 0; i < n; ++i) {
        if (with[i] >= 1.0 - delta) CHECK(without[i] >= 1.0 - delta);
        if (without[i] <= delta) CHECK(with[i] <= delta);
      }
    }
  }
}

TEST_CASE("delta policy schedule") {
  construct::DeltaPolicy policy;
  CHECK(policy.delta_n(256) == doctest::Approx(std::exp2(-std::pow(256.0, 0.3))));
  CHECK(policy.delta_n(1 << 20) == doctest::Approx(1e-6));  // floored
  policy.fixed = 0.25;
  CHECK(policy.delta_n(1024) == 0.25);
}

TEST_CASE("profile and partition JSON round trips") {
  auto joint = pmf::build_bss_rd(0.11);
  auto enc = joint.channel("T", {"X"});
  auto prof = construct::estimate_z_profiles(0.5, enc, BinaryInputChannel::null_channel(), 16,
                                             2000, 13);
  auto j = construct::to_json(prof.enc);
  auto back = construct::z_profile_from_json(j);
  CHECK(back.z == prof.enc.z);
  CHECK(back.stderr_ == prof.enc.stderr_);
  CHECK(back.seed == 13);

  auto part = construct::partition_indices(prof.enc, prof.dec, {});
  auto pj = construct::to_json(part);
  auto pback = construct::partition_from_json(pj);
  CHECK(pback.frozen == part.frozen);
  CHECK(pback.deterministic == part.deterministic);
  CHECK(pback.information == part.information);
  CHECK(pback.digest() == part.digest());

  // Tampered sets fail the digest check on load.
  pj["I"] = std::vector<int>{0, 1, 2};
  CHECK_THROWS_AS(construct::partition_from_json(pj), std::runtime_error);
}

TEST_SUITE_END();
