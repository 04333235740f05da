#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "psc/construct.hpp"
#include "psc/harness.hpp"
#include "psc/pmf.hpp"
#include "psc/sc_oracle.hpp"
#include "psc/schemes.hpp"

namespace psc::harness {

// Exact-versus-bound verification at small n: total-variation gaps against the
// telescoping bound, the Bhattacharyya ordering under conditioning, the
// deterministic-rule mismatch probability against its two-sided Z bound, and
// the distortion chains that close the achievability arguments. Everything
// here is enumerated exactly; a failed line means a violated theorem, not a
// noisy measurement.

struct OracleLine {
  std::string name;
  double exact = 0.0;
  double bound = 0.0;
  bool is_bound = true;  // when false the line is informational
  bool ok = true;
};

struct OracleReport {
  std::string scheme;
  int n = 0;
  std::vector<OracleLine> lines;
  std::vector<std::string> notes;
  bool all_bounds_hold = true;

  void add_bound(const std::string& name, double exact, double bound, double slack = 1e-9) {
    bool ok = exact <= bound + slack;
    lines.push_back({name, exact, bound, true, ok});
    all_bounds_hold = all_bounds_hold && ok;
  }

  void add_info(const std::string& name, double value) {
    lines.push_back({name, value, 0.0, false, true});
  }
};

namespace oracle_detail {

struct LayerOracleInput {
  double prior1 = 0.5;
  pmf::BinaryInputChannel ch_full;        // encoder-side conditioning
  std::vector<std::uint8_t> sigma;        // coarsening for the deterministic rule
  construct::IndexPartition partition;
  std::function<double(int, int)> letter_distortion;
  double design_d = 0.0;
  double max_d = 1.0;
  std::string label;
};

inline void run_layer_gap(OracleReport& rep, const LayerOracleInput& in, int n) {
  auto cls = sc::classes_from_sets(n, in.partition.frozen, in.partition.deterministic,
                                   in.partition.information);
  auto res = sc::oracle_l1_gap(in.prior1, in.ch_full, in.sigma, cls, n, in.letter_distortion);
  rep.add_bound(in.label + ": ||P-Q||_1 <= Z-sum bound", res.l1_exact, res.bound);
  rep.add_bound(in.label + ": E_Q[d] <= design D + max_d * ||P-Q||_1", res.e_dist_q,
                in.design_d + in.max_d * res.l1_exact);
  rep.add_info(in.label + ": E_P[d] (design point)", res.e_dist_p);
  // A deterministic index whose decoder-side Z is near one makes the bound
  // vacuous; the partition is suspect even though no inequality fails.
  int suspicious = 0;
  {
    int ml = 0;
    for (int s : in.sigma) ml = std::max(ml, s + 1);
    std::vector<double> r0(ml, 0.0), r1(ml, 0.0);
    for (int y = 0; y < in.ch_full.outputs(); ++y) {
      r0[in.sigma[y]] += in.ch_full(y, 0);
      r1[in.sigma[y]] += in.ch_full(y, 1);
    }
    auto zl = sc::oracle_z_profile(in.prior1, pmf::BinaryInputChannel(r0, r1), n);
    for (int i : in.partition.deterministic)
      if (zl[i] > 0.9) ++suspicious;
  }
  if (suspicious > 0)
    rep.notes.push_back(in.label + ": " + std::to_string(suspicious) +
                        " deterministic indices have Z > 0.9 (bound holds but is vacuous)");
}

inline void run_z_ordering(OracleReport& rep, double prior1, const pmf::BinaryInputChannel& ch,
                           int n, const std::string& label) {
  auto z_cond = sc::oracle_z_profile(prior1, ch, n);
  auto z_plain = sc::oracle_z_profile(prior1, pmf::BinaryInputChannel::null_channel(), n);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, z_cond[i] - z_plain[i]);
  rep.add_bound(label + ": max_i [Z(U_i|u,Y) - Z(U_i|u)] <= 0", worst, 0.0, 1e-12);
}

}  // namespace oracle_detail

inline construct::IndexPartition exact_partition(double prior1, const pmf::BinaryInputChannel& enc,
                                                 const pmf::BinaryInputChannel& dec, int n,
                                                 const construct::DeltaPolicy& policy) {
  auto prof = construct::exact_z_profiles(prior1, enc, dec, n);
  return construct::partition_indices(prof.enc, prof.dec, policy);
}

inline OracleReport oracle_report_rd(double D, int n, const construct::DeltaPolicy& policy = {}) {
  OracleReport rep;
  rep.scheme = "rd";
  rep.n = n;
  JointPmf j = pmf::build_bss_rd(D);
  auto cond = schemes::RdScheme::conditioning(j);
  auto part = exact_partition(cond.prior1, cond.enc, cond.dec, n, policy);
  oracle_detail::run_z_ordering(rep, cond.prior1, cond.enc, n, "rd");
  oracle_detail::LayerOracleInput in{cond.prior1,
                                     cond.enc,
                                     std::vector<std::uint8_t>(cond.enc.outputs(), 0),
                                     part,
                                     [](int x, int t) { return x != t ? 1.0 : 0.0; },
                                     D,
                                     1.0,
                                     "rd"};
  oracle_detail::run_layer_gap(rep, in, n);
  rep.add_info("rd: |I|/n", part.rate());
  return rep;
}

inline OracleReport oracle_report_sr(double D1, double D2, int n,
                                     const construct::DeltaPolicy& policy = {}) {
  OracleReport rep;
  rep.scheme = "sr";
  rep.n = n;
  JointPmf j = pmf::build_bss_sr(D1, D2);
  auto c1 = schemes::SrScheme::coarse_conditioning(j);
  auto c2 = schemes::SrScheme::refine_conditioning(j);
  auto p1 = exact_partition(c1.prior1, c1.enc, c1.dec, n, policy);
  auto p2 = exact_partition(c2.prior1, c2.enc, c2.dec, n, policy);
  oracle_detail::run_z_ordering(rep, c1.prior1, c1.enc, n, "sr layer 1");
  oracle_detail::run_z_ordering(rep, c2.prior1, c2.enc, n, "sr layer 2");

  oracle_detail::LayerOracleInput in1{c1.prior1,
                                      c1.enc,
                                      std::vector<std::uint8_t>(c1.enc.outputs(), 0),
                                      p1,
                                      [](int x, int t) { return x != t ? 1.0 : 0.0; },
                                      D1,
                                      1.0,
                                      "sr layer 1"};
  oracle_detail::run_layer_gap(rep, in1, n);

  // Layer 2 observations pack as t * |X| + x; the deterministic rule keeps t.
  int xs = j.axis_size("X");
  std::vector<std::uint8_t> sigma2(static_cast<std::size_t>(2) * xs);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < xs; ++x) sigma2[static_cast<std::size_t>(t) * xs + x] = static_cast<std::uint8_t>(t);
  oracle_detail::LayerOracleInput in2{
      c2.prior1,
      c2.enc,
      sigma2,
      p2,
      [xs](int o, int w) { return (o % xs) != w ? 1.0 : 0.0; },
      D2,
      1.0,
      "sr layer 2"};
  oracle_detail::run_layer_gap(rep, in2, n);
  rep.add_info("sr: |I_T|/n", p1.rate());
  rep.add_info("sr: |I_W|/n", p2.rate());
  return rep;
}

inline OracleReport oracle_report_wz(double D, double p, int n,
                                     const construct::DeltaPolicy& policy = {}) {
  OracleReport rep;
  rep.scheme = "wz";
  rep.n = n;
  auto cns = pmf::build_dsbs_wz(D, p);
  const JointPmf& j = cns.joint;
  auto cond = schemes::WzScheme::conditioning(j);
  auto part = exact_partition(cond.prior1, cond.enc, cond.dec, n, policy);
  auto cls = sc::classes_from_sets(n, part.frozen, part.deterministic, part.information);
  oracle_detail::run_z_ordering(rep, cond.prior1, cond.enc, n, "wz enc view");
  oracle_detail::run_z_ordering(rep, cond.prior1, cond.dec, n, "wz dec view");

  // Gap of the encoder-induced law over (u, (x, z)); the deterministic rule
  // sees x only, and the reproduction is f(t, z).
  int xs = j.axis_size("X"), zs = j.axis_size("Z");
  auto ch_xz = j.channel("T", {"X", "Z"});
  std::vector<std::uint8_t> sigma(static_cast<std::size_t>(xs) * zs);
  for (int x = 0; x < xs; ++x)
    for (int z = 0; z < zs; ++z) sigma[static_cast<std::size_t>(x) * zs + z] = static_cast<std::uint8_t>(x);
  const pmf::ReconMap& f = cns.f;
  oracle_detail::LayerOracleInput in{
      cond.prior1,
      ch_xz,
      sigma,
      part,
      [&f, zs](int o, int t) { return (o / zs) != f(t, o % zs) ? 1.0 : 0.0; },
      D,
      1.0,
      "wz"};
  oracle_detail::run_layer_gap(rep, in, n);

  // Decoder mismatch machinery: exact probability that any deterministic index
  // disagrees between the x-rule and the z-rule along the true path.
  auto p_txz = j.table_in_order({"T", "X", "Z"});
  auto mm = sc::oracle_rule_mismatch(p_txz, xs, zs, cls, n);
  rep.add_bound("wz: P(L-rule mismatch) <= sum_L [Z(.|X) + Z(.|Z)]", mm.p_mismatch, mm.bound);
  rep.add_info("wz: |I|/n", part.rate());
  return rep;
}

inline OracleReport oracle_report_srwz(double D1, double D2, int n,
                                       const construct::DeltaPolicy& policy = {}) {
  OracleReport rep;
  rep.scheme = "srwz";
  rep.n = n;
  auto cns = pmf::build_srwz_degenerate(D1, D2);
  const JointPmf& j = cns.joint;
  auto c1 = schemes::SrwzScheme::coarse_conditioning(j);
  auto c2 = schemes::SrwzScheme::refine_conditioning(j);
  auto p1 = exact_partition(c1.prior1, c1.enc, c1.dec, n, policy);
  auto p2 = exact_partition(c2.prior1, c2.enc, c2.dec, n, policy);
  oracle_detail::run_z_ordering(rep, c1.prior1, c1.enc, n, "srwz layer 1");
  oracle_detail::run_z_ordering(rep, c2.prior1, c2.enc, n, "srwz layer 2");

  oracle_detail::LayerOracleInput in1{c1.prior1,
                                      c1.enc,
                                      std::vector<std::uint8_t>(c1.enc.outputs(), 0),
                                      p1,
                                      [](int x, int t) { return x != t ? 1.0 : 0.0; },
                                      j.expected_distortion("X", "T", pmf::DistortionMeasure::hamming()),
                                      1.0,
                                      "srwz layer 1"};
  oracle_detail::run_layer_gap(rep, in1, n);

  // Layer 2: the encoder's deterministic rule sees its full (t, x) view.
  int xs = j.axis_size("X");
  std::vector<std::uint8_t> sigma2 = schemes::identity_obs_map(c2.enc.outputs());
  oracle_detail::LayerOracleInput in2{
      c2.prior1,
      c2.enc,
      sigma2,
      p2,
      [xs](int o, int w) { return (o % xs) != w ? 1.0 : 0.0; },
      D2,
      1.0,
      "srwz layer 2 (encoder law)"};
  oracle_detail::run_layer_gap(rep, in2, n);

  // Mismatch between the encoder's (t, x)-rule and the decoder's (t, y)-rule.
  int ys = j.axis_size("Y");
  auto p_wtxy = j.table_in_order({"W", "T", "X", "Y"});
  int ma = 2 * xs, mb = 2 * ys;
  std::vector<double> p_vab(static_cast<std::size_t>(2) * ma * mb, 0.0);
  for (int w = 0; w < 2; ++w)
    for (int t = 0; t < 2; ++t)
      for (int x = 0; x < xs; ++x)
        for (int y = 0; y < ys; ++y) {
          double mass = p_wtxy[((static_cast<std::size_t>(w) * 2 + t) * xs + x) * ys + y];
          p_vab[(static_cast<std::size_t>(w) * ma + (t * xs + x)) * mb + (t * ys + y)] += mass;
        }
  auto cls2 = sc::classes_from_sets(n, p2.frozen, p2.deterministic, p2.information);
  auto mm = sc::oracle_rule_mismatch(p_vab, ma, mb, cls2, n);
  rep.add_bound("srwz: P(layer-2 rule mismatch) <= sum_L [Z(.|TX) + Z(.|TY)]", mm.p_mismatch,
                mm.bound);
  rep.add_info("srwz: |I_T|/n", p1.rate());
  rep.add_info("srwz: |I_W|/n", p2.rate());
  return rep;
}

inline void print_report(const OracleReport& rep, std::ostream& out) {
  out << "oracle verification: scheme=" << rep.scheme << " n=" << rep.n << "\n";
  char buf[256];
  for (const auto& line : rep.lines) {
    if (line.is_bound) {
      std::snprintf(buf, sizeof buf, "  %-64s exact=%.12g bound=%.12g  %s\n", line.name.c_str(),
                    line.exact, line.bound, line.ok ? "OK" : "VIOLATED");
    } else {
      std::snprintf(buf, sizeof buf, "  %-64s value=%.12g\n", line.name.c_str(), line.exact);
    }
    out << buf;
  }
  for (const auto& note : rep.notes) out << "  note: " << note << "\n";
  out << (rep.all_bounds_hold ? "all bounds hold\n" : "BOUND VIOLATION\n");
}

}  // namespace psc::harness
