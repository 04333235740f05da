#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "psc/construct.hpp"
#include "psc/parallel.hpp"
#include "psc/pmf.hpp"
#include "psc/rng.hpp"
#include "psc/schemes.hpp"
#include "psc/version.hpp"

namespace psc::harness {

using nlohmann::json;
using pmf::JointPmf;
using schemes::SchemeId;
using schemes::TrialRecord;

// ---- Experiment configuration ------------------------------------------------

struct JointSource {
  std::string builder;            // one of the shipped builders, or empty
  std::map<std::string, double> params;
  std::string file;               // alternative: a joint text file
  std::optional<std::vector<std::vector<int>>> f;   // WZ reconstruction override
  std::optional<std::vector<std::vector<int>>> f1;  // SRWZ overrides
  std::optional<std::vector<std::vector<int>>> f2;
};

struct ConstructionPolicy {
  std::string policy = "delta";  // delta | rate | exact
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  double beta = 0.3;
  double floor = 1e-6;
  std::optional<double> fixed_delta;
  std::vector<double> target_rates;  // for the rate policy: per layer, or one for all

  construct::DeltaPolicy delta_policy() const { return {beta, floor, fixed_delta}; }

  double target_rate_for(int layer) const {
    if (target_rates.size() >= static_cast<std::size_t>(layer)) return target_rates[layer - 1];
    if (target_rates.size() == 1) return target_rates[0];
    throw std::invalid_argument("rate policy needs a target rate for every layer");
  }
};

struct ExperimentConfig {
  std::string scheme;
  JointSource joint;
  std::vector<int> m_values;
  ConstructionPolicy construction;
  std::vector<ConstructionPolicy> layer_policies;  // optional per-layer overrides
  int frozen_seeds = 1;
  int rounding_seeds = 1;
  std::uint64_t master_seed = 1;
  std::string output;            // path prefix for csv + sidecar
  bool srwz_strict = true;
  json echo;                     // the parsed document, for the sidecar

  int trials() const { return frozen_seeds * rounding_seeds; }

  const ConstructionPolicy& policy_for_layer(int layer) const {
    if (static_cast<std::size_t>(layer) <= layer_policies.size())
      return layer_policies[layer - 1];
    return construction;
  }

  std::uint64_t digest() const {
    std::string s = echo.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static ExperimentConfig from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.echo = j;
    cfg.scheme = j.at("scheme").get<std::string>();
    schemes::scheme_from_name(cfg.scheme);  // validates
    const json& js = j.at("joint");
    if (js.contains("builder")) {
      cfg.joint.builder = js.at("builder").get<std::string>();
      if (js.contains("params"))
        for (auto& [k, v] : js.at("params").items()) cfg.joint.params[k] = v.get<double>();
    } else if (js.contains("file")) {
      cfg.joint.file = js.at("file").get<std::string>();
      if (!std::filesystem::exists(cfg.joint.file))
        throw std::invalid_argument("joint file does not exist: " + cfg.joint.file);
    } else {
      throw std::invalid_argument("joint must name a builder or a file");
    }
    auto read_map = [&](const char* key) -> std::optional<std::vector<std::vector<int>>> {
      if (!js.contains(key)) return std::nullopt;
      return js.at(key).get<std::vector<std::vector<int>>>();
    };
    cfg.joint.f = read_map("f");
    cfg.joint.f1 = read_map("f1");
    cfg.joint.f2 = read_map("f2");
    cfg.m_values = j.at("m_values").get<std::vector<int>>();
    if (cfg.m_values.empty()) throw std::invalid_argument("m_values must be nonempty");
    for (int m : cfg.m_values)
      if (m < 0 || m > 16) throw std::invalid_argument("m out of range [0, 16]");
    auto parse_policy = [](const json& c, ConstructionPolicy base) {
      if (c.contains("policy")) base.policy = c.at("policy").get<std::string>();
      if (base.policy != "delta" && base.policy != "rate" && base.policy != "exact")
        throw std::invalid_argument("construction policy must be delta, rate or exact");
      if (c.contains("samples")) base.samples = c.at("samples").get<std::int64_t>();
      if (c.contains("seed")) base.seed = c.at("seed").get<std::uint64_t>();
      if (c.contains("beta")) base.beta = c.at("beta").get<double>();
      if (c.contains("floor")) base.floor = c.at("floor").get<double>();
      if (c.contains("fixed_delta")) base.fixed_delta = c.at("fixed_delta").get<double>();
      if (c.contains("target_rates"))
        base.target_rates = c.at("target_rates").get<std::vector<double>>();
      if (base.samples < 1 && base.policy != "exact")
        throw std::invalid_argument("construction samples must be >= 1");
      return base;
    };
    if (j.contains("construction")) {
      const json& c = j.at("construction");
      cfg.construction = parse_policy(c, cfg.construction);
      // Optional per-layer overrides; entries inherit the shared settings.
      if (c.contains("layers"))
        for (const auto& lc : c.at("layers"))
          cfg.layer_policies.push_back(parse_policy(lc, cfg.construction));
    }
    if (j.contains("trials")) {
      const json& t = j.at("trials");
      if (t.is_number()) {
        cfg.frozen_seeds = t.get<int>();
        cfg.rounding_seeds = 1;
      } else {
        cfg.frozen_seeds = t.at("frozen").get<int>();
        cfg.rounding_seeds = t.at("rounding").get<int>();
      }
    }
    if (cfg.trials() < 1) throw std::invalid_argument("trials must be >= 1");
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("srwz_validation"))
      cfg.srwz_strict = j.at("srwz_validation").get<std::string>() != "report";
    return cfg;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    json j = json::parse(in);
    return from_json(j);
  }
};

// ---- Joint materialization ----------------------------------------------------

inline pmf::ReconMap recon_from_rows(const std::vector<std::vector<int>>& rows) {
  int a = static_cast<int>(rows.size());
  int b = a ? static_cast<int>(rows[0].size()) : 0;
  std::vector<std::uint8_t> t;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != b)
      throw std::invalid_argument("reconstruction map rows must have equal length");
    for (int v : r) t.push_back(static_cast<std::uint8_t>(v));
  }
  return pmf::ReconMap(a, b, std::move(t));
}

struct MaterializedJoint {
  JointPmf joint;
  pmf::ReconMap f;   // WZ
  pmf::ReconMap f1;  // SRWZ coarse
  pmf::ReconMap f2;  // SRWZ refined
};

inline MaterializedJoint materialize_joint(const JointSource& src) {
  auto param = [&](const char* name) {
    auto it = src.params.find(name);
    if (it == src.params.end())
      throw std::invalid_argument(std::string("builder parameter missing: ") + name);
    return it->second;
  };
  if (src.builder == "bss_rd") {
    JointPmf j = pmf::build_bss_rd(param("D"));
    return {std::move(j), {}, {}, {}};
  }
  if (src.builder == "bss_sr") {
    JointPmf j = pmf::build_bss_sr(param("D1"), param("D2"));
    return {std::move(j), {}, {}, {}};
  }
  if (src.builder == "dsbs_wz") {
    auto c = pmf::build_dsbs_wz(param("D"), param("p"));
    return {std::move(c.joint), std::move(c.f), {}, {}};
  }
  if (src.builder == "srwz_degenerate") {
    auto c = pmf::build_srwz_degenerate(param("D1"), param("D2"));
    return {std::move(c.joint), {}, std::move(c.f1), std::move(c.f2)};
  }
  if (!src.builder.empty()) throw std::invalid_argument("unknown builder: " + src.builder);

  JointPmf j = pmf::load_joint_text_file(src.file);
  MaterializedJoint out{std::move(j), {}, {}, {}};
  auto default_first = [&](const char* a, const char* b) {
    return pmf::ReconMap::first_arg(out.joint.axis_size(a), out.joint.axis_size(b));
  };
  if (out.joint.has_axis("Z") && !out.joint.has_axis("W"))
    out.f = src.f ? recon_from_rows(*src.f) : default_first("T", "Z");
  if (out.joint.has_axis("Y") && out.joint.has_axis("Z")) {
    out.f1 = src.f1 ? recon_from_rows(*src.f1) : default_first("T", "Z");
    out.f2 = src.f2 ? recon_from_rows(*src.f2) : default_first("W", "Y");
  }
  return out;
}

// ---- Construction cache --------------------------------------------------------

struct LayerRequest {
  std::string scheme;
  int layer = 1;
  std::uint64_t joint_digest = 0;
  int n = 0;
  ConstructionPolicy policy;
  schemes::LayerConditioning cond;

  std::uint64_t key() const {
    char buf[256];
    double tr = policy.policy == "rate" ? policy.target_rate_for(layer) : -1.0;
    int len = std::snprintf(buf, sizeof buf, "%s|%d|%016llx|%d|%s|%lld|%llu|%a|%a|%a|%a",
                            scheme.c_str(), layer,
                            static_cast<unsigned long long>(joint_digest), n,
                            policy.policy.c_str(), static_cast<long long>(policy.samples),
                            static_cast<unsigned long long>(policy.seed), policy.beta,
                            policy.floor, policy.fixed_delta.value_or(-1.0), tr);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

struct Construction {
  construct::ZProfilePair profiles;
  construct::IndexPartition partition;
  std::string cache_key;
};

inline Construction build_construction(const LayerRequest& req, int threads) {
  Construction out;
  if (req.policy.policy == "exact")
    out.profiles = construct::exact_z_profiles(req.cond.prior1, req.cond.enc, req.cond.dec, req.n);
  else
    out.profiles = construct::estimate_z_profiles(req.cond.prior1, req.cond.enc, req.cond.dec,
                                                  req.n, req.policy.samples, req.policy.seed,
                                                  threads);
  if (req.policy.policy == "rate") {
    out.partition = construct::partition_by_rate(out.profiles.enc, out.profiles.dec,
                                                 req.policy.target_rate_for(req.layer),
                                                 req.policy.delta_policy());
  } else {
    out.partition =
        construct::partition_indices(out.profiles.enc, out.profiles.dec, req.policy.delta_policy());
    if (req.policy.policy == "exact") out.partition.provenance = "exact";
  }
  char keybuf[24];
  std::snprintf(keybuf, sizeof keybuf, "%016llx", static_cast<unsigned long long>(req.key()));
  out.cache_key = keybuf;
  return out;
}

// Disk-backed store keyed by the request digest. Entries embed the request
// fields; a key collision with different fields is a hard error. Writes go
// through a temp file and an atomic rename so concurrent runs can share a dir.
class ConstructionStore {
 public:
  explicit ConstructionStore(std::string dir = "") : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  const std::string& dir() const { return dir_; }

  Construction get_or_build(const LayerRequest& req, int threads) {
    char keybuf[24];
    std::snprintf(keybuf, sizeof keybuf, "%016llx", static_cast<unsigned long long>(req.key()));
    std::string key = keybuf;
    if (dir_.empty()) return build_construction(req, threads);
    std::filesystem::path path = std::filesystem::path(dir_) / (key + ".json");
    if (std::filesystem::exists(path)) return load_entry(path, req, key);
    Construction c = build_construction(req, threads);
    json doc = {{"kind", "construction"},
                {"key", key},
                {"scheme", req.scheme},
                {"layer", req.layer},
                {"joint_digest", req.joint_digest},
                {"n", req.n},
                {"policy", req.policy.policy},
                {"samples", req.policy.samples},
                {"seed", req.policy.seed},
                {"enc_profile", construct::to_json(c.profiles.enc)},
                {"dec_profile", construct::to_json(c.profiles.dec)},
                {"partition", construct::to_json(c.partition)}};
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp);
      out << doc.dump(1) << '\n';
    }
    std::filesystem::rename(tmp, path);
    return c;
  }

 private:
  Construction load_entry(const std::filesystem::path& path, const LayerRequest& req,
                          const std::string& key) {
    std::ifstream in(path);
    json doc = json::parse(in);
    if (doc.at("scheme").get<std::string>() != req.scheme ||
        doc.at("layer").get<int>() != req.layer ||
        doc.at("joint_digest").get<std::uint64_t>() != req.joint_digest ||
        doc.at("n").get<int>() != req.n ||
        doc.at("policy").get<std::string>() != req.policy.policy ||
        doc.at("seed").get<std::uint64_t>() != req.policy.seed)
      throw std::runtime_error("construction cache collision: " + key +
                               " holds a different request");
    Construction c;
    c.profiles.enc = construct::z_profile_from_json(doc.at("enc_profile"));
    c.profiles.dec = construct::z_profile_from_json(doc.at("dec_profile"));
    c.partition = construct::partition_from_json(doc.at("partition"));
    c.cache_key = key;
    return c;
  }

  std::string dir_;
};

// ---- Experiment runner ----------------------------------------------------------

struct ResultsTable {
  std::vector<TrialRecord> rows;
  std::uint64_t config_digest = 0;
  std::vector<std::string> construction_keys;
};

namespace detail {

struct SchemePerM {
  SchemeId id;
  std::optional<schemes::RdScheme> rd;
  std::optional<schemes::SrScheme> sr;
  std::optional<schemes::WzScheme> wz;
  std::optional<schemes::SrwzScheme> srwz;
};

inline std::vector<LayerRequest> layer_requests(const ExperimentConfig& cfg,
                                                const MaterializedJoint& mj, int n) {
  const JointPmf& j = mj.joint;
  SchemeId id = schemes::scheme_from_name(cfg.scheme);
  std::vector<LayerRequest> reqs;
  auto add = [&](int layer, schemes::LayerConditioning cond) {
    reqs.push_back({cfg.scheme, layer, j.digest(), n, cfg.policy_for_layer(layer),
                    std::move(cond)});
  };
  switch (id) {
    case SchemeId::kRd:
      add(1, schemes::RdScheme::conditioning(j));
      break;
    case SchemeId::kSr:
      add(1, schemes::SrScheme::coarse_conditioning(j));
      add(2, schemes::SrScheme::refine_conditioning(j));
      break;
    case SchemeId::kWz:
      add(1, schemes::WzScheme::conditioning(j));
      break;
    case SchemeId::kSrwz:
      add(1, schemes::SrwzScheme::coarse_conditioning(j));
      add(2, schemes::SrwzScheme::refine_conditioning(j));
      break;
  }
  return reqs;
}

inline void check_scheme_axes(const ExperimentConfig& cfg, const JointPmf& j) {
  auto need = [&](std::initializer_list<const char*> names) {
    for (const char* nm : names)
      if (!j.has_axis(nm))
        throw std::invalid_argument("scheme " + cfg.scheme + " needs axis " + nm);
  };
  switch (schemes::scheme_from_name(cfg.scheme)) {
    case SchemeId::kRd: need({"T", "X"}); break;
    case SchemeId::kSr: need({"T", "W", "X"}); break;
    case SchemeId::kWz: need({"T", "X", "Z"}); break;
    case SchemeId::kSrwz: need({"T", "W", "X", "Y", "Z"}); break;
  }
}

}  // namespace detail

inline ResultsTable run_experiment(const ExperimentConfig& cfg, ConstructionStore& store,
                                   int threads = 1) {
  MaterializedJoint mj = materialize_joint(cfg.joint);
  detail::check_scheme_axes(cfg, mj.joint);
  SchemeId id = schemes::scheme_from_name(cfg.scheme);

  ResultsTable table;
  table.config_digest = cfg.digest();
  int trials = cfg.trials();
  table.rows.resize(cfg.m_values.size() * static_cast<std::size_t>(trials));

  // Source samplers (shared, immutable).
  std::vector<std::string> source_axes;
  switch (id) {
    case SchemeId::kRd:
    case SchemeId::kSr: source_axes = {"X"}; break;
    case SchemeId::kWz: source_axes = {"X", "Z"}; break;
    case SchemeId::kSrwz: source_axes = {"X", "Y", "Z"}; break;
  }
  pmf::JointPmf::Sampler sampler = mj.joint.sampler(source_axes);

  for (std::size_t mi = 0; mi < cfg.m_values.size(); ++mi) {
    int m = cfg.m_values[mi];
    int n = 1 << m;
    auto reqs = detail::layer_requests(cfg, mj, n);
    std::vector<Construction> cons;
    for (const auto& r : reqs) {
      cons.push_back(store.get_or_build(r, threads));
      table.construction_keys.push_back(cons.back().cache_key);
    }

    // Base scheme with a placeholder frozen seed; per-trial copies swap it in.
    detail::SchemePerM base;
    base.id = id;
    switch (id) {
      case SchemeId::kRd:
        base.rd = schemes::RdScheme::make(mj.joint, cons[0].partition, 0);
        break;
      case SchemeId::kSr:
        base.sr = schemes::SrScheme::make(mj.joint, cons[0].partition, cons[1].partition, 0);
        break;
      case SchemeId::kWz:
        base.wz = schemes::WzScheme::make(mj.joint, mj.f, cons[0].partition, 0);
        break;
      case SchemeId::kSrwz:
        base.srwz = schemes::SrwzScheme::make(mj.joint, mj.f1, mj.f2, cons[0].partition,
                                              cons[1].partition, 0, 0.0, 0.0, false);
        if (cfg.srwz_strict && !base.srwz->validation.conditions_34_pass)
          throw std::invalid_argument(
              "joint fails the chain conditions; set srwz_validation=report to run anyway");
        break;
    }

    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
      int fi = static_cast<int>(t) / cfg.rounding_seeds;
      int ri = static_cast<int>(t) % cfg.rounding_seeds;
      std::uint64_t frozen_seed = derive_seed(cfg.master_seed, m, fi, StreamRole::kFrozen);
      std::uint64_t rounding_seed = derive_seed(cfg.master_seed, m, ri, StreamRole::kRounding);
      std::uint64_t source_seed = derive_seed(cfg.master_seed, m, t, StreamRole::kSource);
      Rng source(source_seed);
      Rng rounding(rounding_seed);

      xform::BitVec x(n);
      std::vector<std::uint8_t> y, z;
      if (id == SchemeId::kWz) z.resize(n);
      if (id == SchemeId::kSrwz) {
        y.resize(n);
        z.resize(n);
      }
      for (int jx = 0; jx < n; ++jx) {
        const auto& cfg_draw = sampler.draw(source);
        x[jx] = static_cast<std::uint8_t>(cfg_draw[0]);
        if (id == SchemeId::kWz) z[jx] = static_cast<std::uint8_t>(cfg_draw[1]);
        if (id == SchemeId::kSrwz) {
          y[jx] = static_cast<std::uint8_t>(cfg_draw[1]);
          z[jx] = static_cast<std::uint8_t>(cfg_draw[2]);
        }
      }

      TrialRecord rec;
      switch (id) {
        case SchemeId::kRd: {
          auto s = *base.rd;
          s.layer.frozen_seed = frozen_seed;
          rec = s.roundtrip(x, rounding).second;
          break;
        }
        case SchemeId::kSr: {
          auto s = *base.sr;
          s.coarse.frozen_seed = frozen_seed;
          s.refine.frozen_seed = frozen_seed;
          rec = s.roundtrip(x, rounding);
          break;
        }
        case SchemeId::kWz: {
          auto s = *base.wz;
          s.layer.frozen_seed = frozen_seed;
          rec = s.roundtrip(x, z, rounding).second;
          break;
        }
        case SchemeId::kSrwz: {
          auto s = *base.srwz;
          s.coarse.frozen_seed = frozen_seed;
          s.refine.frozen_seed = frozen_seed;
          rec = s.roundtrip(x, y, z, rounding).record;
          break;
        }
      }
      rec.m = m;
      rec.trial = static_cast<int>(t);
      rec.frozen_seed = frozen_seed;
      rec.rounding_seed = rounding_seed;
      rec.source_seed = source_seed;
      table.rows[mi * trials + t] = std::move(rec);
    });
  }
  return table;
}

// CSV schema is fixed: these columns, this order, header always present.
inline void write_csv(const ResultsTable& table, std::ostream& out) {
  out << "scheme,m,n,trial,frozen_seed,rounding_seed,source_seed,rate1,rate2,dist1,dist2,"
         "mismatch_L,target_rate1,target_rate2,target_D1,target_D2\n";
  char buf[512];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf,
                  "%s,%d,%d,%d,%llu,%llu,%llu,%.12g,%.12g,%.12g,%.12g,%ld,%.12g,%.12g,%.12g,%.12g\n",
                  r.scheme.c_str(), r.m, r.n, r.trial,
                  static_cast<unsigned long long>(r.frozen_seed),
                  static_cast<unsigned long long>(r.rounding_seed),
                  static_cast<unsigned long long>(r.source_seed), r.rate1, r.rate2, r.dist1,
                  r.dist2, r.mismatch_l, r.target_rate1, r.target_rate2, r.target_d1,
                  r.target_d2);
    out << buf;
  }
}

inline void write_sidecar(const ExperimentConfig& cfg, const ResultsTable& table,
                          std::ostream& out) {
  json doc = {{"config", cfg.echo},
              {"config_digest", table.config_digest},
              {"rows", table.rows.size()},
              {"library_version", kVersion},
              {"rng_algorithm", kRngAlgorithm},
              {"construction_keys", table.construction_keys}};
  out << doc.dump(1) << '\n';
}

}  // namespace psc::harness
