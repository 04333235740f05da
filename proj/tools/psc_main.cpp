// Command-line front end: experiment runner, construction cache management,
// exact small-n bound verification, and operating-point inspection.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <psc/harness.hpp>
#include <psc/oracle_report.hpp>
#include <psc/parallel.hpp>
#include <psc/version.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBoundViolation = 2;
constexpr int kExitRuntime = 3;

void print_info(const psc::harness::MaterializedJoint& mj) {
  const auto& j = mj.joint;
  auto d = psc::pmf::DistortionMeasure::hamming();
  std::printf("axes:");
  for (const auto& a : j.axes()) std::printf(" %s(%d)", a.name.c_str(), a.size);
  std::printf("\n");
  bool has_w = j.has_axis("W"), has_z = j.has_axis("Z"), has_y = j.has_axis("Y");
  if (j.has_axis("T") && j.has_axis("X")) {
    std::printf("I(X;T)            = %.6f bits\n", j.mutual_information({"X"}, {"T"}));
    std::printf("E d(X,T)          = %.6f\n", j.expected_distortion("X", "T", d));
  }
  if (has_w) {
    auto op = psc::schemes::rimoldi_operating_point(j);
    std::printf("operating point   : R1 >= %.6f, R2 >= %.6f, D1 = %.6f, D2 = %.6f\n", op.r1,
                op.r2, op.d1, op.d2);
    std::printf("I(X;W|T)          = %.6f bits\n", j.mutual_information({"X"}, {"W"}, {"T"}));
    auto mk = j.check_markov({{"X"}, {"W"}, {"T"}});
    std::printf("chain X->W->T     : %s (max violation %.3g bits)\n", mk.pass ? "holds" : "FAILS",
                mk.max_violation_bits);
  }
  if (has_z && !has_w) {
    std::printf("I(X;T|Z)          = %.6f bits\n", j.mutual_information({"X"}, {"T"}, {"Z"}));
    std::printf("E d(X,f(T,Z))     = %.6f\n", j.expected_map_distortion("X", "T", "Z", mj.f, d));
    auto mk = j.check_markov({{"T"}, {"X"}, {"Z"}});
    std::printf("chain T->X->Z     : %s (max violation %.3g bits)\n", mk.pass ? "holds" : "FAILS",
                mk.max_violation_bits);
  }
  if (has_w && has_y && has_z) {
    std::printf("I(X;T|Z)          = %.6f bits\n", j.mutual_information({"X"}, {"T"}, {"Z"}));
    std::printf("I(X;W|Y)          = %.6f bits\n", j.mutual_information({"X"}, {"W"}, {"Y"}));
    std::printf("I(X;W|T,Y)        = %.6f bits\n",
                j.mutual_information({"X"}, {"W"}, {"T", "Y"}));
    auto rep = psc::pmf::validate_srwz_conditions(j, mj.f1, mj.f2, 1.0, 1.0);
    for (const auto& chk : rep.checks)
      std::printf("condition %-24s residual %.6g  %s\n", chk.name.c_str(), chk.residual,
                  chk.pass ? "pass" : "fail");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polar-coded lossy source compression toolkit"};
  app.set_version_flag("--version", psc::kVersion);
  app.require_subcommand(1);

  std::string config_path, cache_dir, joint_file, builder, scheme;
  int threads = psc::default_threads();
  int n_oracle = 8;
  double p_d = 0.11, p_d1 = 0.25, p_d2 = 0.11, p_p = 0.25;
  double fixed_delta = -1.0;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "experiment config (json)")->required();
  run->add_option("--threads", threads, "worker threads");
  run->add_option("--cache", cache_dir, "construction cache directory");

  auto* cons = app.add_subcommand("construct", "build and cache index-set constructions");
  cons->add_option("--config", config_path, "experiment config (json)")->required();
  cons->add_option("--threads", threads, "worker threads");
  cons->add_option("--cache", cache_dir, "construction cache directory");

  auto* oracle = app.add_subcommand("oracle", "exact bound verification at small n");
  oracle->add_option("--scheme", scheme, "rd | sr | wz | srwz")->required();
  oracle->add_option("--n", n_oracle, "block length (power of two, <= 8)");
  oracle->add_option("--D", p_d, "design distortion (rd, wz)");
  oracle->add_option("--D1", p_d1, "coarse design distortion (sr, srwz)");
  oracle->add_option("--D2", p_d2, "refined design distortion (sr, srwz)");
  oracle->add_option("--p", p_p, "side-information noise (wz)");
  oracle->add_option("--delta", fixed_delta, "fixed threshold delta (default: the delta_n policy)");

  auto* info = app.add_subcommand("info", "print rates and operating points for a joint");
  info->add_option("--config", config_path, "read the joint from an experiment config");
  info->add_option("--joint", joint_file, "joint text file");
  info->add_option("--builder", builder, "builder name (bss_rd, bss_sr, dsbs_wz, srwz_degenerate)");
  info->add_option("--D", p_d, "builder parameter D");
  info->add_option("--D1", p_d1, "builder parameter D1");
  info->add_option("--D2", p_d2, "builder parameter D2");
  info->add_option("--p", p_p, "builder parameter p");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || cons->parsed()) {
      auto cfg = psc::harness::ExperimentConfig::load(config_path);
      psc::harness::ConstructionStore store(cache_dir);
      if (cons->parsed()) {
        auto mj = psc::harness::materialize_joint(cfg.joint);
        for (int m : cfg.m_values) {
          for (const auto& req : psc::harness::detail::layer_requests(cfg, mj, 1 << m)) {
            auto c = store.get_or_build(req, threads);
            std::printf("m=%d layer=%d key=%s |H|=%zu |L|=%zu |I|=%zu rate=%.6f overlap=%d\n", m,
                        req.layer, c.cache_key.c_str(), c.partition.frozen.size(),
                        c.partition.deterministic.size(), c.partition.information.size(),
                        c.partition.rate(), c.partition.overlap_count);
          }
        }
        return kExitOk;
      }
      if (cfg.output.empty())
        throw std::invalid_argument("config must set \"output\" for the run subcommand");
      auto table = psc::harness::run_experiment(cfg, store, threads);
      std::filesystem::path out(cfg.output);
      if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
      {
        std::ofstream csv(cfg.output + ".csv");
        psc::harness::write_csv(table, csv);
      }
      {
        std::ofstream side(cfg.output + ".json");
        psc::harness::write_sidecar(cfg, table, side);
      }
      std::printf("wrote %zu rows to %s.csv\n", table.rows.size(), cfg.output.c_str());
      return kExitOk;
    }

    if (oracle->parsed()) {
      psc::construct::DeltaPolicy policy;
      if (fixed_delta >= 0.0) policy.fixed = fixed_delta;
      psc::harness::OracleReport rep;
      if (scheme == "rd")
        rep = psc::harness::oracle_report_rd(p_d, n_oracle, policy);
      else if (scheme == "sr")
        rep = psc::harness::oracle_report_sr(p_d1, p_d2, n_oracle, policy);
      else if (scheme == "wz")
        rep = psc::harness::oracle_report_wz(p_d, p_p, n_oracle, policy);
      else if (scheme == "srwz")
        rep = psc::harness::oracle_report_srwz(p_d1, p_d2, n_oracle, policy);
      else
        throw std::invalid_argument("unknown scheme: " + scheme);
      psc::harness::print_report(rep, std::cout);
      return rep.all_bounds_hold ? kExitOk : kExitBoundViolation;
    }

    if (info->parsed()) {
      psc::harness::JointSource src;
      if (!config_path.empty()) {
        src = psc::harness::ExperimentConfig::load(config_path).joint;
      } else if (!joint_file.empty()) {
        src.file = joint_file;
      } else if (!builder.empty()) {
        src.builder = builder;
        src.params = {{"D", p_d}, {"D1", p_d1}, {"D2", p_d2}, {"p", p_p}};
      } else {
        throw std::invalid_argument("info needs --config, --joint or --builder");
      }
      print_info(psc::harness::materialize_joint(src));
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
