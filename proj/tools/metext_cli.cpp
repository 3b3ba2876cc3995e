// Command-line front end: instance generation, metric extension,
// verification, extensor-vs-baseline comparison, and WD cover dumps.
// All file I/O is JSON; exit codes are 0 (success / all checks pass),
// 1 (a check failed), 2 (structural or usage error).

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "metext/generate.hpp"
#include "metext/io.hpp"
#include "metext/verify.hpp"

namespace {

int cmd_gen(int n, int k, std::uint64_t seed, const std::string& out) {
  const metext::Instance inst = metext::generate_instance(n, k, seed);
  metext::io::write_json(out, metext::io::instance_to_json(inst));
  std::cerr << "wrote instance with " << n << " points, |A| = " << k << " to " << out
            << "\n";
  return 0;
}

int cmd_extend(const std::string& instance_path, const std::string& metric,
               const std::string& mode, int S, double tol, const std::string& out) {
  const metext::Instance inst = metext::io::load_instance(instance_path);
  const auto& member = inst.metrics.at(metric);
  const auto start = std::chrono::steady_clock::now();
  const auto pre = metext::SharedPrecomputation::build(inst.pair);

  metext::ExtensionResult result;
  if (mode == "exact") {
    result = metext::extend(pre, member.dist, member.mode, metric);
  } else {
    if (S < 0) S = metext::certified_truncation_level(inst.pair, tol);
    result = metext::extend_truncated(pre, member.dist, S, member.mode, metric);
  }
  const auto elapsed = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - start);
  metext::io::write_json(out, metext::io::result_to_json(result));
  std::cerr << "S* = " << result.S_star << ", error bound = " << result.error_bound
            << ", wall time = " << elapsed.count() << " s\n";
  return 0;
}

int cmd_verify(const std::string& instance_path, std::uint64_t seed,
               const std::string& out) {
  const metext::Instance inst = metext::io::load_instance(instance_path);
  metext::VerifyConfig config;
  config.seed = seed;
  const metext::VerificationReport report =
      metext::run_suite(inst.pair, inst.metrics, config);
  if (!out.empty()) metext::io::write_json(out, metext::io::report_to_json(report));
  for (const auto& c : report.checks)
    std::cerr << (c.status == metext::CheckStatus::Fail ? "FAIL " : "pass ") << c.id
              << "\n";
  return report.all_pass() ? 0 : 1;
}

int cmd_compare(const std::string& instance_path, const std::string& d_name,
                const std::string& e_name, const std::string& out) {
  const metext::Instance inst = metext::io::load_instance(instance_path);
  const metext::Matrix& d = inst.metrics.at(d_name).dist;
  const metext::Matrix& e = inst.metrics.at(e_name).dist;

  const auto pre = metext::SharedPrecomputation::build(inst.pair);
  const auto extensor = [&pre](const metext::SubsetPair&, const metext::Matrix& m) {
    return metext::extend(pre, m).matrix;
  };
  const auto baseline = [](const metext::SubsetPair& p, const metext::Matrix& m) {
    return metext::baseline_extend(p, m);
  };
  const double extensor_defect = metext::isometry_defect(inst.pair, d, e, extensor);
  const double baseline_defect = metext::isometry_defect(inst.pair, d, e, baseline);

  std::cout << "isometry defect, extensor:  " << extensor_defect << "\n"
            << "isometry defect, baseline:  " << baseline_defect << "\n";
  if (!out.empty()) {
    nlohmann::json j;
    j["d"] = d_name;
    j["e"] = e_name;
    j["extensor_defect"] = extensor_defect;
    j["baseline_defect"] = baseline_defect;
    metext::io::write_json(out, j);
  }
  return 0;
}

int cmd_wd(const std::string& instance_path, int level, const std::string& out) {
  const metext::Instance inst = metext::io::load_instance(instance_path);
  const metext::WDCollection wd = metext::build_wd(inst.pair, level);
  const metext::WDReport report = metext::check_wd(wd, inst.pair);
  nlohmann::json j = metext::io::wd_to_json(wd, inst.pair);
  j["check"] = report.ok() ? "ok" : report.violations.front().condition;
  if (!out.empty())
    metext::io::write_json(out, j);
  else
    std::cout << j.dump(2) << "\n";
  std::cerr << wd.cells.size() << " cells at level " << level << ", check "
            << (report.ok() ? "clean" : "FAILED") << "\n";
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isometric extension of metrics from a subset to a finite ambient space"};
  app.require_subcommand(1);

  int n = 10, k = 4, level = 0, S = -1;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::string instance, metric = "d0", d_name = "d0", e_name = "d1";
  std::string mode = "exact", out;

  auto* gen = app.add_subcommand("gen", "generate a random instance file");
  gen->add_option("--n", n, "number of points in X")->required();
  gen->add_option("--a", k, "size of the subset A")->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out, "output path")->required();

  auto* extend = app.add_subcommand("extend", "extend a named metric from A to X");
  extend->add_option("--instance", instance, "instance file")->required();
  extend->add_option("--metric", metric, "metric name within the instance");
  extend->add_option("--mode", mode, "exact or truncated")
      ->check(CLI::IsMember({"exact", "truncated"}));
  extend->add_option("--S", S, "truncation level (truncated mode)")
      ->check(CLI::Range(0, 64));
  extend->add_option("--tol", tol, "certified error target when --S is omitted");
  extend->add_option("--out", out, "output path")->required();

  auto* verify = app.add_subcommand("verify", "run the full property suite");
  verify->add_option("--instance", instance, "instance file")->required();
  verify->add_option("--seed", seed, "seed for randomized checks");
  verify->add_option("--out", out, "report output path");

  auto* compare = app.add_subcommand("compare", "extensor vs baseline isometry defect");
  compare->add_option("--instance", instance, "instance file")->required();
  compare->add_option("--d", d_name, "first metric name");
  compare->add_option("--e", e_name, "second metric name");
  compare->add_option("--out", out, "JSON output path");

  auto* wd = app.add_subcommand("wd", "dump the WD collection at one level");
  wd->add_option("--instance", instance, "instance file")->required();
  wd->add_option("--k", level, "cover level")->check(CLI::NonNegativeNumber);
  wd->add_option("--out", out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(n, k, seed, out);
    if (extend->parsed()) return cmd_extend(instance, metric, mode, S, tol, out);
    if (verify->parsed()) return cmd_verify(instance, seed, out);
    if (compare->parsed()) return cmd_compare(instance, d_name, e_name, out);
    if (wd->parsed()) return cmd_wd(instance, level, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
