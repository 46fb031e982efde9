// pobs: penalized p-obstacle solver and free-boundary verification suite.
//
//   pobs solve  [config.ini] [--section.key value ...]
//   pobs verify [config.ini] --field u.pobs [--section.key value ...]
//   pobs sweep  [config.ini] --vary key=value [--vary key=value ...] [--jobs N]
//   pobs emit-plots --report report.json --out dir
//
// Exit status: 0 pass, 1 criterion failure, 2 usage/config error, 3 runtime error.

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "pobs/config.hpp"
#include "pobs/fieldio.hpp"
#include "pobs/pipeline.hpp"

namespace {

using namespace pobs;

struct Overrides {
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    for (const auto& key : config_keys())
      cmd->add_option("--" + key, values[key], "override " + key)->group("Config overrides");
  }

  RunConfig build(const std::string& path) const {
    RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
    for (const auto& [k, v] : values)
      if (!v.empty()) set_config_value(cfg, k, v);
    cfg.validate();
    return cfg;
  }
};

void summarize(const VerifyOutcome& v) {
  for (const auto& c : v.report["criteria"])
    std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << " value="
              << c["value"] << " " << c["relation"].get<std::string>() << " " << c["tolerance"] << "\n";
  std::cout << "report: " << v.report_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized p-obstacle solver and free-boundary verification suite"};
  app.require_subcommand(1);

  std::string config_path, field_path, report_path, out_dir;
  std::vector<std::string> vary;
  int jobs = 1;

  auto* solve = app.add_subcommand("solve", "run the eps-continuation and write u.pobs + solve_log.json");
  solve->add_option("config", config_path, "configuration file")->check(CLI::ExistingFile);
  Overrides solve_ov;
  solve_ov.attach(solve);

  auto* verify = app.add_subcommand("verify", "run the verification suite on a field file");
  verify->add_option("config", config_path, "configuration file")->check(CLI::ExistingFile);
  verify->add_option("--field", field_path, "POBS1 field file")->required();
  Overrides verify_ov;
  verify_ov.attach(verify);

  auto* sweep = app.add_subcommand("sweep", "solve + verify over a Cartesian product of overrides");
  sweep->add_option("config", config_path, "configuration file")->check(CLI::ExistingFile);
  sweep->add_option("--vary", vary, "key=value alternative (repeat per value)")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  Overrides sweep_ov;
  sweep_ov.attach(sweep);

  auto* plots = app.add_subcommand("emit-plots", "write plot CSVs and manifest.json from a report");
  plots->add_option("--report", report_path, "report.json from verify")->required()->check(CLI::ExistingFile);
  plots->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*solve) {
      const RunConfig cfg = solve_ov.build(config_path);
      const SolveOutcome s = run_solve(cfg);
      for (const auto& step : s.log["steps"])
        std::cout << "eps=" << step["eps"] << " converged=" << step["converged"] << " residual="
                  << step["residual_norm"] << " newton=" << step["newton_iterations"] << " sup=" << step["sup_norm"]
                  << "\n";
      std::cout << "field: " << s.field_path << "\n";
      return s.ok ? kExitPass : kExitCriterion;
    }
    if (*verify) {
      const RunConfig cfg = verify_ov.build(config_path);
      const VerifyOutcome v = run_verify(cfg, field_path);
      summarize(v);
      return v.pass ? kExitPass : kExitCriterion;
    }
    if (*sweep) {
      const RunConfig cfg = sweep_ov.build(config_path);
      std::vector<std::pair<std::string, std::vector<std::string>>> axes;
      for (const auto& item : vary) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--vary expects key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        (void)get_config_value(cfg, key);
        auto it = std::find_if(axes.begin(), axes.end(), [&](const auto& a) { return a.first == key; });
        if (it == axes.end()) {
          axes.push_back({key, {}});
          it = axes.end() - 1;
        }
        it->second.push_back(item.substr(eq + 1));
      }
      const auto runs = run_sweep(cfg, axes, jobs);
      int worst = kExitPass;
      for (const auto& r : runs) {
        std::cout << r.dir << " exit=" << r.exit_code << (r.error.empty() ? "" : " error=" + r.error) << "\n";
        worst = std::max(worst, r.exit_code);
      }
      return worst;
    }
    if (*plots) {
      std::ifstream in(report_path);
      nlohmann::json report;
      try {
        report = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("malformed report: ") + e.what(), 0);
      }
      for (const auto& f : emit_plot_data(report, out_dir)) std::cout << f << "\n";
      return kExitPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CoefficientError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
