// Command-line front end: run scenarios to CSV/summary/plots, run the
// built-in verification suite, or re-plot an existing log.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcmsim/config.hpp"
#include "rcmsim/csv_log.hpp"
#include "rcmsim/plot.hpp"
#include "rcmsim/rcmsim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunOutcome {
  int exit_code = 0;
  std::string message;
};

json summary_to_json(const rcmsim::RunSummary& s) {
  return json{{"scenario", s.scenario},
              {"terminal_e_rcm", s.terminal_e_rcm},
              {"max_e_rcm", s.max_e_rcm},
              {"terminal_f_rcm_norm", s.terminal_f_rcm_norm},
              {"rms_e_ins", s.rms_e_ins},
              {"classification_accuracy", s.classification_accuracy},
              {"runtime_seconds", s.runtime_seconds}};
}

RunOutcome run_one(const fs::path& config_path, const fs::path& out_dir,
                   const std::vector<std::string>& overrides, bool plots,
                   std::mutex& io_mutex) {
  RunOutcome outcome;
  std::string scenario = config_path.stem().string();
  try {
    rcmsim::ScenarioConfig cfg =
        rcmsim::config::load_scenario(config_path.string(), overrides);
    scenario = cfg.name;

    const auto t0 = std::chrono::steady_clock::now();
    rcmsim::SimLog log = rcmsim::run_scenario(cfg);
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const rcmsim::RunSummary summary =
        rcmsim::summarize(log, cfg.name, runtime);

    fs::create_directories(out_dir);
    const fs::path csv_path = out_dir / (cfg.name + ".csv");
    rcmsim::write_csv(log, csv_path.string());

    const fs::path summary_path = out_dir / (cfg.name + ".summary.json");
    std::ofstream sout(summary_path);
    sout << summary_to_json(summary).dump(2) << '\n';
    if (!sout) throw std::runtime_error("cannot write " + summary_path.string());

    if (plots) {
      rcmsim::write_standard_plots(log, (out_dir / cfg.name).string());
    }

    std::lock_guard<std::mutex> lock(io_mutex);
    std::cout << scenario << ": " << log.records.size() << " steps in "
              << runtime << " s | terminal e_rcm " << summary.terminal_e_rcm
              << " m | terminal |f_rcm| " << summary.terminal_f_rcm_norm
              << " N | rms e_ins " << summary.rms_e_ins << " m\n";
    for (const std::string& w : log.warnings) {
      std::cout << "  warning: " << w << '\n';
    }
  } catch (const rcmsim::ConfigError& e) {
    outcome.exit_code = 1;
    outcome.message = scenario + ": config error: " + e.what();
  } catch (const rcmsim::SimulationError& e) {
    outcome.exit_code = 2;
    outcome.message = scenario + ": simulation error: " + e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = 2;
    outcome.message = scenario + ": error: " + e.what();
  }
  return outcome;
}

int cmd_run(const std::string& config, const std::string& out,
            const std::vector<std::string>& overrides, bool plots,
            unsigned parallel) {
  std::vector<fs::path> configs;
  const fs::path config_path(config);
  if (fs::is_directory(config_path)) {
    for (const auto& entry : fs::directory_iterator(config_path)) {
      if (entry.path().extension() == ".json") {
        configs.push_back(entry.path());
      }
    }
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
      std::cerr << "no .json scenario files in " << config << '\n';
      return 1;
    }
  } else {
    configs.push_back(config_path);
  }

  std::mutex io_mutex;
  std::vector<RunOutcome> outcomes(configs.size());
  if (parallel <= 1 || configs.size() == 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) {
      outcomes[i] = run_one(configs[i], out, overrides, plots, io_mutex);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= configs.size()) return;
        outcomes[i] = run_one(configs[i], out, overrides, plots, io_mutex);
      }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(
        parallel, static_cast<unsigned>(configs.size()));
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  int worst = 0;
  for (const RunOutcome& o : outcomes) {
    if (!o.message.empty()) std::cerr << o.message << '\n';
    worst = std::max(worst, o.exit_code);
  }
  return worst;
}

int cmd_verify(bool inject_jacobian_error) {
  rcmsim::VerifyOptions opt;
  opt.perturb_jacobian = inject_jacobian_error;
  const auto results = rcmsim::run_verification(opt);

  std::size_t name_width = 0;
  for (const auto& r : results) name_width = std::max(name_width, r.name.size());
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
              << std::string(name_width - r.name.size() + 2, ' ') << r.detail
              << '\n';
    failures += r.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all checks passed"
                              : std::to_string(failures) + " check(s) failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}

int cmd_plot(const std::string& csv, const std::string& out) {
  try {
    const rcmsim::SimLog log = rcmsim::read_csv(csv);
    fs::create_directories(out);
    const std::string stem =
        (fs::path(out) / fs::path(csv).stem()).string();
    const auto files = rcmsim::write_standard_plots(log, stem);
    for (const std::string& f : files) std::cout << f << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "plot error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive remote-center-of-motion admittance control "
               "simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  std::vector<std::string> overrides;
  bool plots = false;
  unsigned parallel = 1;

  CLI::App* run = app.add_subcommand(
      "run", "simulate one scenario file or a directory of scenarios");
  run->add_option("--config", config, "scenario .json file or directory")
      ->required();
  run->add_option("--out", out, "output directory")
      ->envname("RCMSIM_OUT_DIR");
  run->add_option("--set", overrides,
                  "override a config field, e.g. --set gains.k_adm=0.2");
  run->add_flag("--plots", plots, "also write the standard SVG plots");
  run->add_option("--parallel", parallel,
                  "run up to N scenarios concurrently");

  bool inject_jacobian_error = false;
  CLI::App* verify =
      app.add_subcommand("verify", "run the built-in verification suite");
  verify->add_flag("--inject-jacobian-error", inject_jacobian_error)
      ->group("");  // test hook, hidden from help

  std::string csv_path;
  std::string plot_out = ".";
  CLI::App* plot = app.add_subcommand(
      "plot", "render the standard plots from an existing run CSV");
  plot->add_option("--csv", csv_path, "run log written by `run`")->required();
  plot->add_option("--out", plot_out, "output directory")
      ->envname("RCMSIM_OUT_DIR");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config, out, overrides, plots, parallel);
  if (verify->parsed()) return cmd_verify(inject_jacobian_error);
  if (plot->parsed()) return cmd_plot(csv_path, plot_out);
  return 0;
}
