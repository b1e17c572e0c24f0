// Command-line front end: run scenarios, print the encounter-time table,
// grid-search hyperparameters, and summarize metrics files.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oppfl/errors.hpp"
#include "oppfl/metrics_io.hpp"
#include "oppfl/scenario_config.hpp"
#include "oppfl/sim_engine.hpp"
#include "oppfl/tune.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

nlohmann::json load_config_json(const std::string& path,
                                const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw oppfl::ConfigError("cannot open config file " + path);
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw oppfl::ConfigError("config parse error in " + path + ": " + e.what());
  }
  for (const auto& assignment : overrides) oppfl::apply_override(config, assignment);
  return config;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir, std::optional<std::uint64_t> seed,
            std::optional<std::string> strategy, std::optional<int> workers) {
  nlohmann::json config = load_config_json(config_path, overrides);
  if (seed) config["seed"] = *seed;
  if (strategy) config["strategy"] = *strategy;
  if (workers) config["workers"] = *workers;

  oppfl::Scenario scenario = oppfl::parse_scenario(config);

  // Validate dataset files before creating any output.
  if (scenario.dataset.kind == oppfl::DatasetSpecConfig::Kind::Idx) {
    const char* root = std::getenv("OPPFL_DATA_DIR");
    for (const std::string& p : {scenario.dataset.images, scenario.dataset.labels,
                                 scenario.dataset.test_images, scenario.dataset.test_labels}) {
      std::filesystem::path path(p);
      if (path.is_relative() && root) path = std::filesystem::path(root) / path;
      if (!std::filesystem::exists(path))
        throw oppfl::ConfigError("dataset file not found: " + path.string());
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const oppfl::RunMetrics metrics = oppfl::run_scenario(scenario);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  oppfl::write_metrics_csv(out / "metrics.csv", metrics.rows);
  oppfl::write_sessions_jsonl(out / "sessions.jsonl", metrics.sessions);
  oppfl::write_manifest(out / "manifest.json", oppfl::scenario_to_json(scenario), metrics,
                        wall);

  std::uint64_t total_bytes = 0;
  for (const auto& row : metrics.rows) total_bytes += row.bytes_sent;
  std::cout << "wrote " << (out / "metrics.csv").string() << " (" << metrics.rows.size()
            << " rows, " << metrics.sessions.size() << " sessions, " << total_bytes
            << " bytes exchanged, " << wall << "s)\n";
  return kExitOk;
}

int cmd_bench_time(int rho) {
  const auto rows = oppfl::reference_timing_table(rho);
  std::printf("%-20s %10s %10s %10s %10s\n", "profile", "t_train", "t_agg", "t_send",
              "t_enc");
  for (const auto& row : rows)
    std::printf("%-20s %9.3fs %9.3fs %9.3fs %9.2fs\n", row.name.c_str(), row.t_train_s,
                row.t_agg_s, row.t_send_s, row.t_enc_s);
  std::printf("\nmodel sizes: MNIST 2NN %zu params (%zu bytes), CIFAR-10 CNN %zu params "
              "(%zu bytes); rho=%d\n",
              oppfl::kMnist2nnParamCount, oppfl::kMnist2nnParamCount * 4,
              oppfl::kCifarCnnParamCount, oppfl::kCifarCnnParamCount * 4, rho);
  return kExitOk;
}

int cmd_tune(const std::string& config_path, const std::vector<std::string>& overrides,
             const std::string& out_path) {
  nlohmann::json config = load_config_json(config_path, overrides);
  const oppfl::Scenario scenario = oppfl::parse_scenario(config);
  const oppfl::TuneGrid grid = oppfl::parse_tune_grid(config);

  const oppfl::TuneResult result = oppfl::tune_hyperparameters(scenario, grid);
  for (const auto& p : result.points)
    std::printf("eta=%-6g lambda=%-6g kappa=%-6g phi=%-6g  accuracy=%.4f\n", p.eta,
                p.lambda, p.kappa, p.phi, p.accuracy);
  std::printf("best: eta=%g lambda=%g kappa=%g phi=%g (accuracy %.4f over %zu points)\n",
              result.best.eta, result.best.lambda, result.best.kappa, result.best.phi,
              result.best.accuracy, result.points.size());

  // The fragment is the input config with the winning values substituted, so
  // it feeds straight back into `run`.
  oppfl::Scenario tuned = scenario;
  tuned.hyper.eta = result.best.eta;
  tuned.hyper.lambda = result.best.lambda;
  tuned.kappa = result.best.kappa;
  tuned.phi = result.best.phi;
  const nlohmann::json fragment = oppfl::scenario_to_json(tuned);
  if (out_path.empty()) {
    std::cout << fragment.dump(2) << '\n';
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw oppfl::DataError("cannot write " + out_path);
    out << fragment.dump(2) << '\n';
    std::cout << "wrote " << out_path << '\n';
  }
  return kExitOk;
}

int cmd_inspect(const std::string& csv_path) {
  const auto rows = oppfl::read_metrics_csv(csv_path);
  const auto summaries = oppfl::summarize_metrics(rows);
  std::printf("%-24s %8s %10s %10s %10s %14s %8s\n", "strategy", "devices", "final_mean",
              "final_min", "final_max", "total_bytes", "engage");
  for (const auto& [name, s] : summaries)
    std::printf("%-24s %8zu %10.4f %10.4f %10.4f %14llu %7.1f%%\n", name.c_str(),
                s.devices, s.final_accuracy_mean, s.final_accuracy_min,
                s.final_accuracy_max, static_cast<unsigned long long>(s.total_bytes),
                100.0 * s.engagement_rate);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opportunistic federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_path, csv_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<int> workers;
  int rho = 6;

  auto* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("--config", config_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (metrics.csv, manifest.json)");
  run->add_option("--seed", seed, "override the root seed");
  run->add_option("--strategy", strategy, "override the strategy");
  run->add_option("--workers", workers, "worker threads for device training");
  run->add_option("--set", overrides, "config override key.path=value")->take_all();

  auto* bench = app.add_subcommand("bench-time", "print the encounter duration matrix");
  bench->add_option("--rho", rho, "rounds per session");

  auto* tune = app.add_subcommand("tune", "grid-search eta/lambda/kappa/phi");
  tune->add_option("--config", config_path, "scenario JSON file")->required();
  tune->add_option("--out", out_path, "write the tuned config fragment here");
  tune->add_option("--set", overrides, "config override key.path=value")->take_all();

  auto* inspect = app.add_subcommand("inspect", "summarize a metrics CSV");
  inspect->add_option("csv", csv_path, "metrics.csv produced by run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, overrides, out_dir, seed, strategy, workers);
    if (bench->parsed()) return cmd_bench_time(rho);
    if (tune->parsed()) return cmd_tune(config_path, overrides, out_path);
    if (inspect->parsed()) return cmd_inspect(csv_path);
  } catch (const oppfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const oppfl::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
