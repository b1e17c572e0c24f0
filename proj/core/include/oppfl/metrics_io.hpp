#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oppfl/sim_engine.hpp"

namespace oppfl {

// CSV with the fixed column set
//   sim_time_s,encounter_idx,device_id,strategy,goal_accuracy,alpha,
//   gamma_size,bytes_sent,engaged
// Numbers print via shortest round-trip formatting, so equal runs produce
// byte-identical files.
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

// One JSON object per session, in commit order.
void write_sessions_jsonl(const std::filesystem::path& path,
                          std::span<const SessionReport> sessions);

void write_manifest(const std::filesystem::path& path, const nlohmann::json& config_echo,
                    const RunMetrics& metrics, double wall_clock_s);

struct StrategySummary {
  std::size_t devices = 0;
  double final_accuracy_mean = 0.0;
  double final_accuracy_min = 0.0;
  double final_accuracy_max = 0.0;
  std::uint64_t total_bytes = 0;
  std::size_t encounter_rows = 0;
  std::size_t engaged_rows = 0;
  double engagement_rate = 0.0;
};

// Per-strategy rollup: final accuracy over devices (last row each), byte
// totals, and the engaged fraction of encounter rows.
std::map<std::string, StrategySummary> summarize_metrics(std::span<const MetricsRow> rows);

}  // namespace oppfl
