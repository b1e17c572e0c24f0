#include "oppfl/metrics_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "oppfl/errors.hpp"

namespace oppfl {

namespace {

constexpr const char* kHeader =
    "sim_time_s,encounter_idx,device_id,strategy,goal_accuracy,alpha,gamma_size,"
    "bytes_sent,engaged";

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    fields.push_back(line.substr(begin, comma - begin));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return fields;
}

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << kHeader << '\n';
  for (const auto& row : rows) {
    out << format_double(row.sim_time_s) << ',' << row.encounter_idx << ','
        << row.device_id << ',' << to_string(row.strategy) << ','
        << format_double(row.goal_accuracy) << ',' << format_double(row.alpha) << ','
        << row.gamma_size << ',' << row.bytes_sent << ',' << (row.engaged ? 1 : 0)
        << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_metrics_csv(out, rows);
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw FormatError("unexpected metrics CSV header in " + path.string(), 0);

  std::vector<MetricsRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 9)
      throw FormatError("metrics CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields",
                        line_no);
    try {
      MetricsRow row;
      row.sim_time_s = std::stod(fields[0]);
      row.encounter_idx = std::stol(fields[1]);
      row.device_id = std::stoi(fields[2]);
      row.strategy = strategy_from_string(fields[3]);
      row.goal_accuracy = std::stod(fields[4]);
      row.alpha = std::stod(fields[5]);
      row.gamma_size = static_cast<std::size_t>(std::stoull(fields[6]));
      row.bytes_sent = std::stoull(fields[7]);
      row.engaged = fields[8] == "1";
      rows.push_back(row);
    } catch (const std::exception& e) {
      throw FormatError("metrics CSV line " + std::to_string(line_no) + ": " + e.what(),
                        line_no);
    }
  }
  return rows;
}

void write_sessions_jsonl(const std::filesystem::path& path,
                          std::span<const SessionReport> sessions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& s : sessions) {
    nlohmann::json obj = {{"learnerId", s.learner_id},
                          {"neighborId", s.neighbor_id},
                          {"strategy", to_string(s.strategy)},
                          {"rounds", s.rounds},
                          {"similarity", s.similarity},
                          {"alphas", s.alphas},
                          {"lossTrace", s.loss_trace},
                          {"bytesSent", s.bytes_sent}};
    out << obj.dump() << '\n';
  }
}

void write_manifest(const std::filesystem::path& path, const nlohmann::json& config_echo,
                    const RunMetrics& metrics, double wall_clock_s) {
  std::uint64_t total_bytes = 0;
  for (const auto& row : metrics.rows) total_bytes += row.bytes_sent;
  nlohmann::json manifest = {
      {"scenario_hash", [&] {
         std::uint64_t h = 0xcbf29ce484222325ULL;
         for (char c : config_echo.dump()) {
           h ^= static_cast<unsigned char>(c);
           h *= 0x100000001b3ULL;
         }
         char buf[17];
         std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
         return std::string(buf);
       }()},
      {"config", config_echo},
      {"rows", metrics.rows.size()},
      {"sessions", metrics.sessions.size()},
      {"total_bytes_sent", total_bytes},
      {"wall_clock_s", wall_clock_s},
      {"notes", metrics.notes}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << manifest.dump(2) << '\n';
}

std::map<std::string, StrategySummary> summarize_metrics(std::span<const MetricsRow> rows) {
  struct DeviceLast {
    double accuracy = 0.0;
  };
  std::map<std::string, StrategySummary> out;
  std::map<std::string, std::map<int, double>> final_acc;
  for (const auto& row : rows) {
    const std::string key = to_string(row.strategy);
    auto& summary = out[key];
    summary.total_bytes += row.bytes_sent;
    if (row.encounter_idx >= 0) {
      ++summary.encounter_rows;
      if (row.engaged) ++summary.engaged_rows;
    }
    final_acc[key][row.device_id] = row.goal_accuracy;  // rows arrive in time order
  }
  for (auto& [key, summary] : out) {
    const auto& per_device = final_acc[key];
    summary.devices = per_device.size();
    double sum = 0.0, lo = 1.0, hi = 0.0;
    for (const auto& [_, acc] : per_device) {
      sum += acc;
      lo = std::min(lo, acc);
      hi = std::max(hi, acc);
    }
    summary.final_accuracy_mean = per_device.empty() ? 0.0 : sum / per_device.size();
    summary.final_accuracy_min = per_device.empty() ? 0.0 : lo;
    summary.final_accuracy_max = per_device.empty() ? 0.0 : hi;
    summary.engagement_rate =
        summary.encounter_rows == 0
            ? 0.0
            : static_cast<double>(summary.engaged_rows) / summary.encounter_rows;
  }
  return out;
}

}  // namespace oppfl
