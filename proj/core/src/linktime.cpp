#include "oppfl/linktime.hpp"

#include "oppfl/errors.hpp"

namespace oppfl {

double t_send_seconds(std::size_t model_bytes, const LinkProfile& link) {
  if (link.t_send_override_s) {
    if (*link.t_send_override_s < 0.0) throw ParameterError("t_send override must be >= 0");
    return *link.t_send_override_s;
  }
  if (model_bytes == 0) throw ParameterError("model size must be positive");
  if (!(link.datarate_bps > 0.0)) throw ParameterError("datarate must be positive");
  return static_cast<double>(model_bytes) * 8.0 / link.datarate_bps;
}

double encounter_time_seconds(int rho, double t_send, double t_train, double t_agg) {
  if (rho < 1) throw ParameterError("rho must be >= 1");
  if (t_send < 0.0 || t_train < 0.0 || t_agg < 0.0)
    throw ParameterError("cost terms must be >= 0");
  return static_cast<double>(rho) * (2.0 * t_send + 2.0 * t_train + t_agg);
}

int feasible_rounds(double predicted_duration_s, double t_send, double t_train,
                    double t_agg, int rho_max, bool split_both_ways) {
  if (predicted_duration_s < 0.0) throw ParameterError("duration must be >= 0");
  const double budget = split_both_ways ? predicted_duration_s / 2.0 : predicted_duration_s;
  for (int r = rho_max; r >= 1; --r)
    if (encounter_time_seconds(r, t_send, t_train, t_agg) <= budget) return r;
  return 0;
}

double aggregation_time_seconds(const ComputeProfile& compute, std::size_t gamma_size) {
  return compute.t_agg_worst_s * static_cast<double>(gamma_size) / 32.0;
}

std::vector<TimingRow> reference_timing_table(int rho) {
  struct Entry {
    const char* name;
    double t_train, t_agg, t_send;
  };
  // Raspberry Pi 4 measurements; t_send literals as published for
  // WiFi-direct (250 Mbps) and Bluetooth (2 Mbps).
  static constexpr Entry kEntries[] = {
      {"MNIST_WIFI", 1.543, 0.064, 0.020},
      {"MNIST_Bluetooth", 1.543, 0.064, 3.05},
      {"CIFAR-10_WIFI", 5.740, 0.448, 0.153},
      {"CIFAR-10_Bluetooth", 5.740, 0.448, 19.1},
  };
  std::vector<TimingRow> rows;
  for (const auto& e : kEntries)
    rows.push_back({e.name, e.t_train, e.t_agg, e.t_send,
                    encounter_time_seconds(rho, e.t_send, e.t_train, e.t_agg)});
  return rows;
}

}  // namespace oppfl
