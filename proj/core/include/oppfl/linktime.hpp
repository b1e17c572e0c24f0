#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace oppfl {

// Wireless channel. When t_send_override_s is set it wins over the derived
// bytes/datarate figure (profiles quoted from measurement tables round the
// derived value).
struct LinkProfile {
  std::string name;
  double datarate_bps = 1e6;
  std::optional<double> t_send_override_s;
};

// Measured device compute costs: one training round, and one aggregation at
// the worst-case table size (32 entries).
struct ComputeProfile {
  std::string name;
  double t_train_s = 0.0;
  double t_agg_worst_s = 0.0;
};

// modelBytes * 8 / datarate, unless the profile pins a literal value.
double t_send_seconds(std::size_t model_bytes, const LinkProfile& link);

// rho * (2 t_send + 2 t_train + t_agg)
double encounter_time_seconds(int rho, double t_send, double t_train, double t_agg);

// Largest rho <= rho_max whose encounter time fits the predicted duration
// (halved when the encounter must serve both directions); 0 = infeasible.
int feasible_rounds(double predicted_duration_s, double t_send, double t_train,
                    double t_agg, int rho_max, bool split_both_ways);

// Aggregation cost scaled linearly from the worst case at 32 table entries.
double aggregation_time_seconds(const ComputeProfile& compute, std::size_t gamma_size);

// Built-in model size constants used by the reference timing table.
inline constexpr std::size_t kMnist2nnParamCount = 199'210;
inline constexpr std::size_t kCifarCnnParamCount = 1'250'858;

struct TimingRow {
  std::string name;
  double t_train_s;
  double t_agg_s;
  double t_send_s;
  double t_enc_s;
};

// The four built-in (model, link) rows with measured literal constants.
std::vector<TimingRow> reference_timing_table(int rho = 6);

}  // namespace oppfl
