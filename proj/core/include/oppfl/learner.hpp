#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oppfl/label_space.hpp"
#include "oppfl/mlp.hpp"

namespace oppfl {

enum class Strategy {
  Local,
  PairwiseFedAvg,
  GreedyNoSim,
  GreedySim,
  OpportunisticMomentum,
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct GammaEntry {
  GradientVector gradient;
  double weight_cache = -1.0;  // < 0 until the goal-similarity weight is computed
  long last_updated = 0;
};

// Maps a neighbor's label set to the most recent gradient learned on that
// set. With subsumption enabled, no key is ever a strict subset of another.
class GradientTable {
 public:
  GradientTable() = default;
  explicit GradientTable(bool subsumption) : subsumption_(subsumption) {}

  void store(const LabelSet& key, GradientVector grad, long tick);
  // Table size if `key` were stored now; used to price aggregation time
  // before committing to a session.
  std::size_t size_after_store(const LabelSet& key) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(const LabelSet& key) const { return entries_.count(key) != 0; }
  bool subsumption_enabled() const noexcept { return subsumption_; }
  std::map<LabelSet, GammaEntry>& entries() noexcept { return entries_; }
  const std::map<LabelSet, GammaEntry>& entries() const noexcept { return entries_; }

 private:
  std::map<LabelSet, GammaEntry> entries_;
  bool subsumption_ = false;
};

// Learning-rate decay anchored at the bootstrap snapshot. The sigmoid of the
// scaled drift is clamped by a running minimum, so emitted factors never
// increase over a device's lifetime.
struct DecayState {
  ParameterVector w0;
  double kappa = 2.0;
  double phi = 1.0;
  double running_min_alpha = 1.0;
};

double decay_factor(DecayState& state, const ParameterVector& current_model);

struct HyperParams {
  double eta = 0.05;
  double lambda = 1.0;
  double tau = 0.2;
  int rho = 6;
};

struct DeviceState {
  int id = 0;
  MlpArchitecture arch;
  ParameterVector model;
  long clock = 0;  // +1 per committed model update
  LabeledBatch local_data;
  LabelDistribution data_dist;
  LabelDistribution goal;
  GradientTable gamma;
  DecayState decay;
  Strategy strategy = Strategy::Local;
  HyperParams hyper;
};

// Gate on the neighbor's data label distribution: local never engages,
// greedy-no-sim and pairwise always do, the similarity-aware strategies
// require sim(goal, neighbor) strictly above tau.
bool should_engage(const LabelDistribution& goal, const LabelDistribution& neighbor_dist,
                   double tau, Strategy strategy);

// (w_l * local + w_n * neighbor) / (w_l + w_n)
GradientVector greedy_aggregate(const GradientVector& local_grad,
                                const GradientVector& neighbor_grad, double w_local,
                                double w_neighbor);

// Weighted mean of the local gradient and every stored table gradient, each
// table entry weighted by the goal similarity of (a uniform distribution
// over) its label set. An empty table returns the local gradient unchanged.
GradientVector momentum_aggregate(const GradientVector& local_grad, double w_local,
                                  GradientTable& gamma, const LabelDistribution& goal,
                                  double lambda);

struct SessionReport {
  int learner_id = 0;
  int neighbor_id = -1;
  Strategy strategy = Strategy::Local;
  int rounds = 0;
  double similarity = 0.0;
  std::vector<double> alphas;
  std::vector<double> loss_trace;  // learner's local-data loss entering each round
  std::uint64_t bytes_sent = 0;    // model out + gradient back, per round
};

// One engagement: rho rounds of remote gradient, table store, aggregate,
// decayed step. Commits atomically -- any error leaves the learner's
// state exactly as it was.
SessionReport run_session(DeviceState& learner, const LabeledBatch& neighbor_data,
                          const LabelDistribution& neighbor_dist, int rho,
                          int neighbor_id = -1);

// One full-batch step on local data at rate eta * alpha.
void run_local_round(DeviceState& device);

// Baseline: both sides iterate from the mean of their models, averaging
// after each round of simultaneous local steps; both adopt the result.
void pairwise_fed_avg_session(DeviceState& a, DeviceState& b, int rounds);

}  // namespace oppfl
