#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oppfl/dataset.hpp"
#include "oppfl/label_space.hpp"
#include "oppfl/learner.hpp"
#include "oppfl/linktime.hpp"
#include "oppfl/mlp.hpp"
#include "oppfl/mobility.hpp"

namespace oppfl {

struct DatasetSpecConfig {
  enum class Kind { Synthetic, Idx } kind = Kind::Synthetic;
  int num_labels = 10;
  // synthetic
  int per_label = 600;
  int test_per_label = 200;
  int input_dim = 16;
  double spread = 0.05;
  // idx (paths resolved against OPPFL_DATA_DIR when relative)
  std::string images, labels, test_images, test_labels;
};

struct BootstrapSpec {
  double fraction = 0.1;
  int epochs = 200;
  double eta = 0.5;
};

// One block of the scripted encounter sequence: a fixed fraction of its
// encounters see exactly `fixed_labels`, the rest see `random_label_count`
// labels drawn fresh from the whole label space.
struct PhaseSpec {
  int count = 100;
  std::vector<int> fixed_labels;
  double fixed_fraction = 0.5;
  int random_label_count = 3;
};

struct ControlledSpec {
  std::vector<PhaseSpec> phases;  // empty = the default three-phase script
  std::vector<int> learner_labels{0, 1};
  std::vector<int> goal_labels{0, 1, 2, 3, 4};
  std::size_t local_set_size = 80;
};

struct MobilitySpec {
  Arena arena;
  LevyParams levy;
  int devices_per_region = 5;
  int episodes = 10;
  long episode_ticks = 3600;
  std::size_t local_set_size = 80;
  int goal_extra_labels = 3;
};

struct EvaluationSpec {
  std::size_t test_size = 500;
  double interval_s = 300.0;  // mobility mode; controlled evaluates per encounter
};

struct Scenario {
  enum class Kind { Controlled, Mobility } kind = Kind::Controlled;
  std::uint64_t seed = 1;
  int workers = 1;
  DatasetSpecConfig dataset;
  MlpArchitecture arch{16, {64, 64}, 10};
  HyperParams hyper;
  double kappa = 2.0;
  double phi = 1.0;
  Strategy strategy = Strategy::OpportunisticMomentum;
  LinkProfile link{"sim-1mbps", 1e6, {}};
  ComputeProfile compute{"desk", 0.1, 0.064};
  BootstrapSpec bootstrap;
  bool gamma_subsumption = false;
  EvaluationSpec evaluation;
  ControlledSpec controlled;
  MobilitySpec mobility;
};

// Default three-phase script: per phase, half the encounters carry the fixed
// label set and half carry three labels drawn from the full space.
std::vector<PhaseSpec> default_controlled_phases();

struct ScheduledEncounter {
  LabelDistribution neighbor_dist;
  double duration_s = 0.0;
};
using EncounterSchedule = std::vector<ScheduledEncounter>;

// Expand phases into concrete encounters. Durations are drawn uniformly in
// [min_duration_s, 2 * min_duration_s), so a caller passing the cost of a
// full-rho session guarantees every encounter is feasible.
EncounterSchedule build_controlled_schedule(std::span<const PhaseSpec> phases,
                                            int num_labels, double min_duration_s,
                                            std::uint64_t seed);

// Full-batch epochs with early stopping once held-out loss (a seeded 10%
// slice) has risen for three consecutive epochs; returns the best snapshot.
ParameterVector train_bootstrap(const LabeledBatch& data, const MlpArchitecture& arch,
                                int epochs, double eta, std::uint64_t seed);

// Top-1 accuracy; argmax ties resolve to the lowest label id.
double evaluate_accuracy(const ParameterVector& params, const MlpArchitecture& arch,
                         const LabeledBatch& test);

struct MetricsRow {
  double sim_time_s = 0.0;
  long encounter_idx = -1;  // -1 marks evaluation/local-training rows
  int device_id = 0;
  Strategy strategy = Strategy::Local;
  double goal_accuracy = 0.0;
  double alpha = 1.0;
  std::size_t gamma_size = 0;
  std::uint64_t bytes_sent = 0;  // incremental, attributed to the session owner
  bool engaged = false;
};

struct RunMetrics {
  std::vector<MetricsRow> rows;
  std::vector<SessionReport> sessions;
  std::vector<std::string> notes;
};

struct ScenarioPools {
  DataPool train;
  DataPool test;
};

ScenarioPools load_scenario_pools(const Scenario& scenario);

// The mobility world before any simulation: 45 devices with region-derived
// data, five-label goals, per-device test sets, trajectories and encounters.
struct MobilityWorld {
  ParameterVector bootstrap_model;
  std::vector<DeviceState> devices;
  std::vector<GoalTestSet> test_sets;
  std::vector<Trajectory> trajectories;
  std::vector<Encounter> encounters;
};

MobilityWorld build_mobility_world(const Scenario& scenario, const ScenarioPools& pools);

RunMetrics run_controlled(const Scenario& scenario);
RunMetrics run_mobility(const Scenario& scenario);
RunMetrics run_scenario(const Scenario& scenario);

}  // namespace oppfl
