#include "oppfl/tune.hpp"

#include <algorithm>

#include "oppfl/errors.hpp"

namespace oppfl {

namespace {

// Encounter script for the tuning task: three short phases over goal-heavy
// and random label sets.
std::vector<PhaseSpec> tune_phases() {
  return {{20, {2, 3}, 0.5, 3}, {20, {3, 4, 5}, 0.5, 3}, {20, {4, 5, 6}, 0.5, 3}};
}

}  // namespace

TuneResult tune_hyperparameters(const Scenario& scenario, const TuneGrid& grid) {
  if (grid.etas.empty() || grid.lambdas.empty() || grid.kappas.empty() || grid.phis.empty())
    throw ParameterError("tune grid must not be empty");

  const ScenarioPools pools = load_scenario_pools(scenario);
  const int num_labels = pools.train.num_labels;

  // Everything below runs on the bootstrap slice only.
  const Partition boot_part =
      make_partition(pools.train, scenario.bootstrap.fraction, {},
                     Rng::stream(scenario.seed, "partition").next_u64());
  if (boot_part.bootstrap_indices.empty())
    throw DataError("tune needs a non-empty bootstrap slice");
  const DataPool tune_pool =
      DataPool::from_batch(gather(pools.train, boot_part.bootstrap_indices), num_labels);

  const ParameterVector base_model = train_bootstrap(
      tune_pool.samples, scenario.arch, scenario.bootstrap.epochs, scenario.bootstrap.eta,
      Rng::stream(scenario.seed, "tune-bootstrap").next_u64());

  const auto& learner_labels = scenario.controlled.learner_labels;
  const auto& goal_labels = scenario.controlled.goal_labels;
  const LabelDistribution learner_dist =
      LabelDistribution::uniform_over(learner_labels, num_labels);
  const LabelDistribution goal = LabelDistribution::uniform_over(goal_labels, num_labels);

  // learner data and a goal-matched scoring set, disjoint, both from the slice
  std::vector<std::vector<std::uint32_t>> available = tune_pool.index_by_label;
  Rng carve_rng = Rng::stream(scenario.seed, "tune-carve");
  for (auto& list : available) carve_rng.shuffle(list);
  const std::size_t learner_size =
      std::min<std::size_t>(scenario.controlled.local_set_size, 80);
  const LabeledBatch learner_data =
      gather(tune_pool, draw_matching(available, learner_dist, learner_size));
  const std::size_t score_size = 20 * goal_labels.size();
  const LabeledBatch score_set =
      gather(tune_pool, draw_matching(available, goal, score_size));

  const EncounterSchedule schedule = build_controlled_schedule(
      tune_phases(), num_labels, 1.0, Rng::stream(scenario.seed, "tune-schedule").next_u64());

  // per-encounter neighbor sets, drawn up-front so every grid point sees the
  // same encounters
  std::vector<LabeledBatch> neighbor_sets;
  neighbor_sets.reserve(schedule.size());
  const std::size_t neighbor_size = std::min<std::size_t>(learner_size, 60);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    Rng rng = Rng::stream(scenario.seed, "tune-neighbor", k);
    neighbor_sets.push_back(gather(
        tune_pool, [&] {
          auto by_label = tune_pool.index_by_label;
          for (auto& list : by_label) rng.shuffle(list);
          return draw_matching(by_label, schedule[k].neighbor_dist, neighbor_size);
        }()));
  }

  TuneResult result;
  result.best.accuracy = -1.0;
  for (double eta : grid.etas) {
    for (double lambda : grid.lambdas) {
      for (double kappa : grid.kappas) {
        for (double phi : grid.phis) {
          DeviceState learner;
          learner.id = 0;
          learner.arch = scenario.arch;
          learner.model = base_model;
          learner.local_data = learner_data;
          learner.data_dist = learner_dist;
          learner.goal = goal;
          learner.gamma = GradientTable(scenario.gamma_subsumption);
          learner.decay = DecayState{base_model, kappa, phi, 1.0};
          learner.strategy = Strategy::OpportunisticMomentum;
          learner.hyper = {eta, lambda, scenario.hyper.tau, scenario.hyper.rho};

          for (std::size_t k = 0; k < schedule.size(); ++k) {
            if (should_engage(learner.goal, schedule[k].neighbor_dist, learner.hyper.tau,
                              learner.strategy))
              run_session(learner, neighbor_sets[k], schedule[k].neighbor_dist,
                          learner.hyper.rho, static_cast<int>(k) + 1);
            else
              run_local_round(learner);
          }

          const double acc = evaluate_accuracy(learner.model, learner.arch, score_set);
          result.points.push_back({eta, lambda, kappa, phi, acc});
          if (acc > result.best.accuracy) result.best = result.points.back();
        }
      }
    }
  }
  return result;
}

}  // namespace oppfl
