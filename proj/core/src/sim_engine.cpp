#include "oppfl/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <thread>

#include "oppfl/errors.hpp"

namespace oppfl {

namespace {

std::filesystem::path resolve_data_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* root = std::getenv("OPPFL_DATA_DIR")) return std::filesystem::path(root) / p;
  }
  return p;
}

// Contiguous chunks of [0, n) across up to `workers` threads. Jobs must be
// independent; commit anything order-sensitive after the join.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  const std::size_t nthreads =
      std::min<std::size_t>(std::max(workers, 1), n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(nthreads);
  std::vector<std::thread> threads;
  threads.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    threads.emplace_back([&, t] {
      const std::size_t lo = n * t / nthreads;
      const std::size_t hi = n * (t + 1) / nthreads;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<int> pick_distinct_labels(std::vector<int> candidates, int count, Rng& rng) {
  if (count > static_cast<int>(candidates.size()))
    throw ParameterError("not enough labels to choose from");
  for (int k = 0; k < count; ++k) {
    const auto j = k + static_cast<int>(rng.below(candidates.size() - k));
    std::swap(candidates[static_cast<std::size_t>(k)], candidates[static_cast<std::size_t>(j)]);
  }
  candidates.resize(static_cast<std::size_t>(count));
  return candidates;
}

// Sample a batch matching `dist` from per-label index lists without
// consuming them (each call draws independently).
std::vector<std::uint32_t> sample_matching(
    const std::vector<std::vector<std::uint32_t>>& by_label, const LabelDistribution& dist,
    std::size_t size, Rng& rng) {
  const auto counts = label_counts_for(dist, size);
  std::vector<std::uint32_t> out;
  out.reserve(size);
  for (int l = 0; l < dist.num_labels(); ++l) {
    const auto& list = by_label[static_cast<std::size_t>(l)];
    const std::size_t want = counts[static_cast<std::size_t>(l)];
    if (want == 0) continue;
    if (want > list.size())
      throw CapacityError("label " + std::to_string(l) + " exhausted (need " +
                              std::to_string(want) + ", have " +
                              std::to_string(list.size()) + ")",
                          l);
    std::vector<std::uint32_t> copy = list;
    for (std::size_t k = 0; k < want; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(copy.size() - k));
      std::swap(copy[k], copy[j]);
    }
    out.insert(out.end(), copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(want));
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> indices_by_label(const DataPool& pool,
                                                         std::span<const std::uint32_t> subset) {
  std::vector<std::vector<std::uint32_t>> by_label(
      static_cast<std::size_t>(pool.num_labels));
  for (std::uint32_t idx : subset)
    by_label[static_cast<std::size_t>(pool.samples.labels[idx])].push_back(idx);
  return by_label;
}

DeviceState make_device(int id, const Scenario& scenario, const ParameterVector& bootstrap,
                        LabeledBatch data, LabelDistribution data_dist,
                        LabelDistribution goal) {
  DeviceState dev;
  dev.id = id;
  dev.arch = scenario.arch;
  dev.model = bootstrap;
  dev.local_data = std::move(data);
  dev.data_dist = std::move(data_dist);
  dev.goal = std::move(goal);
  dev.gamma = GradientTable(scenario.gamma_subsumption);
  dev.decay = DecayState{bootstrap, scenario.kappa, scenario.phi, 1.0};
  dev.strategy = scenario.strategy;
  dev.hyper = scenario.hyper;
  return dev;
}

SessionReport synthesize_pairwise_report(int a, int b, int rounds, double sim,
                                         const MlpArchitecture& arch) {
  SessionReport rep;
  rep.learner_id = a;
  rep.neighbor_id = b;
  rep.strategy = Strategy::PairwiseFedAvg;
  rep.rounds = rounds;
  rep.similarity = sim;
  rep.bytes_sent =
      2ull * static_cast<std::uint64_t>(rounds) * arch.serialized_size_bytes();
  return rep;
}

}  // namespace

ScenarioPools load_scenario_pools(const Scenario& scenario) {
  const auto& ds = scenario.dataset;
  if (ds.kind == DatasetSpecConfig::Kind::Synthetic) {
    return {synth_blobs(ds.num_labels, ds.per_label, ds.input_dim, ds.spread,
                        Rng::stream(scenario.seed, "dataset-train").next_u64()),
            synth_blobs(ds.num_labels, ds.test_per_label, ds.input_dim, ds.spread,
                        Rng::stream(scenario.seed, "dataset-test").next_u64())};
  }
  return {load_idx(resolve_data_path(ds.images), resolve_data_path(ds.labels)),
          load_idx(resolve_data_path(ds.test_images), resolve_data_path(ds.test_labels))};
}

std::vector<PhaseSpec> default_controlled_phases() {
  return {{100, {2, 3}, 0.5, 3}, {100, {3, 4, 5}, 0.5, 3}, {100, {4, 5, 6}, 0.5, 3}};
}

EncounterSchedule build_controlled_schedule(std::span<const PhaseSpec> phases,
                                            int num_labels, double min_duration_s,
                                            std::uint64_t seed) {
  if (phases.empty()) throw ParameterError("schedule needs at least one phase");
  if (!(min_duration_s > 0.0)) throw ParameterError("minimum duration must be positive");

  std::vector<int> all_labels(static_cast<std::size_t>(num_labels));
  for (int l = 0; l < num_labels; ++l) all_labels[static_cast<std::size_t>(l)] = l;

  Rng rng(seed);
  EncounterSchedule schedule;
  for (const auto& phase : phases) {
    if (phase.count < 0) throw ParameterError("phase count must be >= 0");
    if (phase.fixed_fraction < 0.0 || phase.fixed_fraction > 1.0)
      throw ParameterError("fixed fraction must lie in [0,1]");
    const int fixed = static_cast<int>(std::lround(phase.fixed_fraction * phase.count));
    std::vector<char> is_fixed(static_cast<std::size_t>(phase.count), 0);
    std::fill(is_fixed.begin(), is_fixed.begin() + fixed, 1);
    rng.shuffle(is_fixed);

    const LabelDistribution fixed_dist =
        phase.fixed_labels.empty()
            ? LabelDistribution()
            : LabelDistribution::uniform_over(phase.fixed_labels, num_labels);
    for (char f : is_fixed) {
      ScheduledEncounter enc;
      if (f) {
        if (fixed_dist.num_labels() == 0)
          throw ParameterError("phase has a fixed fraction but no fixed labels");
        enc.neighbor_dist = fixed_dist;
      } else {
        enc.neighbor_dist = LabelDistribution::uniform_over(
            pick_distinct_labels(all_labels, phase.random_label_count, rng), num_labels);
      }
      enc.duration_s = min_duration_s * (1.0 + rng.uniform());
      schedule.push_back(std::move(enc));
    }
  }
  return schedule;
}

ParameterVector train_bootstrap(const LabeledBatch& data, const MlpArchitecture& arch,
                                int epochs, double eta, std::uint64_t seed) {
  if (data.size() == 0) throw DataError("bootstrap training set is empty");
  if (epochs < 0) throw ParameterError("epochs must be >= 0");

  ParameterVector params = init_parameters(arch, Rng::stream(seed, "bootstrap-init").next_u64());
  if (epochs == 0) return params;

  // seeded 10% holdout for the overfitting stop
  std::vector<std::uint32_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
  Rng rng = Rng::stream(seed, "bootstrap-holdout");
  rng.shuffle(order);
  const std::size_t holdout_size = data.size() / 10;

  auto slice = [&](std::size_t lo, std::size_t hi) {
    LabeledBatch out;
    out.input_dim = data.input_dim;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint32_t idx = order[i];
      const auto begin = data.inputs.begin() +
                         static_cast<std::ptrdiff_t>(static_cast<std::size_t>(idx) *
                                                     static_cast<std::size_t>(data.input_dim));
      out.inputs.insert(out.inputs.end(), begin, begin + data.input_dim);
      out.labels.push_back(data.labels[idx]);
    }
    return out;
  };
  const LabeledBatch holdout = slice(0, holdout_size);
  const LabeledBatch train = slice(holdout_size, data.size());
  const LabeledBatch& monitor = holdout.size() > 0 ? holdout : train;

  ParameterVector best = params;
  double best_loss = forward(params, arch, monitor).mean_loss;
  double prev_loss = best_loss;
  int rising = 0;
  for (int e = 0; e < epochs; ++e) {
    const GradientVector grad = gradient(params, arch, train);
    params = apply_step(params, grad, eta);
    const double loss = forward(params, arch, monitor).mean_loss;
    if (loss < best_loss) {
      best_loss = loss;
      best = params;
    }
    rising = loss > prev_loss ? rising + 1 : 0;
    prev_loss = loss;
    if (rising >= 3) break;
  }
  return best;
}

double evaluate_accuracy(const ParameterVector& params, const MlpArchitecture& arch,
                         const LabeledBatch& test) {
  if (test.size() == 0) throw ParameterError("test set is empty");
  const ForwardResult res = forward(params, arch, test);
  const int out_dim = arch.output_dim;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < test.size(); ++s) {
    const double* row = res.probabilities.data() + s * static_cast<std::size_t>(out_dim);
    int pred = 0;
    for (int o = 1; o < out_dim; ++o)
      if (row[o] > row[pred]) pred = o;  // ties keep the lowest label id
    if (pred == test.labels[s]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

RunMetrics run_controlled(const Scenario& scenario) {
  const ScenarioPools pools = load_scenario_pools(scenario);
  const auto& spec = scenario.controlled;
  const int num_labels = pools.train.num_labels;

  const LabelDistribution goal =
      LabelDistribution::uniform_over(spec.goal_labels, num_labels);
  const LabelDistribution learner_dist =
      LabelDistribution::uniform_over(spec.learner_labels, num_labels);

  const DeviceSpec device_specs[] = {{learner_dist, spec.local_set_size}};
  const Partition part =
      make_partition(pools.train, scenario.bootstrap.fraction, device_specs,
                     Rng::stream(scenario.seed, "partition").next_u64());

  const ParameterVector bootstrap = train_bootstrap(
      gather(pools.train, part.bootstrap_indices), scenario.arch, scenario.bootstrap.epochs,
      scenario.bootstrap.eta, Rng::stream(scenario.seed, "bootstrap").next_u64());

  DeviceState learner =
      make_device(0, scenario, bootstrap, gather(pools.train, part.device_indices.at(0)),
                  learner_dist, goal);
  const GoalTestSet goal_test =
      build_goal_test_set(pools.test, goal, scenario.evaluation.test_size,
                          Rng::stream(scenario.seed, "eval").next_u64());

  const double t_send =
      t_send_seconds(scenario.arch.serialized_size_bytes(), scenario.link);
  const double min_duration = encounter_time_seconds(
      scenario.hyper.rho, t_send, scenario.compute.t_train_s, scenario.compute.t_agg_worst_s);
  const auto phases =
      spec.phases.empty() ? default_controlled_phases() : spec.phases;
  const EncounterSchedule schedule = build_controlled_schedule(
      phases, num_labels, min_duration, Rng::stream(scenario.seed, "schedule").next_u64());

  const auto remainder_by_label = indices_by_label(pools.train, part.remainder_indices);

  RunMetrics metrics;
  metrics.notes.push_back("controlled: evaluation after every encounter");
  double now = 0.0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const auto& enc = schedule[k];
    bool engaged = false;
    std::uint64_t bytes = 0;

    if (should_engage(learner.goal, enc.neighbor_dist, learner.hyper.tau,
                      learner.strategy)) {
      const double t_agg =
          learner.strategy == Strategy::OpportunisticMomentum
              ? aggregation_time_seconds(
                    scenario.compute,
                    learner.gamma.size_after_store(label_set_of(enc.neighbor_dist)))
              : 0.0;
      const int rounds = feasible_rounds(enc.duration_s, t_send, scenario.compute.t_train_s,
                                         t_agg, learner.hyper.rho, false);
      if (rounds >= 1) {
        LabeledBatch neighbor_data;
        try {
          Rng draw_rng = Rng::stream(scenario.seed, "controlled-neighbor", k);
          neighbor_data = gather(
              pools.train, sample_matching(remainder_by_label, enc.neighbor_dist,
                                           spec.local_set_size, draw_rng));
        } catch (const CapacityError& e) {
          throw CapacityError("encounter " + std::to_string(k) + ": " + e.what(),
                              e.label());
        }

        if (learner.strategy == Strategy::PairwiseFedAvg) {
          DeviceState neighbor =
              make_device(static_cast<int>(k) + 1, scenario, bootstrap,
                          std::move(neighbor_data), enc.neighbor_dist, enc.neighbor_dist);
          pairwise_fed_avg_session(learner, neighbor, rounds);
          metrics.sessions.push_back(synthesize_pairwise_report(
              0, neighbor.id, rounds, similarity(learner.goal, enc.neighbor_dist),
              scenario.arch));
        } else {
          metrics.sessions.push_back(run_session(learner, neighbor_data, enc.neighbor_dist,
                                                 rounds, static_cast<int>(k) + 1));
        }
        bytes = metrics.sessions.back().bytes_sent;
        engaged = true;
      }
    }
    if (!engaged) run_local_round(learner);

    MetricsRow row;
    row.sim_time_s = now;
    row.encounter_idx = static_cast<long>(k);
    row.device_id = learner.id;
    row.strategy = learner.strategy;
    row.goal_accuracy = evaluate_accuracy(learner.model, learner.arch, goal_test.batch);
    row.alpha = learner.decay.running_min_alpha;
    row.gamma_size = learner.gamma.size();
    row.bytes_sent = bytes;
    row.engaged = engaged;
    metrics.rows.push_back(row);
    now += enc.duration_s;
  }
  return metrics;
}

MobilityWorld build_mobility_world(const Scenario& scenario, const ScenarioPools& pools) {
  const auto& spec = scenario.mobility;
  const int num_labels = pools.train.num_labels;
  if (num_labels < 2) throw ParameterError("mobility needs at least two labels");
  const int device_count = spec.devices_per_region * 9;

  auto region_labels = [num_labels](int region) {
    return std::vector<int>{(2 * region) % num_labels, (2 * region + 1) % num_labels};
  };

  std::vector<DeviceSpec> specs;
  specs.reserve(static_cast<std::size_t>(device_count));
  for (int d = 0; d < device_count; ++d) {
    const int region = d / spec.devices_per_region;
    specs.push_back({LabelDistribution::uniform_over(region_labels(region), num_labels),
                     spec.local_set_size});
  }

  const Partition part =
      make_partition(pools.train, scenario.bootstrap.fraction, specs,
                     Rng::stream(scenario.seed, "partition").next_u64());

  MobilityWorld world;
  world.bootstrap_model = train_bootstrap(
      gather(pools.train, part.bootstrap_indices), scenario.arch, scenario.bootstrap.epochs,
      scenario.bootstrap.eta, Rng::stream(scenario.seed, "bootstrap").next_u64());

  for (int d = 0; d < device_count; ++d) {
    const int region = d / spec.devices_per_region;
    const std::vector<int> own = region_labels(region);

    std::vector<int> others;
    for (int l = 0; l < num_labels; ++l)
      if (std::find(own.begin(), own.end(), l) == own.end()) others.push_back(l);
    Rng goal_rng = Rng::stream(scenario.seed, "goal", static_cast<std::uint64_t>(d));
    std::vector<int> goal_labels = own;
    for (int l : pick_distinct_labels(others, spec.goal_extra_labels, goal_rng))
      goal_labels.push_back(l);

    const LabelDistribution goal =
        LabelDistribution::uniform_over(goal_labels, num_labels);
    world.devices.push_back(make_device(
        d, scenario, world.bootstrap_model,
        gather(pools.train, part.device_indices[static_cast<std::size_t>(d)]),
        specs[static_cast<std::size_t>(d)].dist, goal));
    world.test_sets.push_back(
        build_goal_test_set(pools.test, goal, scenario.evaluation.test_size,
                            Rng::stream(scenario.seed, "eval", static_cast<std::uint64_t>(d))
                                .next_u64()));
  }

  world.trajectories =
      generate_trajectories(spec.arena, spec.levy, spec.devices_per_region, spec.episodes,
                            spec.episode_ticks, scenario.seed);
  world.encounters = detect_encounters(spec.arena, world.trajectories);
  return world;
}

namespace {

// Per-encounter result produced off-thread and committed in order.
struct EncounterOutcome {
  std::vector<MetricsRow> rows;
  std::vector<SessionReport> sessions;
};

EncounterOutcome process_encounter(const Scenario& scenario, const Encounter& enc,
                                   long encounter_idx, std::vector<DeviceState>& devices,
                                   const std::vector<double>& last_accuracy, double t_send) {
  const auto& spec = scenario.mobility;
  const double duration = contact_duration_seconds(enc, spec.arena);
  const double start_s = static_cast<double>(enc.start_tick) * spec.arena.tick_seconds;

  EncounterOutcome out;
  auto make_row = [&](int device_id, std::uint64_t bytes, bool engaged) {
    const DeviceState& dev = devices[static_cast<std::size_t>(device_id)];
    MetricsRow row;
    row.sim_time_s = start_s;
    row.encounter_idx = encounter_idx;
    row.device_id = device_id;
    row.strategy = dev.strategy;
    row.goal_accuracy = last_accuracy[static_cast<std::size_t>(device_id)];
    row.alpha = dev.decay.running_min_alpha;
    row.gamma_size = dev.gamma.size();
    row.bytes_sent = bytes;
    row.engaged = engaged;
    return row;
  };

  if (scenario.strategy == Strategy::PairwiseFedAvg) {
    const int rounds =
        feasible_rounds(duration, t_send, scenario.compute.t_train_s, 0.0,
                        scenario.hyper.rho, false);
    DeviceState& a = devices[static_cast<std::size_t>(enc.device_a)];
    DeviceState& b = devices[static_cast<std::size_t>(enc.device_b)];
    if (rounds >= 1) {
      pairwise_fed_avg_session(a, b, rounds);
      auto rep = synthesize_pairwise_report(enc.device_a, enc.device_b, rounds,
                                            similarity(a.goal, b.data_dist), scenario.arch);
      out.rows.push_back(make_row(enc.device_a, rep.bytes_sent, true));
      out.rows.push_back(make_row(enc.device_b, 0, true));
      out.sessions.push_back(std::move(rep));
    } else {
      out.rows.push_back(make_row(enc.device_a, 0, false));
      out.rows.push_back(make_row(enc.device_b, 0, false));
    }
    return out;
  }

  // Both directions attempted, each as learner, sharing the duration.
  const int pair[2][2] = {{enc.device_a, enc.device_b}, {enc.device_b, enc.device_a}};
  for (const auto& [learner_id, neighbor_id] : pair) {
    DeviceState& learner = devices[static_cast<std::size_t>(learner_id)];
    const DeviceState& neighbor = devices[static_cast<std::size_t>(neighbor_id)];
    bool engaged = false;
    std::uint64_t bytes = 0;
    if (should_engage(learner.goal, neighbor.data_dist, learner.hyper.tau,
                      learner.strategy)) {
      const double t_agg =
          learner.strategy == Strategy::OpportunisticMomentum
              ? aggregation_time_seconds(
                    scenario.compute,
                    learner.gamma.size_after_store(label_set_of(neighbor.data_dist)))
              : 0.0;
      const int rounds = feasible_rounds(duration, t_send, scenario.compute.t_train_s,
                                         t_agg, learner.hyper.rho, true);
      if (rounds >= 1) {
        out.sessions.push_back(run_session(learner, neighbor.local_data, neighbor.data_dist,
                                           rounds, neighbor_id));
        bytes = out.sessions.back().bytes_sent;
        engaged = true;
      }
    }
    out.rows.push_back(make_row(learner_id, bytes, engaged));
  }
  return out;
}

}  // namespace

RunMetrics run_mobility(const Scenario& scenario) {
  const ScenarioPools pools = load_scenario_pools(scenario);
  MobilityWorld world = build_mobility_world(scenario, pools);
  const auto& spec = scenario.mobility;
  const std::size_t device_count = world.devices.size();

  const double t_send =
      t_send_seconds(scenario.arch.serialized_size_bytes(), scenario.link);
  const double horizon = static_cast<double>(spec.episodes) *
                         static_cast<double>(spec.episode_ticks) * spec.arena.tick_seconds;

  RunMetrics metrics;
  metrics.notes.push_back(
      "mobility: one local training round per device per evaluation interval "
      "(baseline evaluation at t=0 trains nothing)");
  metrics.notes.push_back(
      "mobility: pairwise-fed-avg runs one shared session per encounter over the full "
      "duration; other strategies attempt both directions with a halved budget");

  std::vector<double> last_accuracy(device_count, 0.0);

  // Evaluation pass shared by the t=0 baseline and every interval boundary.
  auto evaluation_pass = [&](double t, bool train_first) {
    std::vector<double> acc(device_count, 0.0);
    parallel_for(device_count, scenario.workers, [&](std::size_t d) {
      if (train_first) run_local_round(world.devices[d]);
      acc[d] = evaluate_accuracy(world.devices[d].model, world.devices[d].arch,
                                 world.test_sets[d].batch);
    });
    for (std::size_t d = 0; d < device_count; ++d) {
      last_accuracy[d] = acc[d];
      MetricsRow row;
      row.sim_time_s = t;
      row.encounter_idx = -1;
      row.device_id = static_cast<int>(d);
      row.strategy = world.devices[d].strategy;
      row.goal_accuracy = acc[d];
      row.alpha = world.devices[d].decay.running_min_alpha;
      row.gamma_size = world.devices[d].gamma.size();
      row.bytes_sent = 0;
      row.engaged = false;
      metrics.rows.push_back(row);
    }
  };

  evaluation_pass(0.0, false);

  const double kNever = std::numeric_limits<double>::infinity();
  auto encounter_start_s = [&](std::size_t i) {
    return static_cast<double>(world.encounters[i].start_tick) * spec.arena.tick_seconds;
  };

  double next_eval = scenario.evaluation.interval_s;
  std::size_t next_encounter = 0;
  while (next_encounter < world.encounters.size() || next_eval <= horizon) {
    const double eval_time = next_eval <= horizon ? next_eval : kNever;
    const double enc_time = next_encounter < world.encounters.size()
                                ? encounter_start_s(next_encounter)
                                : kNever;

    if (eval_time <= enc_time) {  // evaluations run first on ties
      evaluation_pass(next_eval, true);
      next_eval += scenario.evaluation.interval_s;
      continue;
    }

    // Consecutive device-disjoint encounters before the evaluation boundary
    // form one batch; execution may fan out, commit order stays fixed.
    std::vector<std::size_t> batch;
    std::vector<char> busy(device_count, 0);
    for (std::size_t scan = next_encounter; scan < world.encounters.size(); ++scan) {
      const Encounter& enc = world.encounters[scan];
      if (encounter_start_s(scan) >= eval_time) break;
      if (busy[static_cast<std::size_t>(enc.device_a)] ||
          busy[static_cast<std::size_t>(enc.device_b)])
        break;
      busy[static_cast<std::size_t>(enc.device_a)] = 1;
      busy[static_cast<std::size_t>(enc.device_b)] = 1;
      batch.push_back(scan);
    }

    std::vector<EncounterOutcome> outcomes(batch.size());
    parallel_for(batch.size(), scenario.workers, [&](std::size_t i) {
      outcomes[i] = process_encounter(scenario, world.encounters[batch[i]],
                                      static_cast<long>(batch[i]), world.devices,
                                      last_accuracy, t_send);
    });
    for (auto& outcome : outcomes) {
      for (auto& row : outcome.rows) metrics.rows.push_back(row);
      for (auto& rep : outcome.sessions) metrics.sessions.push_back(std::move(rep));
    }
    next_encounter = batch.back() + 1;
  }
  return metrics;
}

RunMetrics run_scenario(const Scenario& scenario) {
  return scenario.kind == Scenario::Kind::Controlled ? run_controlled(scenario)
                                                     : run_mobility(scenario);
}

}  // namespace oppfl
