#include "oppfl/learner.hpp"

#include <cmath>
#include <utility>

#include "oppfl/errors.hpp"

namespace oppfl {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Local: return "local";
    case Strategy::PairwiseFedAvg: return "pairwise-fed-avg";
    case Strategy::GreedyNoSim: return "greedy-no-sim";
    case Strategy::GreedySim: return "greedy-sim";
    case Strategy::OpportunisticMomentum: return "opportunistic-momentum";
  }
  throw ParameterError("unknown strategy value");
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "local") return Strategy::Local;
  if (name == "pairwise-fed-avg") return Strategy::PairwiseFedAvg;
  if (name == "greedy-no-sim") return Strategy::GreedyNoSim;
  if (name == "greedy-sim") return Strategy::GreedySim;
  if (name == "opportunistic-momentum") return Strategy::OpportunisticMomentum;
  throw ParameterError("unknown strategy \"" + name + "\"");
}

void GradientTable::store(const LabelSet& key, GradientVector grad, long tick) {
  if (subsumption_ && !entries_.count(key)) {
    for (const auto& [existing, _] : entries_)
      if (key.strict_subset_of(existing)) return;  // already covered by a superset
    for (auto it = entries_.begin(); it != entries_.end();)
      it = it->first.strict_subset_of(key) ? entries_.erase(it) : std::next(it);
  }
  auto& entry = entries_[key];
  entry.gradient = std::move(grad);
  entry.last_updated = tick;
}

std::size_t GradientTable::size_after_store(const LabelSet& key) const {
  if (entries_.count(key)) return entries_.size();
  if (!subsumption_) return entries_.size() + 1;
  std::size_t removed = 0;
  for (const auto& [existing, _] : entries_) {
    if (key.strict_subset_of(existing)) return entries_.size();
    if (existing.strict_subset_of(key)) ++removed;
  }
  return entries_.size() - removed + 1;
}

namespace {
double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace

double decay_factor(DecayState& state, const ParameterVector& current_model) {
  const double drift = l2_distance(state.w0, current_model);
  const double s = stable_sigmoid(state.kappa * (state.phi - drift));
  state.running_min_alpha = std::min(s, state.running_min_alpha);
  return state.running_min_alpha;
}

bool should_engage(const LabelDistribution& goal, const LabelDistribution& neighbor_dist,
                   double tau, Strategy strategy) {
  switch (strategy) {
    case Strategy::Local:
      return false;
    case Strategy::GreedyNoSim:
    case Strategy::PairwiseFedAvg:
      return true;
    case Strategy::GreedySim:
    case Strategy::OpportunisticMomentum:
      return similarity(goal, neighbor_dist) > tau;
  }
  throw ParameterError("unknown strategy value");
}

GradientVector greedy_aggregate(const GradientVector& local_grad,
                                const GradientVector& neighbor_grad, double w_local,
                                double w_neighbor) {
  if (!(w_local > 0.0) || !(w_neighbor > 0.0))
    throw ParameterError("aggregation weights must be positive");
  if (local_grad.size() != neighbor_grad.size())
    throw DimensionError("gradient length mismatch");
  GradientVector out;
  out.values.resize(local_grad.size());
  const double denom = w_local + w_neighbor;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] =
        static_cast<float>((w_local * static_cast<double>(local_grad.values[i]) +
                            w_neighbor * static_cast<double>(neighbor_grad.values[i])) /
                           denom);
  return out;
}

GradientVector momentum_aggregate(const GradientVector& local_grad, double w_local,
                                  GradientTable& gamma, const LabelDistribution& goal,
                                  double lambda) {
  if (!(w_local > 0.0)) throw ParameterError("local weight must be positive");
  if (gamma.entries().empty()) return local_grad;

  std::vector<double> numerator(local_grad.size());
  for (std::size_t i = 0; i < local_grad.size(); ++i)
    numerator[i] = w_local * static_cast<double>(local_grad.values[i]);
  double denominator = w_local;

  for (auto& [key, entry] : gamma.entries()) {
    if (entry.gradient.size() != local_grad.size())
      throw DimensionError("stored gradient length mismatch");
    if (entry.weight_cache < 0.0)
      entry.weight_cache =
          similarity_weight(uniform_over(key, goal.num_labels()), goal, lambda);
    const double w = entry.weight_cache;
    for (std::size_t i = 0; i < numerator.size(); ++i)
      numerator[i] += w * static_cast<double>(entry.gradient.values[i]);
    denominator += w;
  }

  GradientVector out;
  out.values.resize(numerator.size());
  for (std::size_t i = 0; i < numerator.size(); ++i)
    out.values[i] = static_cast<float>(numerator[i] / denominator);
  return out;
}

SessionReport run_session(DeviceState& learner, const LabeledBatch& neighbor_data,
                          const LabelDistribution& neighbor_dist, int rho,
                          int neighbor_id) {
  if (rho < 1) throw ParameterError("session needs rho >= 1");
  if (learner.strategy == Strategy::Local || learner.strategy == Strategy::PairwiseFedAvg)
    throw ParameterError("strategy does not run learner sessions");

  // Work on a copy; commit only a fully successful session.
  DeviceState work = learner;
  const LabelSet key = label_set_of(neighbor_dist);

  SessionReport report;
  report.learner_id = learner.id;
  report.neighbor_id = neighbor_id;
  report.strategy = learner.strategy;
  report.rounds = rho;
  report.similarity = similarity(learner.goal, neighbor_dist);

  for (int r = 0; r < rho; ++r) {
    GradientVector neighbor_grad = gradient(work.model, work.arch, neighbor_data);
    work.gamma.store(key, std::move(neighbor_grad), work.clock);

    double local_loss = 0.0;
    const GradientVector local_grad =
        gradient_with_loss(work.model, work.arch, work.local_data, local_loss);

    GradientVector aggregate;
    if (work.strategy == Strategy::OpportunisticMomentum) {
      const double w_local =
          similarity_weight(work.data_dist, work.goal, work.hyper.lambda);
      aggregate = momentum_aggregate(local_grad, w_local, work.gamma, work.goal,
                                     work.hyper.lambda);
    } else {
      const auto& stored = work.gamma.entries().at(key).gradient;
      aggregate = greedy_aggregate(local_grad, stored, 0.5, 0.5);
    }

    const double alpha = decay_factor(work.decay, work.model);
    work.model = apply_step(work.model, aggregate, work.hyper.eta * alpha);
    work.clock += 1;

    report.alphas.push_back(alpha);
    report.loss_trace.push_back(local_loss);
  }

  report.bytes_sent =
      2ull * static_cast<std::uint64_t>(rho) * work.arch.serialized_size_bytes();
  learner = std::move(work);
  return report;
}

void run_local_round(DeviceState& device) {
  const GradientVector grad = gradient(device.model, device.arch, device.local_data);
  const double alpha = decay_factor(device.decay, device.model);
  device.model = apply_step(device.model, grad, device.hyper.eta * alpha);
  device.clock += 1;
}

void pairwise_fed_avg_session(DeviceState& a, DeviceState& b, int rounds) {
  if (a.arch != b.arch) throw DimensionError("pairwise session across architectures");
  if (rounds < 0) throw ParameterError("rounds must be >= 0");

  DeviceState wa = a;
  DeviceState wb = b;

  auto mean_of = [](const ParameterVector& x, const ParameterVector& y) {
    if (x.size() != y.size()) throw DimensionError("parameter length mismatch");
    ParameterVector m;
    m.values.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      m.values[i] = static_cast<float>(
          (static_cast<double>(x.values[i]) + static_cast<double>(y.values[i])) / 2.0);
    return m;
  };

  ParameterVector shared = mean_of(wa.model, wb.model);
  for (int r = 0; r < rounds; ++r) {
    const GradientVector ga = gradient(shared, wa.arch, wa.local_data);
    const GradientVector gb = gradient(shared, wb.arch, wb.local_data);
    const double alpha_a = decay_factor(wa.decay, shared);
    const double alpha_b = decay_factor(wb.decay, shared);
    const ParameterVector ma = apply_step(shared, ga, wa.hyper.eta * alpha_a);
    const ParameterVector mb = apply_step(shared, gb, wb.hyper.eta * alpha_b);
    shared = mean_of(ma, mb);
    wa.clock += 1;
    wb.clock += 1;
  }
  wa.model = shared;
  wb.model = std::move(shared);
  a = std::move(wa);
  b = std::move(wb);
}

}  // namespace oppfl
