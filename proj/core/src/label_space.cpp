#include "oppfl/label_space.hpp"

#include <algorithm>
#include <cmath>

#include "oppfl/errors.hpp"

namespace oppfl {

LabelDistribution LabelDistribution::from_counts(std::span<const double> counts) {
  if (counts.empty()) throw ParameterError("distribution needs at least one label");
  double sum = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw ParameterError("distribution counts must be finite and non-negative");
    sum += c;
  }
  if (sum <= 0.0) throw ParameterError("all-zero count vector");
  std::vector<double> probs(counts.begin(), counts.end());
  for (double& p : probs) p /= sum;
  return LabelDistribution(std::move(probs));
}

LabelDistribution LabelDistribution::uniform_over(std::span<const int> labels, int num_labels) {
  if (num_labels < 1) throw ParameterError("label space must be non-empty");
  std::vector<double> counts(static_cast<std::size_t>(num_labels), 0.0);
  for (int l : labels) {
    if (l < 0 || l >= num_labels) throw ParameterError("label id out of range");
    counts[static_cast<std::size_t>(l)] = 1.0;
  }
  return from_counts(counts);
}

LabelDistribution LabelDistribution::point_mass(int label, int num_labels) {
  const int one[] = {label};
  return uniform_over(one, num_labels);
}

LabelSet LabelSet::of(std::vector<int> ids, int num_labels) {
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= num_labels) throw ParameterError("label id out of range");
    if (i > 0 && ids[i] == ids[i - 1]) throw ParameterError("duplicate label id in set");
  }
  LabelSet s;
  s.ids_ = std::move(ids);
  return s;
}

bool LabelSet::contains(int label) const {
  return std::binary_search(ids_.begin(), ids_.end(), label);
}

bool LabelSet::strict_subset_of(const LabelSet& other) const {
  if (ids_.size() >= other.ids_.size()) return false;
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

double similarity(const LabelDistribution& p1, const LabelDistribution& p2) {
  if (p1.num_labels() == 0 || p2.num_labels() == 0)
    throw DimensionError("similarity of an empty distribution");
  if (p1.num_labels() != p2.num_labels())
    throw DimensionError("similarity over mismatched label spaces");
  double s = 0.0;
  for (int l = 0; l < p1.num_labels(); ++l) s += std::min(p1.prob(l), p2.prob(l));
  return s;
}

double similarity_weight(const LabelDistribution& dist, const LabelDistribution& goal,
                         double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  return std::exp(-lambda * (1.0 - similarity(goal, dist)));
}

LabelSet label_set_of(const LabelDistribution& dist) {
  std::vector<int> ids;
  for (int l = 0; l < dist.num_labels(); ++l)
    if (dist.prob(l) > 0.0) ids.push_back(l);
  return LabelSet::of(std::move(ids), dist.num_labels());
}

LabelDistribution uniform_over(const LabelSet& set, int num_labels) {
  return LabelDistribution::uniform_over(set.ids(), num_labels);
}

}  // namespace oppfl
