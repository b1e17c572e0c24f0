#pragma once

#include <compare>
#include <span>
#include <vector>

namespace oppfl {

// Normalized frequency vector over a fixed, dense label space.
// Immutable after construction; a default-constructed instance is an empty
// placeholder (num_labels() == 0) and is rejected by every operation.
class LabelDistribution {
 public:
  LabelDistribution() = default;

  // Normalizes raw counts/weights to fractions. Rejects negative entries and
  // an all-zero vector.
  static LabelDistribution from_counts(std::span<const double> counts);
  static LabelDistribution uniform_over(std::span<const int> labels, int num_labels);
  static LabelDistribution point_mass(int label, int num_labels);

  int num_labels() const noexcept { return static_cast<int>(probs_.size()); }
  double prob(int label) const { return probs_.at(static_cast<std::size_t>(label)); }
  const std::vector<double>& probs() const noexcept { return probs_; }

  bool operator==(const LabelDistribution&) const = default;

 private:
  explicit LabelDistribution(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

// Ordered set of label ids; the key domain of the gradient table.
class LabelSet {
 public:
  LabelSet() = default;

  // Validates range and uniqueness; stores ids in ascending order.
  static LabelSet of(std::vector<int> ids, int num_labels);

  const std::vector<int>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  bool contains(int label) const;
  bool strict_subset_of(const LabelSet& other) const;

  friend auto operator<=>(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<int> ids_;
};

// Overlap similarity: sum over labels of min(p1(l), p2(l)).
// 0 iff disjoint supports, 1 iff identical distributions.
double similarity(const LabelDistribution& p1, const LabelDistribution& p2);

// exp(-lambda * (1 - similarity(goal, dist))): 1 at perfect similarity,
// strictly increasing in similarity. lambda must be positive.
double similarity_weight(const LabelDistribution& dist, const LabelDistribution& goal,
                         double lambda);

// Support of a distribution (labels with probability > 0), ascending.
LabelSet label_set_of(const LabelDistribution& dist);

// Uniform distribution over the members of a set.
LabelDistribution uniform_over(const LabelSet& set, int num_labels);

}  // namespace oppfl
