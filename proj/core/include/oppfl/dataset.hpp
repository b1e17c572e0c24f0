#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "oppfl/label_space.hpp"
#include "oppfl/mlp.hpp"
#include "oppfl/rng.hpp"

namespace oppfl {

// A full corpus with a per-label index. Immutable after construction.
struct DataPool {
  LabeledBatch samples;
  int num_labels = 0;
  int image_rows = 0;  // nonzero only for IDX-loaded pools
  int image_cols = 0;
  std::vector<std::vector<std::uint32_t>> index_by_label;

  static DataPool from_batch(LabeledBatch batch, int num_labels);
  std::size_t size() const noexcept { return samples.size(); }
  LabelDistribution empirical_distribution() const;
};

// IDX ingestion: big-endian magic 0x00000803 (images) / 0x00000801 (labels),
// unsigned-byte payload; pixels divided by 255. Malformed input raises
// FormatError with the offending byte offset.
DataPool load_idx(const std::filesystem::path& images_path,
                  const std::filesystem::path& labels_path);

// Inverse of load_idx (features quantized back to bytes). Used for fixtures
// and the ingestion round-trip check.
void write_idx(const DataPool& pool, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

// Deterministic Gaussian blobs: one fixed center per label (a function of
// label and dimension only, so pools with different seeds share geometry),
// samples clamped to [0,1].
DataPool synth_blobs(int num_labels, int per_label, int input_dim, double spread,
                     std::uint64_t seed);

struct DeviceSpec {
  LabelDistribution dist;
  std::size_t size = 0;
};

// Disjoint split of a pool: a label-uniform bootstrap set, one set per
// device realizing its label distribution within +-1 sample per label, and
// the unused remainder.
struct Partition {
  std::vector<std::uint32_t> bootstrap_indices;
  std::vector<std::vector<std::uint32_t>> device_indices;
  std::vector<std::uint32_t> remainder_indices;
};

Partition make_partition(const DataPool& pool, double bootstrap_fraction,
                         std::span<const DeviceSpec> device_specs, std::uint64_t seed);

// Test samples whose empirical label counts match round(goal * size) +-1.
struct GoalTestSet {
  LabeledBatch batch;
};

GoalTestSet build_goal_test_set(const DataPool& test_pool, const LabelDistribution& goal,
                                std::size_t size, std::uint64_t seed);

// Materialize a batch from pool indices.
LabeledBatch gather(const DataPool& pool, std::span<const std::uint32_t> indices);

// Integer label counts for distribution * size via largest-remainder
// rounding; totals are exact.
std::vector<std::size_t> label_counts_for(const LabelDistribution& dist, std::size_t size);

// Sample indices matching a distribution, consuming from availability lists
// (one shuffled list per label). Raises CapacityError naming the first
// exhausted label.
std::vector<std::uint32_t> draw_matching(std::vector<std::vector<std::uint32_t>>& available,
                                         const LabelDistribution& dist, std::size_t size);

}  // namespace oppfl
