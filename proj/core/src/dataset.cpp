#include "oppfl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

#include "oppfl/errors.hpp"

namespace oppfl {

DataPool DataPool::from_batch(LabeledBatch batch, int num_labels) {
  if (num_labels < 1) throw ParameterError("label space must be non-empty");
  DataPool pool;
  pool.num_labels = num_labels;
  pool.index_by_label.resize(static_cast<std::size_t>(num_labels));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int l = batch.labels[i];
    if (l < 0 || l >= num_labels) throw DataError("pool label outside label space");
    pool.index_by_label[static_cast<std::size_t>(l)].push_back(
        static_cast<std::uint32_t>(i));
  }
  pool.samples = std::move(batch);
  return pool;
}

LabelDistribution DataPool::empirical_distribution() const {
  std::vector<double> counts(static_cast<std::size_t>(num_labels), 0.0);
  for (int l : samples.labels) counts[static_cast<std::size_t>(l)] += 1.0;
  return LabelDistribution::from_counts(counts);
}

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string(), 0);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t at,
                        const char* what) {
  if (at + 4 > bytes.size())
    throw FormatError(std::string("truncated IDX header reading ") + what, at);
  return static_cast<std::uint32_t>(bytes[at]) << 24 |
         static_cast<std::uint32_t>(bytes[at + 1]) << 16 |
         static_cast<std::uint32_t>(bytes[at + 2]) << 8 |
         static_cast<std::uint32_t>(bytes[at + 3]);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

DataPool load_idx(const std::filesystem::path& images_path,
                  const std::filesystem::path& labels_path) {
  const auto img = read_file(images_path);
  const auto lab = read_file(labels_path);

  if (read_be32(img, 0, "images magic") != kImagesMagic)
    throw FormatError("bad IDX images magic in " + images_path.string(), 0);
  const std::uint32_t count = read_be32(img, 4, "image count");
  const std::uint32_t rows = read_be32(img, 8, "image rows");
  const std::uint32_t cols = read_be32(img, 12, "image cols");
  const std::size_t pixels = static_cast<std::size_t>(count) * rows * cols;
  if (img.size() != 16 + pixels)
    throw FormatError("IDX images payload truncated in " + images_path.string(),
                      img.size());

  if (read_be32(lab, 0, "labels magic") != kLabelsMagic)
    throw FormatError("bad IDX labels magic in " + labels_path.string(), 0);
  const std::uint32_t label_count = read_be32(lab, 4, "label count");
  if (lab.size() != 8 + label_count)
    throw FormatError("IDX labels payload truncated in " + labels_path.string(),
                      lab.size());
  if (label_count != count)
    throw FormatError("image/label count mismatch (" + std::to_string(count) + " vs " +
                          std::to_string(label_count) + ")",
                      4);

  LabeledBatch batch;
  batch.input_dim = static_cast<int>(rows * cols);
  batch.inputs.resize(pixels);
  for (std::size_t i = 0; i < pixels; ++i)
    batch.inputs[i] = static_cast<float>(img[16 + i]) / 255.0f;
  batch.labels.resize(count);
  int max_label = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    batch.labels[i] = static_cast<int>(lab[8 + i]);
    max_label = std::max(max_label, batch.labels[i]);
  }

  DataPool pool = DataPool::from_batch(std::move(batch), std::max(10, max_label + 1));
  pool.image_rows = static_cast<int>(rows);
  pool.image_cols = static_cast<int>(cols);
  return pool;
}

void write_idx(const DataPool& pool, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  int rows = pool.image_rows, cols = pool.image_cols;
  if (rows * cols != pool.samples.input_dim) {
    rows = 1;
    cols = pool.samples.input_dim;
  }
  std::ofstream img(images_path, std::ios::binary);
  if (!img) throw DataError("cannot write " + images_path.string());
  write_be32(img, kImagesMagic);
  write_be32(img, static_cast<std::uint32_t>(pool.size()));
  write_be32(img, static_cast<std::uint32_t>(rows));
  write_be32(img, static_cast<std::uint32_t>(cols));
  for (float f : pool.samples.inputs) {
    const auto byte =
        static_cast<std::uint8_t>(std::lround(std::clamp(f, 0.0f, 1.0f) * 255.0f));
    img.put(static_cast<char>(byte));
  }

  std::ofstream lab(labels_path, std::ios::binary);
  if (!lab) throw DataError("cannot write " + labels_path.string());
  write_be32(lab, kLabelsMagic);
  write_be32(lab, static_cast<std::uint32_t>(pool.size()));
  for (int l : pool.samples.labels) lab.put(static_cast<char>(l));
}

namespace {
// Fixed per-(label, dimension) blob center in [0.15, 0.85], independent of
// the sampling seed so train/test pools share geometry.
double blob_center(int label, int dim) {
  std::uint64_t x = 0x51ab5e110b00b135ULL ^ (static_cast<std::uint64_t>(label) << 32) ^
                    static_cast<std::uint64_t>(dim);
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  const double u = static_cast<double>(x >> 11) * 0x1.0p-53;
  return 0.15 + 0.7 * u;
}
}  // namespace

DataPool synth_blobs(int num_labels, int per_label, int input_dim, double spread,
                     std::uint64_t seed) {
  if (num_labels < 1 || per_label < 1 || input_dim < 1)
    throw ParameterError("synth_blobs counts must be >= 1");
  if (spread < 0.0) throw ParameterError("spread must be non-negative");

  LabeledBatch batch;
  batch.input_dim = input_dim;
  batch.inputs.reserve(static_cast<std::size_t>(num_labels) * per_label * input_dim);
  batch.labels.reserve(static_cast<std::size_t>(num_labels) * per_label);
  Rng rng(seed);
  for (int l = 0; l < num_labels; ++l) {
    for (int s = 0; s < per_label; ++s) {
      for (int d = 0; d < input_dim; ++d) {
        double v = blob_center(l, d);
        if (spread > 0.0) v += spread * rng.normal();
        batch.inputs.push_back(static_cast<float>(std::clamp(v, 0.0, 1.0)));
      }
      batch.labels.push_back(l);
    }
  }
  return DataPool::from_batch(std::move(batch), num_labels);
}

std::vector<std::size_t> label_counts_for(const LabelDistribution& dist, std::size_t size) {
  const int n = dist.num_labels();
  std::vector<std::size_t> counts(static_cast<std::size_t>(n), 0);
  std::vector<std::pair<double, int>> remainders;  // (-fraction, label)
  std::size_t assigned = 0;
  for (int l = 0; l < n; ++l) {
    const double target = dist.prob(l) * static_cast<double>(size);
    const double base = std::floor(target);
    counts[static_cast<std::size_t>(l)] = static_cast<std::size_t>(base);
    assigned += static_cast<std::size_t>(base);
    remainders.emplace_back(-(target - base), l);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t i = 0; assigned < size; ++i, ++assigned)
    counts[static_cast<std::size_t>(remainders[i % remainders.size()].second)] += 1;
  return counts;
}

std::vector<std::uint32_t> draw_matching(std::vector<std::vector<std::uint32_t>>& available,
                                         const LabelDistribution& dist, std::size_t size) {
  if (dist.num_labels() != static_cast<int>(available.size()))
    throw DimensionError("distribution does not match pool label space");
  const auto counts = label_counts_for(dist, size);
  std::vector<std::uint32_t> out;
  out.reserve(size);
  for (int l = 0; l < dist.num_labels(); ++l) {
    auto& avail = available[static_cast<std::size_t>(l)];
    const std::size_t want = counts[static_cast<std::size_t>(l)];
    if (want > avail.size())
      throw CapacityError("label " + std::to_string(l) + " exhausted (need " +
                              std::to_string(want) + ", have " +
                              std::to_string(avail.size()) + ")",
                          l);
    out.insert(out.end(), avail.end() - static_cast<std::ptrdiff_t>(want), avail.end());
    avail.resize(avail.size() - want);
  }
  return out;
}

Partition make_partition(const DataPool& pool, double bootstrap_fraction,
                         std::span<const DeviceSpec> device_specs, std::uint64_t seed) {
  if (bootstrap_fraction < 0.0 || bootstrap_fraction > 1.0)
    throw ParameterError("bootstrap fraction must lie in [0,1]");

  // shuffled per-label availability; draws consume from the back
  std::vector<std::vector<std::uint32_t>> available = pool.index_by_label;
  Rng rng(seed);
  for (auto& list : available) rng.shuffle(list);

  Partition part;
  const auto bootstrap_total =
      static_cast<std::size_t>(std::llround(bootstrap_fraction * pool.size()));
  if (bootstrap_total > 0) {
    std::vector<double> uniform(static_cast<std::size_t>(pool.num_labels), 1.0);
    part.bootstrap_indices = draw_matching(
        available, LabelDistribution::from_counts(uniform), bootstrap_total);
  }
  for (const auto& spec : device_specs)
    part.device_indices.push_back(draw_matching(available, spec.dist, spec.size));
  for (const auto& list : available)
    part.remainder_indices.insert(part.remainder_indices.end(), list.begin(), list.end());
  std::sort(part.remainder_indices.begin(), part.remainder_indices.end());
  return part;
}

GoalTestSet build_goal_test_set(const DataPool& test_pool, const LabelDistribution& goal,
                                std::size_t size, std::uint64_t seed) {
  if (size == 0) throw ParameterError("goal test set size must be positive");
  std::vector<std::vector<std::uint32_t>> available = test_pool.index_by_label;
  Rng rng(seed);
  for (auto& list : available) rng.shuffle(list);
  auto indices = draw_matching(available, goal, size);
  return GoalTestSet{gather(test_pool, indices)};
}

LabeledBatch gather(const DataPool& pool, std::span<const std::uint32_t> indices) {
  LabeledBatch out;
  out.input_dim = pool.samples.input_dim;
  out.inputs.reserve(indices.size() * static_cast<std::size_t>(out.input_dim));
  out.labels.reserve(indices.size());
  for (std::uint32_t idx : indices) {
    if (idx >= pool.size()) throw DataError("pool index out of range");
    const auto begin =
        pool.samples.inputs.begin() +
        static_cast<std::ptrdiff_t>(static_cast<std::size_t>(idx) * out.input_dim);
    out.inputs.insert(out.inputs.end(), begin, begin + out.input_dim);
    out.labels.push_back(pool.samples.labels[idx]);
  }
  return out;
}

}  // namespace oppfl
