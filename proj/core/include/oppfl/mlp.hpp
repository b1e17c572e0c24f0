#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace oppfl {

// Fully-connected network shape: ReLU on hidden layers, softmax output.
struct MlpArchitecture {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int output_dim = 0;

  // 784 -> 200 -> 200 -> 10
  static MlpArchitecture mnist_2nn();

  // (fan_in, fan_out) per affine layer, first to last.
  std::vector<std::pair<int, int>> layer_shapes() const;
  std::size_t param_count() const;
  // 32-bit storage: param_count * 4.
  std::size_t serialized_size_bytes() const;
  void validate() const;

  bool operator==(const MlpArchitecture&) const = default;
};

// Flat weights+biases in canonical order: layer 1 weights (row-major,
// one row per output neuron), layer 1 biases, layer 2 weights, ...
// Stored and transmitted as 32-bit floats; arithmetic runs in 64-bit.
struct ParameterVector {
  std::vector<float> values;
  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const ParameterVector&) const = default;
};

// Same canonical layout and length as ParameterVector.
struct GradientVector {
  std::vector<float> values;
  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const GradientVector&) const = default;
};

// Row-major sample matrix plus integer labels; features in [0,1].
struct LabeledBatch {
  int input_dim = 0;
  std::vector<float> inputs;
  std::vector<int> labels;
  std::size_t size() const noexcept { return labels.size(); }
};

struct ForwardResult {
  std::vector<double> probabilities;  // batch x output_dim, row-major
  double mean_loss = 0.0;             // mean cross-entropy
};

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
// deterministic per seed.
ParameterVector init_parameters(const MlpArchitecture& arch, std::uint64_t seed);

// Probabilities and mean cross-entropy via a numerically stable log-softmax.
ForwardResult forward(const ParameterVector& params, const MlpArchitecture& arch,
                      const LabeledBatch& batch);

// Full-batch gradient of the mean cross-entropy loss, canonical layout.
GradientVector gradient(const ParameterVector& params, const MlpArchitecture& arch,
                        const LabeledBatch& batch);

// Same as gradient(), also reporting the loss at the evaluation point.
GradientVector gradient_with_loss(const ParameterVector& params, const MlpArchitecture& arch,
                                  const LabeledBatch& batch, double& mean_loss_out);

// params - rate * grad
ParameterVector apply_step(const ParameterVector& params, const GradientVector& grad,
                           double rate);

double l2_distance(const ParameterVector& a, const ParameterVector& b);

// Binary form: 16-byte header (magic "OFLW", version u32, param count u32,
// reserved u32), then little-endian 32-bit floats in canonical layout.
std::vector<std::uint8_t> serialize_parameters(const ParameterVector& params);
ParameterVector deserialize_parameters(std::span<const std::uint8_t> bytes);

}  // namespace oppfl
