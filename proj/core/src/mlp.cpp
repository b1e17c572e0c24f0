#include "oppfl/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "oppfl/errors.hpp"
#include "oppfl/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "parameter serialization assumes a little-endian host");

namespace oppfl {

MlpArchitecture MlpArchitecture::mnist_2nn() { return {784, {200, 200}, 10}; }

std::vector<std::pair<int, int>> MlpArchitecture::layer_shapes() const {
  validate();
  std::vector<std::pair<int, int>> shapes;
  int fan_in = input_dim;
  for (int h : hidden_dims) {
    shapes.emplace_back(fan_in, h);
    fan_in = h;
  }
  shapes.emplace_back(fan_in, output_dim);
  return shapes;
}

std::size_t MlpArchitecture::param_count() const {
  std::size_t n = 0;
  for (auto [fan_in, fan_out] : layer_shapes())
    n += static_cast<std::size_t>(fan_in) * fan_out + fan_out;
  return n;
}

std::size_t MlpArchitecture::serialized_size_bytes() const { return param_count() * 4; }

void MlpArchitecture::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw ParameterError("architecture dims must be >= 1");
  for (int h : hidden_dims)
    if (h < 1) throw ParameterError("architecture dims must be >= 1");
}

ParameterVector init_parameters(const MlpArchitecture& arch, std::uint64_t seed) {
  ParameterVector params;
  params.values.reserve(arch.param_count());
  Rng rng(seed);
  for (auto [fan_in, fan_out] : arch.layer_shapes()) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (int i = 0; i < fan_in * fan_out; ++i)
      params.values.push_back(static_cast<float>(rng.uniform(-limit, limit)));
    for (int i = 0; i < fan_out; ++i) params.values.push_back(0.0f);
  }
  return params;
}

namespace {

void check_shapes(const ParameterVector& params, const MlpArchitecture& arch,
                  const LabeledBatch& batch) {
  if (params.size() != arch.param_count())
    throw DimensionError("parameter vector length does not match architecture");
  if (batch.input_dim != arch.input_dim)
    throw DimensionError("batch input dim does not match architecture");
  if (batch.inputs.size() != batch.size() * static_cast<std::size_t>(batch.input_dim))
    throw DimensionError("batch input matrix size does not match label count");
  if (batch.size() == 0) throw DataError("empty batch");
  for (int l : batch.labels)
    if (l < 0 || l >= arch.output_dim) throw DataError("label id outside output range");
}

// Activations for every layer plus the output log-softmax, all in double.
struct ForwardPass {
  std::vector<std::vector<double>> activations;  // activations[0] = inputs
  std::vector<std::vector<double>> pre_acts;     // z per affine layer
  std::vector<double> log_probs;                 // batch x output_dim
  double mean_loss = 0.0;
};

ForwardPass run_forward(const ParameterVector& params, const MlpArchitecture& arch,
                        const LabeledBatch& batch) {
  const auto shapes = arch.layer_shapes();
  const std::size_t batch_size = batch.size();

  ForwardPass fp;
  fp.activations.resize(shapes.size() + 1);
  fp.pre_acts.resize(shapes.size());

  auto& a0 = fp.activations[0];
  a0.assign(batch.inputs.begin(), batch.inputs.end());

  std::size_t offset = 0;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const auto [fan_in, fan_out] = shapes[k];
    const float* w = params.values.data() + offset;
    const float* b = w + static_cast<std::size_t>(fan_in) * fan_out;
    offset += static_cast<std::size_t>(fan_in) * fan_out + fan_out;

    const auto& in = fp.activations[k];
    auto& z = fp.pre_acts[k];
    z.resize(batch_size * static_cast<std::size_t>(fan_out));
    for (std::size_t s = 0; s < batch_size; ++s) {
      const double* row = in.data() + s * static_cast<std::size_t>(fan_in);
      double* zrow = z.data() + s * static_cast<std::size_t>(fan_out);
      for (int o = 0; o < fan_out; ++o) {
        const float* wrow = w + static_cast<std::size_t>(o) * fan_in;
        double acc = static_cast<double>(b[o]);
        for (int i = 0; i < fan_in; ++i) acc += static_cast<double>(wrow[i]) * row[i];
        zrow[o] = acc;
      }
    }

    auto& out = fp.activations[k + 1];
    if (k + 1 < shapes.size()) {
      out.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
    } else {
      out = z;  // logits
    }
  }

  // log-softmax with row-max subtraction
  const int out_dim = arch.output_dim;
  const auto& logits = fp.activations.back();
  fp.log_probs.resize(logits.size());
  double loss_sum = 0.0;
  for (std::size_t s = 0; s < batch_size; ++s) {
    const double* zrow = logits.data() + s * static_cast<std::size_t>(out_dim);
    double* lp = fp.log_probs.data() + s * static_cast<std::size_t>(out_dim);
    double m = zrow[0];
    for (int o = 1; o < out_dim; ++o) m = std::max(m, zrow[o]);
    double sum = 0.0;
    for (int o = 0; o < out_dim; ++o) sum += std::exp(zrow[o] - m);
    const double log_sum = std::log(sum);
    for (int o = 0; o < out_dim; ++o) lp[o] = zrow[o] - m - log_sum;
    loss_sum -= lp[batch.labels[s]];
  }
  fp.mean_loss = loss_sum / static_cast<double>(batch_size);
  return fp;
}

}  // namespace

ForwardResult forward(const ParameterVector& params, const MlpArchitecture& arch,
                      const LabeledBatch& batch) {
  check_shapes(params, arch, batch);
  ForwardPass fp = run_forward(params, arch, batch);
  ForwardResult res;
  res.mean_loss = fp.mean_loss;
  res.probabilities.resize(fp.log_probs.size());
  for (std::size_t i = 0; i < fp.log_probs.size(); ++i)
    res.probabilities[i] = std::exp(fp.log_probs[i]);
  return res;
}

GradientVector gradient_with_loss(const ParameterVector& params, const MlpArchitecture& arch,
                                  const LabeledBatch& batch, double& mean_loss_out) {
  check_shapes(params, arch, batch);
  const auto shapes = arch.layer_shapes();
  const std::size_t batch_size = batch.size();
  const double inv_b = 1.0 / static_cast<double>(batch_size);

  ForwardPass fp = run_forward(params, arch, batch);
  mean_loss_out = fp.mean_loss;

  // dz for the output layer: (softmax - one-hot) / batch
  const int out_dim = arch.output_dim;
  std::vector<double> dz(batch_size * static_cast<std::size_t>(out_dim));
  for (std::size_t s = 0; s < batch_size; ++s) {
    const double* lp = fp.log_probs.data() + s * static_cast<std::size_t>(out_dim);
    double* drow = dz.data() + s * static_cast<std::size_t>(out_dim);
    for (int o = 0; o < out_dim; ++o) drow[o] = std::exp(lp[o]) * inv_b;
    drow[batch.labels[s]] -= inv_b;
  }

  std::vector<double> grad(params.size(), 0.0);

  // layer parameter offsets
  std::vector<std::size_t> offsets(shapes.size());
  std::size_t off = 0;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    offsets[k] = off;
    off += static_cast<std::size_t>(shapes[k].first) * shapes[k].second + shapes[k].second;
  }

  for (std::size_t k = shapes.size(); k-- > 0;) {
    const auto [fan_in, fan_out] = shapes[k];
    const auto& a_in = fp.activations[k];
    double* dw = grad.data() + offsets[k];
    double* db = dw + static_cast<std::size_t>(fan_in) * fan_out;

    for (std::size_t s = 0; s < batch_size; ++s) {
      const double* arow = a_in.data() + s * static_cast<std::size_t>(fan_in);
      const double* drow = dz.data() + s * static_cast<std::size_t>(fan_out);
      for (int o = 0; o < fan_out; ++o) {
        const double d = drow[o];
        if (d == 0.0) continue;
        double* dwrow = dw + static_cast<std::size_t>(o) * fan_in;
        for (int i = 0; i < fan_in; ++i) dwrow[i] += d * arow[i];
        db[o] += d;
      }
    }

    if (k > 0) {
      const float* w = params.values.data() + offsets[k];
      const auto& z_prev = fp.pre_acts[k - 1];
      std::vector<double> dz_prev(batch_size * static_cast<std::size_t>(fan_in), 0.0);
      for (std::size_t s = 0; s < batch_size; ++s) {
        const double* drow = dz.data() + s * static_cast<std::size_t>(fan_out);
        double* prow = dz_prev.data() + s * static_cast<std::size_t>(fan_in);
        for (int o = 0; o < fan_out; ++o) {
          const double d = drow[o];
          if (d == 0.0) continue;
          const float* wrow = w + static_cast<std::size_t>(o) * fan_in;
          for (int i = 0; i < fan_in; ++i) prow[i] += d * static_cast<double>(wrow[i]);
        }
        const double* zrow = z_prev.data() + s * static_cast<std::size_t>(fan_in);
        for (int i = 0; i < fan_in; ++i)
          if (zrow[i] <= 0.0) prow[i] = 0.0;  // ReLU gate
      }
      dz = std::move(dz_prev);
    }
  }

  GradientVector g;
  g.values.resize(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) g.values[i] = static_cast<float>(grad[i]);
  return g;
}

GradientVector gradient(const ParameterVector& params, const MlpArchitecture& arch,
                        const LabeledBatch& batch) {
  double loss = 0.0;
  return gradient_with_loss(params, arch, batch, loss);
}

ParameterVector apply_step(const ParameterVector& params, const GradientVector& grad,
                           double rate) {
  if (params.size() != grad.size())
    throw DimensionError("parameter/gradient length mismatch");
  ParameterVector out;
  out.values.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    out.values[i] = static_cast<float>(static_cast<double>(params.values[i]) -
                                       rate * static_cast<double>(grad.values[i]));
  return out;
}

double l2_distance(const ParameterVector& a, const ParameterVector& b) {
  if (a.size() != b.size()) throw DimensionError("parameter length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.values[i]) - static_cast<double>(b.values[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {
constexpr std::uint8_t kMagic[4] = {'O', 'F', 'L', 'W'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  return static_cast<std::uint32_t>(bytes[at]) |
         static_cast<std::uint32_t>(bytes[at + 1]) << 8 |
         static_cast<std::uint32_t>(bytes[at + 2]) << 16 |
         static_cast<std::uint32_t>(bytes[at + 3]) << 24;
}
}  // namespace

std::vector<std::uint8_t> serialize_parameters(const ParameterVector& params) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + params.size() * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  put_u32(out, 0);  // reserved
  const std::size_t payload = params.size() * 4;
  out.resize(16 + payload);
  std::memcpy(out.data() + 16, params.values.data(), payload);
  return out;
}

ParameterVector deserialize_parameters(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw FormatError("parameter blob shorter than header", bytes.size());
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
    throw FormatError("bad parameter blob magic", 0);
  if (get_u32(bytes, 4) != kVersion) throw FormatError("unsupported parameter blob version", 4);
  const std::uint32_t count = get_u32(bytes, 8);
  if (bytes.size() != 16 + static_cast<std::size_t>(count) * 4)
    throw FormatError("parameter blob payload size mismatch", 12);
  ParameterVector params;
  params.values.resize(count);
  std::memcpy(params.values.data(), bytes.data() + 16, static_cast<std::size_t>(count) * 4);
  for (std::size_t i = 0; i < params.values.size(); ++i)
    if (!std::isfinite(params.values[i]))
      throw FormatError("non-finite parameter value", 16 + i * 4);
  return params;
}

}  // namespace oppfl
