#include "clic/numkit/mlp.hpp"

#include <cmath>
#include <string>

#include "clic/error.hpp"

namespace clic::numkit {
namespace {

void check_batch(const MlpSpec& spec, const MlpParams& params,
                 const Matrix& batch) {
  spec.validate();
  if (!params.matches(spec)) {
    throw ConfigError("mlp: parameter shapes do not match the spec");
  }
  if (batch.cols() != spec.input_dim()) {
    throw ConfigError("mlp: batch has " + std::to_string(batch.cols()) +
                      " columns, expected " +
                      std::to_string(spec.input_dim()));
  }
  if (!batch.allFinite()) {
    throw ConfigError("mlp: batch contains non-finite values");
  }
}

void apply_head(OutputHead head, Matrix& z) {
  if (head == OutputHead::kSymmetricSigmoid) {
    z = z.unaryExpr([](double v) { return 2.0 / (1.0 + std::exp(-v)) - 1.0; });
  }
}

}  // namespace

void MlpSpec::validate() const {
  if (widths.size() < 2) {
    throw ConfigError("mlp spec needs at least an input and an output width");
  }
  for (int w : widths) {
    if (w < 1) throw ConfigError("mlp spec widths must be >= 1");
  }
}

MlpParams MlpParams::zeros(const MlpSpec& spec) {
  spec.validate();
  MlpParams p;
  p.layers.reserve(spec.num_layers());
  for (int l = 0; l < spec.num_layers(); ++l) {
    p.layers.push_back({Matrix::Zero(spec.widths[l + 1], spec.widths[l]),
                        Vector::Zero(spec.widths[l + 1])});
  }
  return p;
}

MlpParams MlpParams::glorot_uniform(const MlpSpec& spec,
                                    std::mt19937_64& rng) {
  MlpParams p = zeros(spec);
  for (int l = 0; l < spec.num_layers(); ++l) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(spec.widths[l] + spec.widths[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix& w = p.layers[l].weight;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
  }
  return p;
}

bool MlpParams::matches(const MlpSpec& spec) const {
  if (static_cast<int>(layers.size()) != spec.num_layers()) return false;
  for (int l = 0; l < spec.num_layers(); ++l) {
    const auto& layer = layers[l];
    if (layer.weight.rows() != spec.widths[l + 1] ||
        layer.weight.cols() != spec.widths[l] ||
        layer.bias.size() != spec.widths[l + 1]) {
      return false;
    }
  }
  return true;
}

bool MlpParams::all_finite() const {
  for (const auto& layer : layers) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) {
    n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  }
  return n;
}

MlpParams& MlpParams::operator+=(const MlpParams& other) {
  add_scaled(other, 1.0);
  return *this;
}

MlpParams& MlpParams::operator*=(double scale) {
  for (auto& layer : layers) {
    layer.weight *= scale;
    layer.bias *= scale;
  }
  return *this;
}

void MlpParams::add_scaled(const MlpParams& other, double scale) {
  if (other.layers.size() != layers.size()) {
    throw InternalError("MlpParams::add_scaled: layer count mismatch");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (other.layers[l].weight.rows() != layers[l].weight.rows() ||
        other.layers[l].weight.cols() != layers[l].weight.cols()) {
      throw InternalError("MlpParams::add_scaled: shape mismatch");
    }
    layers[l].weight += scale * other.layers[l].weight;
    layers[l].bias += scale * other.layers[l].bias;
  }
}

double MlpParams::squared_norm() const {
  double s = 0.0;
  for (const auto& layer : layers) {
    s += layer.weight.squaredNorm() + layer.bias.squaredNorm();
  }
  return s;
}

std::vector<double> MlpParams::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& layer : layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        out.push_back(layer.weight(r, c));
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      out.push_back(layer.bias(i));
    }
  }
  return out;
}

void MlpParams::assign_flat(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw UsageError("MlpParams::assign_flat: expected " +
                     std::to_string(parameter_count()) + " values, got " +
                     std::to_string(values.size()));
  }
  std::size_t k = 0;
  for (auto& layer : layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = values[k++];
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      layer.bias(i) = values[k++];
    }
  }
}

ForwardResult mlp_forward(const MlpSpec& spec, const MlpParams& params,
                          const Matrix& batch) {
  check_batch(spec, params, batch);
  const int n = spec.num_layers();
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.widths = spec.widths;
  cache.head = spec.head;
  cache.layer_inputs.reserve(n);
  cache.pre_activation.reserve(n);

  Matrix x = batch;
  for (int l = 0; l < n; ++l) {
    const DenseLayer& layer = params.layers[l];
    Matrix z(x.rows(), layer.weight.rows());
    z.noalias() = x * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    cache.layer_inputs.push_back(std::move(x));
    cache.pre_activation.push_back(z);
    if (l + 1 < n) {
      x = z.cwiseMax(0.0);
    } else {
      apply_head(spec.head, z);
      x = std::move(z);
    }
  }
  cache.outputs = x;
  result.outputs = std::move(x);
  return result;
}

Matrix mlp_predict(const MlpSpec& spec, const MlpParams& params,
                   const Matrix& batch) {
  check_batch(spec, params, batch);
  const int n = spec.num_layers();
  Matrix x = batch;
  for (int l = 0; l < n; ++l) {
    const DenseLayer& layer = params.layers[l];
    Matrix z(x.rows(), layer.weight.rows());
    z.noalias() = x * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    if (l + 1 < n) {
      x = z.cwiseMax(0.0);
    } else {
      apply_head(spec.head, z);
      x = std::move(z);
    }
  }
  return x;
}

BackwardResult mlp_backward(const MlpSpec& spec, const MlpParams& params,
                            const ForwardCache& cache,
                            const Matrix& output_grads,
                            GradientTargets targets) {
  const int n = spec.num_layers();
  if (cache.widths != spec.widths || cache.head != spec.head ||
      static_cast<int>(cache.layer_inputs.size()) != n ||
      static_cast<int>(cache.pre_activation.size()) != n) {
    throw InternalError("mlp_backward: cache was produced by a different spec");
  }
  if (!params.matches(spec)) {
    throw InternalError("mlp_backward: parameter shapes do not match the spec");
  }
  const Eigen::Index rows = cache.layer_inputs.front().rows();
  if (output_grads.rows() != rows || output_grads.cols() != spec.output_dim()) {
    throw InternalError("mlp_backward: output gradient shape does not match "
                        "the cached forward pass");
  }

  const bool want_params = targets == GradientTargets::kParamsAndInputs;
  BackwardResult result;
  if (want_params) result.param_grads = MlpParams::zeros(spec);

  Matrix delta = output_grads;
  if (spec.head == OutputHead::kSymmetricSigmoid) {
    // d/dz (2 sigma(z) - 1) = (1 - y^2) / 2
    delta = delta.cwiseProduct(
        cache.outputs.unaryExpr([](double y) { return 0.5 * (1.0 - y * y); }));
  }

  for (int l = n - 1; l >= 0; --l) {
    const DenseLayer& layer = params.layers[l];
    if (l < n - 1) {
      const Matrix& z = cache.pre_activation[l];
      delta = delta.cwiseProduct(
          z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    }
    if (want_params) {
      auto& g = result.param_grads.layers[l];
      g.weight.noalias() = delta.transpose() * cache.layer_inputs[l];
      g.bias = delta.colwise().sum().transpose();
    }
    Matrix upstream(delta.rows(), layer.weight.cols());
    upstream.noalias() = delta * layer.weight;
    delta = std::move(upstream);
  }
  result.input_grads = std::move(delta);
  return result;
}

}  // namespace clic::numkit
