#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace clic::numkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class OutputHead {
  kIdentity,          // energy head: raw affine output
  kSymmetricSigmoid,  // action head: 2 * sigmoid(z) - 1, range (-1, 1)
};

// Fully connected ReLU network. widths = {input, hidden..., output}.
struct MlpSpec {
  std::vector<int> widths;
  OutputHead head = OutputHead::kIdentity;

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  int num_layers() const { return static_cast<int>(widths.size()) - 1; }

  // Throws ConfigError when fewer than two widths or any width < 1.
  void validate() const;

  bool operator==(const MlpSpec&) const = default;
};

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  static MlpParams zeros(const MlpSpec& spec);
  // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static MlpParams glorot_uniform(const MlpSpec& spec, std::mt19937_64& rng);

  bool matches(const MlpSpec& spec) const;
  bool all_finite() const;
  std::size_t parameter_count() const;

  MlpParams& operator+=(const MlpParams& other);
  MlpParams& operator*=(double scale);
  // this += scale * other
  void add_scaled(const MlpParams& other, double scale);
  double squared_norm() const;

  // Layer-major, weights row-major then bias. Used for gradient checks and
  // checkpoints.
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> values);
};

// Everything mlp_backward needs. Records the widths and batch size of the
// forward pass that produced it so a mismatched reuse is caught.
struct ForwardCache {
  std::vector<Matrix> layer_inputs;    // input fed to layer l
  std::vector<Matrix> pre_activation;  // affine output of layer l
  Matrix outputs;
  std::vector<int> widths;
  OutputHead head = OutputHead::kIdentity;
};

struct ForwardResult {
  Matrix outputs;  // batch x output_dim
  ForwardCache cache;
};

struct BackwardResult {
  MlpParams param_grads;
  Matrix input_grads;  // batch x input_dim
};

enum class GradientTargets { kParamsAndInputs, kInputsOnly };

// Rows of `batch` are samples.
ForwardResult mlp_forward(const MlpSpec& spec, const MlpParams& params,
                          const Matrix& batch);

// Forward pass without keeping intermediate activations.
Matrix mlp_predict(const MlpSpec& spec, const MlpParams& params,
                   const Matrix& batch);

// Reverse-mode pass for d(sum_ij output_grads_ij * outputs_ij).
// With kInputsOnly the returned param_grads is empty.
BackwardResult mlp_backward(const MlpSpec& spec, const MlpParams& params,
                            const ForwardCache& cache,
                            const Matrix& output_grads,
                            GradientTargets targets =
                                GradientTargets::kParamsAndInputs);

}  // namespace clic::numkit
