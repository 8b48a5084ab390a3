#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "haad/checkpoint.hpp"
#include "haad/motion.hpp"
#include "haad/spectral.hpp"

namespace haad {

enum class Activation { kTanh, kIdentity };

struct EncoderConfig {
  int blocks = 4;
  int layers_per_block = 2;
  int hidden_dim = 128;
  int joints = 24;
  int dct_components = 10;
  Activation activation = Activation::kTanh;

  int layer_count() const { return blocks * layers_per_block; }
  void validate() const;
};

// Learnable tensors of the residual GCN:
//   H0 = X W_in                                  (X: J x 3M node features)
//   block b: Y = act(A_l Y W_l) for its layers, H <- H + Y
//   O = H W_out,  z_j = max_f O(j, f)
// Adjacencies are J x J, unconstrained and without normalization. No bias terms.
struct EncoderParams {
  EncoderConfig config;
  Eigen::MatrixXd input_weight;            // 3M x F
  std::vector<Eigen::MatrixXd> adjacency;  // per layer, J x J
  std::vector<Eigen::MatrixXd> weight;     // per layer, F x F
  Eigen::MatrixXd output_weight;           // F x F
  std::uint64_t seed = 0;

  // Stable ordering used by the optimizer and the checkpoint format.
  std::vector<Eigen::MatrixXd*> tensors();
  std::vector<const Eigen::MatrixXd*> tensors() const;
  std::vector<std::string> tensor_names() const;

  // Same shapes, all zeros; used as a gradient accumulator.
  EncoderParams zeros_like() const;
};

using Embedding = Eigen::VectorXd;

struct EncoderGradients {
  EncoderParams params;   // d<grad_z, z>/d(parameter), same layout as the parameters
  Eigen::MatrixXd input;  // M x 3J, gradient w.r.t. the DCT coefficients
};

// Weights ~ U(-sqrt(3/fan_in), sqrt(3/fan_in)); adjacencies = I + U(-1e-2, 1e-2).
EncoderParams init_params(const EncoderConfig& config, std::uint64_t seed);

// M x 3J spectrum -> J x 3M node features; node j row is [c(0,x) c(0,y) c(0,z) c(1,x) ...].
Eigen::MatrixXd to_node_features(const DctCoefficients& coeffs, int joints);
DctCoefficients from_node_features(const Eigen::MatrixXd& features, int components);

Embedding forward(const EncoderParams& params, const DctCoefficients& coeffs);

// Feature index selected by the max-pool for each joint.
std::vector<Eigen::Index> pooling_indices(const EncoderParams& params, const DctCoefficients& coeffs);

// Exact reverse-mode gradients of <grad_z, forward(params, coeffs)>. The max-pool routes
// each joint's gradient to its first maximal feature.
EncoderGradients backward(const EncoderParams& params, const DctCoefficients& coeffs,
                          const Eigen::VectorXd& grad_z);

// Convenience: DCT then forward.
Embedding encode_motion(const EncoderParams& params, const DctBasis& basis,
                        const MotionSequence& motion);

nlohmann::json encoder_config_to_json(const EncoderConfig& config);
EncoderConfig encoder_config_from_json(const nlohmann::json& node);

// `extra` is merged into the header (frame length, lineage, ...).
Checkpoint encoder_to_checkpoint(const EncoderParams& params, const nlohmann::json& extra = {});
EncoderParams encoder_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace haad
