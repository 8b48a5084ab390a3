#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "haad/checkpoint.hpp"
#include "haad/motion.hpp"
#include "haad/spectral.hpp"

namespace haad {

// Cumulative products alpha_bar_t for t = 1..steps. alpha_bar(0) is defined as 1.
class NoiseSchedule {
 public:
  // Validates 0 < alpha_bar <= 1 and strictly decreasing.
  explicit NoiseSchedule(Eigen::VectorXd alpha_bar);

  int steps() const { return static_cast<int>(alpha_bar_.size()); }
  double alpha_bar(int t) const;
  const Eigen::VectorXd& values() const { return alpha_bar_; }

 private:
  Eigen::VectorXd alpha_bar_;
};

// alpha_bar_t = f(t)/f(0), f(t) = cos^2(((t/T + s)/(1 + s)) * pi/2), realized through
// per-step betas clipped at `max_beta` so the final value stays positive.
NoiseSchedule build_cosine_schedule(int steps, double offset = 0.008, double max_beta = 0.999);

// sqrt(ab_t) * c0 + sqrt(1 - ab_t) * noise, t in [1, steps].
DctCoefficients forward_noise(const NoiseSchedule& schedule, const DctCoefficients& c0, int t,
                              const Eigen::MatrixXd& noise);

// Observed/predicted split of a sequence: first O frames observed (1), last P predicted (0).
class CompletionMask {
 public:
  CompletionMask(int observed, int predicted);

  int observed() const { return observed_; }
  int predicted() const { return predicted_; }
  int length() const { return observed_ + predicted_; }
  Eigen::VectorXd values() const;

 private:
  int observed_;
  int predicted_;
};

// T (mask * T^T noisy + (1 - mask) * T^T denoised), mask applied per frame.
DctCoefficients fuse_completion(const DctBasis& basis, const CompletionMask& mask,
                                const DctCoefficients& noisy_observed, const DctCoefficients& denoised);

struct NoisePredictorConfig {
  int dct_components = 20;
  int joints = 24;
  int hidden = 128;
  int blocks = 2;
  int time_dim = 32;
  int steps = 100;  // timestep range the predictor was trained for
};

// Reduced noise predictor over flattened spectra:
//   h = W_in x + W_t emb(t) + b_in
//   per block: h <- h + W2 silu(W1 h + b1) + b2
//   eps = a_t x + g_t (W_out h + b_out)
// x is the M x 3J spectrum flattened column-major; a and g hold one learnable scalar per
// timestep, so the near-identity part of the noise does not pass through the hidden width.
struct NoisePredictorParams {
  NoisePredictorConfig config;
  Eigen::MatrixXd input_weight, time_weight, input_bias;
  std::vector<Eigen::MatrixXd> inner_weight, inner_bias, outer_weight, outer_bias;
  Eigen::MatrixXd output_weight, output_bias;
  Eigen::MatrixXd skip, gain;  // steps x 1

  std::vector<Eigen::MatrixXd*> tensors();
  std::vector<const Eigen::MatrixXd*> tensors() const;
  std::vector<std::string> tensor_names() const;
  NoisePredictorParams zeros_like() const;
};

// Fan-in uniform weights, zero biases and output layer. a_t = 1/sqrt(1 - ab_t) and
// g_t = -sqrt(ab_t)/sqrt(1 - ab_t), which makes the network output a clean-spectrum estimate.
NoisePredictorParams init_noise_predictor(const NoisePredictorConfig& config, std::uint64_t seed);

// Sinusoidal embedding [sin(t w_0) .. sin(t w_{k-1}) cos(t w_0) .. cos(t w_{k-1})].
Eigen::VectorXd timestep_embedding(int t, int dim);

// Columns of `spectra` are flattened spectra; timesteps[i] is the diffusion step of column i.
Eigen::MatrixXd predict_noise(const NoisePredictorParams& params, const Eigen::MatrixXd& spectra,
                              const std::vector<int>& timesteps);

// Mean over columns of ||target - predict_noise||^2 and its parameter gradient.
double noise_loss_and_gradient(const NoisePredictorParams& params, const Eigen::MatrixXd& spectra,
                               const std::vector<int>& timesteps, const Eigen::MatrixXd& target,
                               NoisePredictorParams* grad);

// Spectra are divided by `scale` before entering the predictor.
struct DiffusionModel {
  NoisePredictorParams predictor;
  NoiseSchedule schedule{Eigen::VectorXd::Ones(1)};
  int frames = 60;
  double scale = 1.0;
  // Per-coefficient bound on the sampler's clean-spectrum estimate, in scaled units; empty
  // disables clipping. Training sets it to the largest magnitude seen in the corpus.
  DctCoefficients x0_bound;

  int dct_components() const { return predictor.config.dct_components; }
  int joints() const { return predictor.config.joints; }
  // Throws ArgumentError when predictor, schedule and frame count disagree.
  void validate() const;
};

struct DiffusionTrainConfig {
  int steps = 100;
  int dct_components = 20;
  int hidden = 128;
  int blocks = 2;
  int time_dim = 32;
  int epochs = 50;
  int batch_size = 32;
  double lr = 1e-3;
  int threads = 1;  // >1 splits each batch's gradient across threads
  int validation_size = 64;
  std::uint64_t seed = 0;
};

struct DiffusionTrainResult {
  DiffusionModel model;
  std::vector<double> epoch_loss;
  double initial_validation_loss = 0.0;
  double final_validation_loss = 0.0;
};

DiffusionTrainResult train_diffusion(const std::vector<MotionSequence>& corpus,
                                     const DiffusionTrainConfig& config);

// Called once per reverse step with (t, noisy observed C^n_{t-1}, denoised C^d_{t-1},
// fused C_{t-1}) in model space, for every generated sample.
using SamplerObserver = std::function<void(int sample, int t, const DctCoefficients& noisy,
                                           const DctCoefficients& denoised, const DctCoefficients& fused)>;

// Deterministic (eta = 0) DDIM from t = steps down to 1 with DCT-Completion fusion at every
// step. Sample i draws its initial spectrum and every C^n noise from Rng(seed + i).
std::vector<MotionSequence> ddim_sample_with_completion(const DiffusionModel& model,
                                                        const MotionSequence& observed,
                                                        const CompletionMask& mask, int n_g,
                                                        std::uint64_t seed,
                                                        const SamplerObserver& observer = {});

Checkpoint diffusion_to_checkpoint(const DiffusionModel& model, const nlohmann::json& extra = {});
DiffusionModel diffusion_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace haad
