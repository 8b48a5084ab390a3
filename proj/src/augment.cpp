#include "haad/augment.hpp"

#include <algorithm>

#include "haad/errors.hpp"
#include "haad/random.hpp"
#include "haad/spectral.hpp"

namespace haad {

std::vector<MotionSequence> IdentityAugmenter::augment(const MotionSequence& motion, int n_g,
                                                       std::uint64_t) const {
  if (n_g < 0) throw ArgumentError("number of generations must be non-negative");
  return std::vector<MotionSequence>(static_cast<std::size_t>(n_g), motion);
}

std::vector<MotionSequence> perturbation_augment(const MotionSequence& motion, int n_g,
                                                 std::uint64_t seed, double sigma, int observed,
                                                 int components) {
  if (!(sigma >= 0.0)) throw ArgumentError("perturbation sigma must be non-negative");
  if (n_g < 0) throw ArgumentError("number of generations must be non-negative");
  if (observed < 0 || observed > motion.frame_count())
    throw ArgumentError("observed length outside the motion");
  if (components < 1) throw ArgumentError("perturbation needs at least one DCT component");
  const int predicted = motion.frame_count() - observed;
  std::vector<MotionSequence> out;
  out.reserve(static_cast<std::size_t>(n_g));
  for (int i = 0; i < n_g; ++i) {
    Eigen::MatrixXd frames = motion.frames();
    if (predicted > 0 && sigma > 0.0) {
      const DctBasis basis(std::min(components, predicted), predicted);
      Rng rng(seed + static_cast<std::uint64_t>(i));
      const Eigen::MatrixXd coeffs = sigma * standard_normal(basis.components(), frames.cols(), rng);
      frames.bottomRows(predicted) += idct_frames(basis, coeffs);
    }
    out.emplace_back(std::move(frames), motion.joint_count());
  }
  return out;
}

PerturbationAugmenter::PerturbationAugmenter(double sigma, int observed, int components)
    : sigma_(sigma), observed_(observed), components_(components) {
  if (!(sigma >= 0.0)) throw ArgumentError("perturbation sigma must be non-negative");
  if (observed < 0) throw ArgumentError("observed length must be non-negative");
  if (components < 1) throw ArgumentError("perturbation needs at least one DCT component");
}

std::vector<MotionSequence> PerturbationAugmenter::augment(const MotionSequence& motion, int n_g,
                                                           std::uint64_t seed) const {
  return perturbation_augment(motion, n_g, seed, sigma_, observed_, components_);
}

DiffusionAugmenter::DiffusionAugmenter(std::shared_ptr<const DiffusionModel> model, int observed)
    : model_(std::move(model)), observed_(observed) {
  if (!model_) throw ArgumentError("diffusion augmenter needs a model");
  model_->validate();
  if (observed < 0 || observed > model_->frames)
    throw ArgumentError("observed length outside the diffusion model's frame count");
}

std::vector<MotionSequence> DiffusionAugmenter::augment(const MotionSequence& motion, int n_g,
                                                        std::uint64_t seed) const {
  const CompletionMask mask(observed_, model_->frames - observed_);
  return ddim_sample_with_completion(*model_, motion, mask, n_g, seed);
}

}  // namespace haad
