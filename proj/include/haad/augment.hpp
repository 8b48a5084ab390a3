#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "haad/diffusion.hpp"
#include "haad/motion.hpp"

namespace haad {

// Produces n_g variants of a motion with the same shape. Variant i depends only on
// (motion, seed + i).
class Augmenter {
 public:
  virtual ~Augmenter() = default;
  virtual std::vector<MotionSequence> augment(const MotionSequence& motion, int n_g,
                                              std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
};

// Returns n_g copies of the input.
class IdentityAugmenter final : public Augmenter {
 public:
  std::vector<MotionSequence> augment(const MotionSequence& motion, int n_g,
                                      std::uint64_t seed) const override;
  std::string name() const override { return "none"; }
};

// Keeps the first `observed` frames and adds Gaussian jitter to the rest. The jitter is
// drawn on the lowest `components` DCT-II coefficients over the predicted segment only, so
// the difference is band-limited within that segment.
class PerturbationAugmenter final : public Augmenter {
 public:
  PerturbationAugmenter(double sigma, int observed, int components);

  std::vector<MotionSequence> augment(const MotionSequence& motion, int n_g,
                                      std::uint64_t seed) const override;
  std::string name() const override { return "perturb"; }

 private:
  double sigma_;
  int observed_;
  int components_;
};

// Frequency-domain diffusion completion of the frames after `observed`.
class DiffusionAugmenter final : public Augmenter {
 public:
  DiffusionAugmenter(std::shared_ptr<const DiffusionModel> model, int observed);

  std::vector<MotionSequence> augment(const MotionSequence& motion, int n_g,
                                      std::uint64_t seed) const override;
  std::string name() const override { return "diffusion"; }
  const DiffusionModel& model() const { return *model_; }

 private:
  std::shared_ptr<const DiffusionModel> model_;
  int observed_;
};

std::vector<MotionSequence> perturbation_augment(const MotionSequence& motion, int n_g,
                                                 std::uint64_t seed, double sigma, int observed,
                                                 int components);

}  // namespace haad
