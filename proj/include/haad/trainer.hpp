#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "haad/adam.hpp"
#include "haad/augment.hpp"
#include "haad/encoder.hpp"
#include "haad/motion.hpp"

namespace haad {

struct TrainConfig {
  int epochs = 100;
  double lr_start = 1e-3;
  double lr_end = 1e-5;
  double temperature = 1.0;
  int n_g = 3;
  int steps_per_epoch = 1;
  bool cache_augmentations = false;
  AdamConfig adam;
  std::uint64_t seed = 0;

  void validate() const;
};

// Linear decay from lr_start at epoch 1 to lr_end at epoch E (1-based).
double learning_rate(const TrainConfig& config, int epoch);

enum class Origin { kReal, kGenerated };

struct MinibatchEntry {
  MotionSequence sample;
  std::string category;
  Origin origin = Origin::kReal;
  std::size_t parent = 0;  // batch index of the real entry this one descends from (itself if real)
  std::string source_id;   // dataset sample id of the real parent
};

// Category-major; within a category: real_a, its children, real_b, its children.
struct Minibatch {
  std::vector<MinibatchEntry> entries;
  std::size_t size() const { return entries.size(); }
  std::vector<std::string> categories() const;
};

// Remembers generated children per dataset sample so later epochs reuse them.
class AugmentationCache {
 public:
  explicit AugmentationCache(std::uint64_t seed) : seed_(seed) {}
  const std::vector<MotionSequence>& get(const Dataset& dataset, std::size_t index,
                                         const Augmenter& augmenter, int n_g);

 private:
  std::uint64_t seed_;
  std::map<std::size_t, std::vector<MotionSequence>> cache_;
};

// Two distinct real samples per train category plus n_g generated children each.
Minibatch build_minibatch(const Dataset& dataset, const Augmenter& augmenter, int n_g,
                          std::uint64_t seed, AugmentationCache* cache = nullptr);

// For each i, every j != i with the same category.
std::vector<std::vector<std::size_t>> positive_sets(const std::vector<std::string>& categories);

struct ContrastiveLoss {
  double loss = 0.0;                       // mean of per_sample
  std::vector<double> per_sample;          // l(i)
  std::vector<Eigen::VectorXd> gradients;  // d loss / d z_i
};

// Multi-positive contrastive loss over cosine similarities:
//   l(i) = sum_{j in P(i)} -log( exp(s_ij/tau) / sum_{k != i} exp(s_ik/tau) )
ContrastiveLoss contrastive_loss(const std::vector<Eigen::VectorXd>& embeddings,
                                 const std::vector<std::string>& categories, double temperature);

struct TrainLogEntry {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  EncoderParams params;
  std::vector<TrainLogEntry> log;
};

using EpochCallback = std::function<void(const TrainLogEntry&, const EncoderParams&)>;

TrainResult train(const Dataset& dataset, const EncoderConfig& encoder_config,
                  const Augmenter& augmenter, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// epoch,lr,loss with a header row.
void write_train_log_csv(std::ostream& out, const std::vector<TrainLogEntry>& log);

}  // namespace haad
