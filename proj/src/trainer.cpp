#include "haad/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "haad/errors.hpp"
#include "haad/random.hpp"
#include "haad/spectral.hpp"

namespace haad {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("training needs at least one epoch");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (!(lr_end > 0.0) || lr_start < lr_end) throw ConfigError("need lr_start >= lr_end > 0");
  if (n_g < 0) throw ConfigError("number of generations must be non-negative");
  if (steps_per_epoch < 1) throw ConfigError("steps_per_epoch must be at least 1");
}

double learning_rate(const TrainConfig& config, int epoch) {
  if (epoch < 1 || epoch > config.epochs) throw ArgumentError("epoch outside [1, epochs]");
  if (config.epochs == 1 || epoch == 1) return config.lr_start;
  if (epoch == config.epochs) return config.lr_end;
  const double frac = static_cast<double>(epoch - 1) / static_cast<double>(config.epochs - 1);
  return config.lr_start + frac * (config.lr_end - config.lr_start);
}

std::vector<std::string> Minibatch::categories() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.category);
  return out;
}

const std::vector<MotionSequence>& AugmentationCache::get(const Dataset& dataset, std::size_t index,
                                                          const Augmenter& augmenter, int n_g) {
  auto it = cache_.find(index);
  if (it == cache_.end() || static_cast<int>(it->second.size()) != n_g) {
    auto children = augmenter.augment(dataset.motion(index).motion, n_g, derive_seed(seed_, {index}));
    it = cache_.insert_or_assign(index, std::move(children)).first;
  }
  return it->second;
}

Minibatch build_minibatch(const Dataset& dataset, const Augmenter& augmenter, int n_g,
                          std::uint64_t seed, AugmentationCache* cache) {
  if (n_g < 0) throw ConfigError("number of generations must be non-negative");
  Rng rng(seed);
  Minibatch batch;
  const auto cats = dataset.manifest().train_categories();
  for (std::size_t c = 0; c < cats.size(); ++c) {
    const auto pool = dataset.train_pool(cats[c]);
    if (pool.size() < 2) {
      throw ConfigError("train category '" + cats[c] + "' has " + std::to_string(pool.size()) +
                        " samples; a minibatch needs 2");
    }
    std::uniform_int_distribution<std::size_t> first(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, pool.size() - 2);
    const std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;
    for (std::size_t pick : {pool[a], pool[b]}) {
      const auto& real = dataset.motion(pick);
      const std::size_t parent = batch.entries.size();
      batch.entries.push_back({real.motion, real.category, Origin::kReal, parent, real.sample_id});
      if (n_g == 0) continue;
      std::vector<MotionSequence> fresh;
      const std::vector<MotionSequence>* children = nullptr;
      if (cache) {
        children = &cache->get(dataset, pick, augmenter, n_g);
      } else {
        fresh = augmenter.augment(real.motion, n_g, derive_seed(seed, {0xa06, pick}));
        children = &fresh;
      }
      for (const auto& child : *children)
        batch.entries.push_back({child, real.category, Origin::kGenerated, parent, real.sample_id});
    }
  }
  return batch;
}

std::vector<std::vector<std::size_t>> positive_sets(const std::vector<std::string>& categories) {
  std::vector<std::vector<std::size_t>> out(categories.size());
  for (std::size_t i = 0; i < categories.size(); ++i)
    for (std::size_t j = 0; j < categories.size(); ++j)
      if (j != i && categories[j] == categories[i]) out[i].push_back(j);
  return out;
}

ContrastiveLoss contrastive_loss(const std::vector<Eigen::VectorXd>& embeddings,
                                 const std::vector<std::string>& categories, double temperature) {
  const std::size_t n = embeddings.size();
  if (n < 2) throw ContractError("contrastive loss needs at least two embeddings");
  if (categories.size() != n) throw ArgumentError("one category per embedding required");
  if (!(temperature > 0.0)) throw ArgumentError("temperature must be positive");
  const Eigen::Index dim = embeddings.front().size();

  Eigen::MatrixXd unit(static_cast<Eigen::Index>(n), dim);
  Eigen::VectorXd norms(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& z = embeddings[i];
    if (z.size() != dim) throw ArgumentError("embeddings differ in length");
    if (!z.allFinite()) throw ContractError("embedding " + std::to_string(i) + " is not finite");
    const double norm = z.norm();
    if (!(norm > 0.0)) throw ContractError("embedding " + std::to_string(i) + " has zero norm");
    norms(static_cast<Eigen::Index>(i)) = norm;
    unit.row(static_cast<Eigen::Index>(i)) = z.transpose() / norm;
  }
  const auto positives = positive_sets(categories);
  const Eigen::MatrixXd sim = unit * unit.transpose();
  const double inv_tau = 1.0 / temperature;
  const double inv_n = 1.0 / static_cast<double>(n);

  ContrastiveLoss out;
  out.per_sample.resize(n);
  Eigen::MatrixXd d_sim = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pos = positives[i];
    if (pos.empty()) throw ContractError("entry " + std::to_string(i) + " has no positive counterpart");
    const auto ii = static_cast<Eigen::Index>(i);
    double peak = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k)
      if (k != ii) peak = std::max(peak, sim(ii, k) * inv_tau);
    double total = 0.0;
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k)
      if (k != ii) total += std::exp(sim(ii, k) * inv_tau - peak);
    const double lse = peak + std::log(total);
    double li = 0.0;
    for (std::size_t j : pos) li += lse - sim(ii, static_cast<Eigen::Index>(j)) * inv_tau;
    out.per_sample[i] = li;

    const double weight = static_cast<double>(pos.size());
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
      if (k == ii) continue;
      const double softmax = std::exp(sim(ii, k) * inv_tau - lse);
      d_sim(ii, k) += inv_n * weight * softmax * inv_tau;
    }
    for (std::size_t j : pos) d_sim(ii, static_cast<Eigen::Index>(j)) -= inv_n * inv_tau;
  }
  double sum = 0.0;
  for (double v : out.per_sample) sum += v;
  out.loss = sum * inv_n;

  // s_ik = u_i . u_k, so d/du_i collects both row i and column i of d_sim.
  const Eigen::MatrixXd d_unit = (d_sim + d_sim.transpose()) * unit;
  out.gradients.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd u = unit.row(ii).transpose();
    const Eigen::VectorXd g = d_unit.row(ii).transpose();
    out.gradients[i] = (g - u * u.dot(g)) / norms(ii);
  }
  return out;
}

TrainResult train(const Dataset& dataset, const EncoderConfig& encoder_config,
                  const Augmenter& augmenter, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  encoder_config.validate();
  const auto& manifest = dataset.manifest();
  if (manifest.train_categories().size() < 2)
    throw ConfigError("training needs at least 2 seen categories");
  if (encoder_config.joints != manifest.joints) {
    throw CompatibilityError("encoder expects " + std::to_string(encoder_config.joints) +
                             " joints but the dataset has " + std::to_string(manifest.joints));
  }
  const DctBasis basis(encoder_config.dct_components, manifest.frame_length);

  TrainResult result;
  result.params = init_params(encoder_config, derive_seed(config.seed, {0xe1c}));
  Adam adam(config.adam);
  AugmentationCache cache(derive_seed(config.seed, {0xcac4e}));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = learning_rate(config, epoch);
    double epoch_loss = 0.0;
    for (int step = 0; step < config.steps_per_epoch; ++step) {
      const auto batch_seed =
          derive_seed(config.seed, {static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(step)});
      const Minibatch batch = build_minibatch(dataset, augmenter, config.n_g, batch_seed,
                                              config.cache_augmentations ? &cache : nullptr);
      std::vector<DctCoefficients> inputs;
      std::vector<Eigen::VectorXd> z;
      for (const auto& e : batch.entries) {
        inputs.push_back(dct_encode(basis, e.sample));
        z.push_back(forward(result.params, inputs.back()));
      }
      const ContrastiveLoss loss = contrastive_loss(z, batch.categories(), config.temperature);
      if (!std::isfinite(loss.loss)) {
        throw DivergenceError("non-finite contrastive loss at epoch " + std::to_string(epoch) + " step " +
                              std::to_string(step + 1));
      }
      EncoderParams total = result.params.zeros_like();
      auto acc = total.tensors();
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        const EncoderGradients g = backward(result.params, inputs[i], loss.gradients[i]);
        const auto part = g.params.tensors();
        for (std::size_t k = 0; k < acc.size(); ++k) *acc[k] += *part[k];
      }
      std::vector<Eigen::MatrixXd> grads;
      for (auto* t : acc) {
        if (!t->allFinite()) {
          throw DivergenceError("non-finite gradient at epoch " + std::to_string(epoch) + " step " +
                                std::to_string(step + 1));
        }
        grads.push_back(*t);
      }
      adam.step(result.params.tensors(), grads, lr);
      epoch_loss += loss.loss;
    }
    result.log.push_back({epoch, lr, epoch_loss / config.steps_per_epoch});
    if (on_epoch) on_epoch(result.log.back(), result.params);
  }
  return result;
}

void write_train_log_csv(std::ostream& out, const std::vector<TrainLogEntry>& log) {
  out << "epoch,lr,loss\n";
  out << std::setprecision(17);
  for (const auto& e : log) out << e.epoch << ',' << e.lr << ',' << e.loss << '\n';
}

}  // namespace haad
