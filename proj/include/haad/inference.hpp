#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "haad/augment.hpp"
#include "haad/encoder.hpp"
#include "haad/motion.hpp"
#include "haad/spectral.hpp"

namespace haad {

enum class ScoreMetric { kEuclidean, kCosine };

struct AnomalyScore {
  double value = 0.0;
  std::string sample_id;
  std::string support_category;
};

// Embeddings of every support member followed by its n_g generations (A = N_s (1 + n_g)).
// Member i requests its generations with seed derive_seed(seed, {i}).
std::vector<Embedding> embed_support(const EncoderParams& params, const DctBasis& basis,
                                     const SupportSet& support, const Augmenter& augmenter, int n_g,
                                     std::uint64_t seed);

// Mean distance from z to every support embedding (Euclidean by default; cosine distance
// 1 - cos for ablations).
double anomaly_score(const Embedding& z, const std::vector<Embedding>& support,
                     ScoreMetric metric = ScoreMetric::kEuclidean);

AnomalyScore score(const EncoderParams& params, const DctBasis& basis, const SupportSet& support,
                   const Augmenter& augmenter, int n_g, const MotionSequence& test, std::uint64_t seed,
                   const std::string& sample_id = {}, ScoreMetric metric = ScoreMetric::kEuclidean);

// Fraction of (anomalous, normal) pairs where the anomalous score is higher; ties count 0.5.
double auc(const std::vector<double>& scores_normal, const std::vector<double>& scores_anomalous);

struct EvalConfig {
  int n_s = 3;
  int n_g = 10;
  int trials = 10;
  std::uint64_t seed = 0;
  ScoreMetric metric = ScoreMetric::kEuclidean;
  // Categories to evaluate; empty means every manifest category.
  std::vector<std::string> categories;
};

struct CategoryResult {
  std::string category;
  std::vector<double> trial_auc;
  double mean_auc = 0.0;
  double std_auc = 0.0;  // population standard deviation across trials
  bool skipped = false;
  std::string error;
};

struct EvalReport {
  std::vector<CategoryResult> categories;
  double mean_auc = 0.0;  // over evaluated categories
  double mean_std = 0.0;  // mean of per-category std
  std::vector<std::uint64_t> trial_seeds;
  nlohmann::json config;

  const CategoryResult& category(const std::string& name) const;
};

// For each category and trial: draw a support set from the category's test pool, score every
// other test sample, treat the category as normal and the rest as anomalous, compute AUC.
// A category whose pool cannot supply the support set (or that leaves no normal or no anomalous
// sample to score) is marked skipped and excluded from the means.
EvalReport evaluate(const Dataset& dataset, const EncoderParams& params, const Augmenter& augmenter,
                    const EvalConfig& config);

// category,mean_auc,std_auc,n_trials
void write_eval_csv(std::ostream& out, const EvalReport& report);
nlohmann::json eval_summary_json(const EvalReport& report);

struct SweepPoint {
  int n_s = 3;
  int n_g = 0;
  int observed = 30;
  int predicted = 30;
};

struct SweepRow {
  SweepPoint point;
  EvalReport report;
};

using AugmenterFactory = std::function<std::unique_ptr<Augmenter>(int observed)>;

// Every point needs observed + predicted equal to the dataset's frame length.
std::vector<SweepRow> sweep(const Dataset& dataset, const EncoderParams& params,
                            const AugmenterFactory& make_augmenter, const std::vector<SweepPoint>& grid,
                            const EvalConfig& base);

// Cartesian product of the axes, in n_s-major order.
std::vector<SweepPoint> sweep_grid(const std::vector<int>& n_s, const std::vector<int>& n_g,
                                   const std::vector<std::pair<int, int>>& observed_predicted);

// n_s,n_g,o,p,mean_auc,mean_std
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct EmbeddingTable {
  std::vector<std::string> sample_ids;
  std::vector<std::string> categories;
  Eigen::MatrixXd values;  // one row per sample
};

EmbeddingTable export_embeddings(const EncoderParams& params, const DctBasis& basis,
                                 const std::vector<LabeledMotion>& samples);
// sample_id,category,z0..z{J-1}
void write_embeddings_csv(std::ostream& out, const EmbeddingTable& table);
EmbeddingTable read_embeddings_csv(std::istream& in);

}  // namespace haad
