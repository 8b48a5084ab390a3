#include "haad/inference.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "haad/errors.hpp"
#include "haad/random.hpp"

namespace haad {

std::vector<Embedding> embed_support(const EncoderParams& params, const DctBasis& basis,
                                     const SupportSet& support, const Augmenter& augmenter, int n_g,
                                     std::uint64_t seed) {
  if (support.members.empty()) throw ContractError("support set is empty");
  if (n_g < 0) throw ArgumentError("number of generations must be non-negative");
  std::vector<Embedding> out;
  out.reserve(support.members.size() * static_cast<std::size_t>(1 + n_g));
  for (std::size_t i = 0; i < support.members.size(); ++i) {
    const auto& member = support.members[i];
    out.push_back(encode_motion(params, basis, member));
    if (n_g == 0) continue;
    for (const auto& g : augmenter.augment(member, n_g, derive_seed(seed, {i})))
      out.push_back(encode_motion(params, basis, g));
  }
  return out;
}

double anomaly_score(const Embedding& z, const std::vector<Embedding>& support, ScoreMetric metric) {
  if (support.empty()) throw ContractError("support set is empty");
  double sum = 0.0;
  for (const auto& v : support) {
    if (v.size() != z.size()) throw ArgumentError("support embedding length differs from the test embedding");
    if (metric == ScoreMetric::kEuclidean) {
      sum += (z - v).norm();
    } else {
      const double denom = z.norm() * v.norm();
      if (!(denom > 0.0)) throw ContractError("cosine distance of a zero-norm embedding");
      sum += 1.0 - z.dot(v) / denom;
    }
  }
  return sum / static_cast<double>(support.size());
}

AnomalyScore score(const EncoderParams& params, const DctBasis& basis, const SupportSet& support,
                   const Augmenter& augmenter, int n_g, const MotionSequence& test, std::uint64_t seed,
                   const std::string& sample_id, ScoreMetric metric) {
  const auto v = embed_support(params, basis, support, augmenter, n_g, seed);
  const Embedding z = encode_motion(params, basis, test);
  return {anomaly_score(z, v, metric), sample_id, support.category};
}

double auc(const std::vector<double>& normal, const std::vector<double>& anomalous) {
  if (normal.empty() || anomalous.empty()) throw ContractError("AUC needs normal and anomalous scores");
  std::vector<double> sorted = normal;
  std::sort(sorted.begin(), sorted.end());
  double wins = 0.0;
  for (double a : anomalous) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), a);
    const auto hi = std::upper_bound(lo, sorted.end(), a);
    wins += static_cast<double>(lo - sorted.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(normal.size()) * static_cast<double>(anomalous.size()));
}

const CategoryResult& EvalReport::category(const std::string& name) const {
  for (const auto& c : categories)
    if (c.category == name) return c;
  throw ArgumentError("report has no category '" + name + "'");
}

namespace {

nlohmann::json eval_config_json(const EvalConfig& c, const Augmenter& augmenter) {
  return {{"n_s", c.n_s},
          {"n_g", c.n_g},
          {"trials", c.trials},
          {"seed", c.seed},
          {"metric", c.metric == ScoreMetric::kEuclidean ? "euclidean" : "cosine"},
          {"augmenter", augmenter.name()}};
}

}  // namespace

EvalReport evaluate(const Dataset& dataset, const EncoderParams& params, const Augmenter& augmenter,
                    const EvalConfig& config) {
  if (config.trials < 1) throw ConfigError("evaluation needs at least one trial");
  if (config.n_s < 1) throw ConfigError("support size must be positive");
  if (config.n_g < 0) throw ConfigError("number of generations must be non-negative");
  const auto& manifest = dataset.manifest();
  if (params.config.joints != manifest.joints)
    throw CompatibilityError("encoder joint count does not match the dataset");
  const DctBasis basis(params.config.dct_components, manifest.frame_length);

  EvalReport report;
  report.config = eval_config_json(config, augmenter);
  for (int k = 0; k < config.trials; ++k)
    report.trial_seeds.push_back(derive_seed(config.seed, {static_cast<std::uint64_t>(k)}));

  // The encoder is deterministic, so every test sample is embedded once.
  const auto test = dataset.test_indices();
  std::vector<Embedding> test_z;
  test_z.reserve(test.size());
  for (std::size_t idx : test) test_z.push_back(encode_motion(params, basis, dataset.motion(idx).motion));

  const auto& cats = config.categories.empty() ? manifest.categories : config.categories;
  for (std::size_t c = 0; c < cats.size(); ++c) {
    CategoryResult result;
    result.category = cats[c];
    try {
      for (int k = 0; k < config.trials; ++k) {
        const auto trial_seed = report.trial_seeds[static_cast<std::size_t>(k)];
        const SupportSet support = sample_support_set(dataset, cats[c], config.n_s, derive_seed(trial_seed, {c, 0}));
        const auto v = embed_support(params, basis, support, augmenter, config.n_g, derive_seed(trial_seed, {c, 1}));
        const std::set<std::string> excluded(support.member_ids.begin(), support.member_ids.end());
        std::vector<double> normal, anomalous;
        for (std::size_t t = 0; t < test.size(); ++t) {
          const auto& sample = dataset.motion(test[t]);
          if (excluded.count(sample.sample_id)) continue;
          const double a = anomaly_score(test_z[t], v, config.metric);
          (sample.category == cats[c] ? normal : anomalous).push_back(a);
        }
        if (normal.empty() || anomalous.empty())
          throw ContractError("category '" + cats[c] + "' leaves no normal or no anomalous test sample");
        result.trial_auc.push_back(auc(normal, anomalous));
      }
      double sum = 0.0, sq = 0.0;
      for (double a : result.trial_auc) sum += a;
      result.mean_auc = sum / static_cast<double>(result.trial_auc.size());
      for (double a : result.trial_auc) sq += (a - result.mean_auc) * (a - result.mean_auc);
      result.std_auc = std::sqrt(sq / static_cast<double>(result.trial_auc.size()));
    } catch (const ContractError& e) {
      result.skipped = true;
      result.error = e.what();
      result.trial_auc.clear();
    }
    report.categories.push_back(std::move(result));
  }

  int used = 0;
  for (const auto& r : report.categories) {
    if (r.skipped) continue;
    report.mean_auc += r.mean_auc;
    report.mean_std += r.std_auc;
    ++used;
  }
  if (used > 0) {
    report.mean_auc /= used;
    report.mean_std /= used;
  }
  return report;
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  out << "category,mean_auc,std_auc,n_trials\n" << std::setprecision(17);
  for (const auto& c : report.categories) {
    if (c.skipped) continue;
    out << c.category << ',' << c.mean_auc << ',' << c.std_auc << ',' << c.trial_auc.size() << '\n';
  }
}

nlohmann::json eval_summary_json(const EvalReport& report) {
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : report.categories) {
    nlohmann::json node = {{"category", c.category}, {"skipped", c.skipped}};
    if (c.skipped) {
      node["error"] = c.error;
    } else {
      node["mean_auc"] = c.mean_auc;
      node["std_auc"] = c.std_auc;
      node["trial_auc"] = c.trial_auc;
    }
    cats.push_back(std::move(node));
  }
  return {{"mean_auc", report.mean_auc},
          {"mean_std", report.mean_std},
          {"trial_seeds", report.trial_seeds},
          {"categories", cats},
          {"config", report.config}};
}

std::vector<SweepPoint> sweep_grid(const std::vector<int>& n_s, const std::vector<int>& n_g,
                                   const std::vector<std::pair<int, int>>& observed_predicted) {
  std::vector<SweepPoint> out;
  for (int s : n_s)
    for (int g : n_g)
      for (auto [o, p] : observed_predicted) out.push_back({s, g, o, p});
  return out;
}

std::vector<SweepRow> sweep(const Dataset& dataset, const EncoderParams& params,
                            const AugmenterFactory& make_augmenter, const std::vector<SweepPoint>& grid,
                            const EvalConfig& base) {
  const int frames = dataset.manifest().frame_length;
  for (const auto& p : grid) {
    if (p.observed < 0 || p.predicted < 0 || p.observed + p.predicted != frames) {
      throw ConfigError("sweep point (O=" + std::to_string(p.observed) + ", P=" + std::to_string(p.predicted) +
                        ") does not sum to the frame length " + std::to_string(frames));
    }
  }
  std::vector<SweepRow> rows;
  for (const auto& p : grid) {
    const auto augmenter = make_augmenter(p.observed);
    EvalConfig cfg = base;
    cfg.n_s = p.n_s;
    cfg.n_g = p.n_g;
    auto report = evaluate(dataset, params, *augmenter, cfg);
    report.config["observed"] = p.observed;
    report.config["predicted"] = p.predicted;
    rows.push_back({p, std::move(report)});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n_s,n_g,o,p,mean_auc,mean_std\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.point.n_s << ',' << r.point.n_g << ',' << r.point.observed << ',' << r.point.predicted << ','
        << r.report.mean_auc << ',' << r.report.mean_std << '\n';
  }
}

EmbeddingTable export_embeddings(const EncoderParams& params, const DctBasis& basis,
                                 const std::vector<LabeledMotion>& samples) {
  EmbeddingTable table;
  table.values.resize(static_cast<Eigen::Index>(samples.size()), params.config.joints);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    table.sample_ids.push_back(samples[i].sample_id);
    table.categories.push_back(samples[i].category);
    table.values.row(static_cast<Eigen::Index>(i)) = encode_motion(params, basis, samples[i].motion).transpose();
  }
  return table;
}

void write_embeddings_csv(std::ostream& out, const EmbeddingTable& table) {
  out << "sample_id,category";
  for (Eigen::Index j = 0; j < table.values.cols(); ++j) out << ",z" << j;
  out << '\n' << std::setprecision(9);
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    out << table.sample_ids[static_cast<std::size_t>(i)] << ',' << table.categories[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) out << ',' << table.values(i, j);
    out << '\n';
  }
}

EmbeddingTable read_embeddings_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("embedding CSV is empty");
  const auto columns = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',')) - 1;
  if (columns < 1 || line.rfind("sample_id,category", 0) != 0) throw ParseError("embedding CSV has a bad header");
  EmbeddingTable table;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, cat, cell;
    std::getline(ss, id, ',');
    std::getline(ss, cat, ',');
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("embedding CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<Eigen::Index>(row.size()) != columns)
      throw ParseError("embedding CSV line " + std::to_string(lineno) + " has the wrong column count");
    table.sample_ids.push_back(id);
    table.categories.push_back(cat);
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), columns);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < columns; ++j) table.values(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return table;
}

}  // namespace haad
