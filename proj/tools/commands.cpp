#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "haad/augment.hpp"
#include "haad/checkpoint.hpp"
#include "haad/diffusion.hpp"
#include "haad/encoder.hpp"
#include "haad/errors.hpp"
#include "haad/inference.hpp"
#include "haad/motion.hpp"
#include "haad/random.hpp"
#include "haad/trainer.hpp"

namespace haad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

fs::path required_path(const RunConfig& rc, const std::string& key, const std::string& what) {
  const auto value = rc.get<std::string>(key);
  if (value.empty()) throw ConfigError(rc.command + " needs " + what + " (" + key + ")");
  return value;
}

Dataset load_dataset(const RunConfig& rc, std::ostream& log) {
  const auto path = required_path(rc, "data.manifest", "a dataset manifest");
  Dataset ds(load_manifest(path));
  log << "[" << rc.command << "] loaded " << ds.motions().size() << " samples from " << path.string() << "\n";
  return ds;
}

// Raises when a key the user set disagrees with what a checkpoint was built with.
void check_explicit(const RunConfig& rc, const std::string& key, int actual, const std::string& source) {
  if (rc.is_explicit(key) && rc.get<int>(key) != actual) {
    throw CompatibilityError(key + " is " + std::to_string(rc.get<int>(key)) + " but " + source + " was built with " +
                             std::to_string(actual));
  }
}

struct LoadedEncoder {
  EncoderParams params;
  json header;
  int frame_length = 60;
  bool center_root = true;
};

void record(RunConfig& rc, const std::string& key, const json& value) {
  rc.values[json::json_pointer(RunConfig::pointer(key))] = value;
}

LoadedEncoder load_encoder(RunConfig& rc) {
  const auto path = required_path(rc, "encoder.checkpoint", "an encoder checkpoint");
  const auto ck = read_checkpoint(path);
  LoadedEncoder e{encoder_from_checkpoint(ck), ck.header, 60, true};
  e.frame_length = ck.header.value("frame_length", 60);
  e.center_root = ck.header.value("center_root", true);
  const auto& c = e.params.config;
  const std::string src = "encoder checkpoint " + path.string();
  check_explicit(rc, "encoder.blocks", c.blocks, src);
  check_explicit(rc, "encoder.layers_per_block", c.layers_per_block, src);
  check_explicit(rc, "encoder.hidden_dim", c.hidden_dim, src);
  check_explicit(rc, "encoder.dct_components", c.dct_components, src);
  record(rc, "encoder.blocks", c.blocks);
  record(rc, "encoder.layers_per_block", c.layers_per_block);
  record(rc, "encoder.hidden_dim", c.hidden_dim);
  record(rc, "encoder.dct_components", c.dct_components);
  return e;
}

void check_encoder_data(const LoadedEncoder& e, const DatasetManifest& m) {
  if (e.params.config.joints != m.joints) {
    throw CompatibilityError("encoder has J=" + std::to_string(e.params.config.joints) + " but the dataset has J=" +
                             std::to_string(m.joints));
  }
  if (e.frame_length != m.frame_length) {
    throw CompatibilityError("encoder was trained on " + std::to_string(e.frame_length) +
                             "-frame clips but the dataset uses " + std::to_string(m.frame_length));
  }
}

std::string augment_kind(const RunConfig& rc) {
  const auto kind = rc.get<std::string>("augment.kind");
  if (kind != "diffusion" && kind != "perturb" && kind != "none")
    throw ConfigError("augment.kind must be diffusion, perturb or none, got '" + kind + "'");
  return kind;
}

// The diffusion model is loaded only when generations are actually requested.
std::shared_ptr<const DiffusionModel> load_diffusion(RunConfig& rc, int joints, int frames, bool needed) {
  if (!needed || augment_kind(rc) != "diffusion") return nullptr;
  const auto path = required_path(rc, "diffusion.checkpoint", "a diffusion checkpoint for augment.kind=diffusion");
  auto model = std::make_shared<DiffusionModel>(diffusion_from_checkpoint(read_checkpoint(path)));
  const std::string src = "diffusion checkpoint " + path.string();
  check_explicit(rc, "diffusion.steps", model->schedule.steps(), src);
  check_explicit(rc, "diffusion.dct_components", model->dct_components(), src);
  if (model->joints() != joints) {
    throw CompatibilityError(src + " has J=" + std::to_string(model->joints()) + ", expected J=" +
                             std::to_string(joints));
  }
  if (model->frames != frames) {
    throw CompatibilityError(src + " models " + std::to_string(model->frames) + "-frame clips, expected " +
                             std::to_string(frames));
  }
  const auto& pc = model->predictor.config;
  record(rc, "diffusion.steps", pc.steps);
  record(rc, "diffusion.dct_components", pc.dct_components);
  record(rc, "diffusion.hidden", pc.hidden);
  record(rc, "diffusion.blocks", pc.blocks);
  record(rc, "diffusion.time_dim", pc.time_dim);
  return model;
}

int observed_frames(const RunConfig& rc, int frames) {
  const int o = rc.get<int>("augment.observed");
  if (o < 0 || o > frames)
    throw ConfigError("augment.observed=" + std::to_string(o) + " is outside [0, " + std::to_string(frames) + "]");
  return o;
}

std::unique_ptr<Augmenter> make_augmenter(const RunConfig& rc, const std::shared_ptr<const DiffusionModel>& model,
                                          int observed) {
  const auto kind = augment_kind(rc);
  if (kind == "perturb")
    return std::make_unique<PerturbationAugmenter>(rc.get<double>("augment.sigma"), observed,
                                                   rc.get<int>("augment.components"));
  if (kind == "diffusion" && model) return std::make_unique<DiffusionAugmenter>(model, observed);
  return std::make_unique<IdentityAugmenter>();
}

// Identity generations only duplicate embeddings, so they are skipped.
int effective_n_g(const RunConfig& rc, const std::string& key) {
  const int n_g = rc.get<int>(key);
  if (n_g < 0) throw ConfigError(key + " must be non-negative");
  return augment_kind(rc) == "none" ? 0 : n_g;
}

ScoreMetric parse_metric(const std::string& name) {
  if (name == "euclidean") return ScoreMetric::kEuclidean;
  if (name == "cosine") return ScoreMetric::kCosine;
  throw ConfigError("eval.metric must be euclidean or cosine, got '" + name + "'");
}

EvalConfig eval_config(const RunConfig& rc) {
  EvalConfig c;
  c.n_s = rc.get<int>("eval.n_s");
  c.n_g = effective_n_g(rc, "eval.n_g");
  c.trials = rc.get<int>("eval.trials");
  c.seed = rc.seed;
  c.metric = parse_metric(rc.get<std::string>("eval.metric"));
  c.categories = rc.get<std::vector<std::string>>("eval.categories");
  return c;
}

void check_categories(const EvalConfig& c, const DatasetManifest& m) {
  for (const auto& name : c.categories)
    if (std::find(m.categories.begin(), m.categories.end(), name) == m.categories.end())
      throw ConfigError("eval.categories names unknown category '" + name + "'");
}

void log_report(const std::string& command, const EvalReport& report, std::ostream& log) {
  for (const auto& c : report.categories) {
    if (c.skipped) {
      log << "[" << command << "] warning: skipped " << c.category << ": " << c.error << "\n";
    } else {
      log << "[" << command << "] " << c.category << " auc " << std::fixed << std::setprecision(4) << c.mean_auc
          << " +- " << c.std_auc << "\n"
          << std::defaultfloat;
    }
  }
  log << "[" << command << "] mean auc " << std::fixed << std::setprecision(4) << report.mean_auc << " mean std "
      << report.mean_std << "\n"
      << std::defaultfloat;
}

}  // namespace

void cmd_synth(RunConfig rc, std::ostream& log) {
  const int categories = rc.get<int>("synth.categories");
  const int joints = rc.get<int>("synth.joints");
  const int frames = rc.get<int>("synth.frame_length");
  const int unseen = rc.get<int>("synth.unseen");
  SyntheticCorpusSpec spec;
  const auto spec_path = rc.get<std::string>("synth.spec");
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw IoError("cannot read corpus spec " + spec_path);
    std::stringstream text;
    text << in.rdbuf();
    spec = corpus_spec_from_json(text.str());
  } else {
    spec = random_corpus_spec(categories, joints, rc.get<int>("synth.per_category"), rc.seed);
    const double phase = rc.get<double>("synth.phase_jitter");
    const double tempo = rc.get<double>("synth.tempo_jitter");
    if (phase < 0.0) throw ConfigError("synth.phase_jitter must be non-negative");
    if (tempo < 0.0 || tempo >= 1.0) throw ConfigError("synth.tempo_jitter must lie in [0, 1)");
    for (auto& c : spec.categories) {
      c.phase_jitter = phase;
      c.tempo_jitter = tempo;
    }
  }
  const int n_cat = static_cast<int>(spec.categories.size());
  if (unseen < 0 || unseen >= n_cat)
    throw ConfigError("synth.unseen must leave at least one seen category (got " + std::to_string(unseen) + ")");
  if (spec.joints != joints && rc.is_explicit("synth.joints") && !spec_path.empty())
    throw ConfigError("synth.joints disagrees with the corpus spec");

  write_resolved_config(rc);
  const auto corpus = generate_synthetic_corpus(spec, rc.seed);
  std::vector<std::string> names;
  for (const auto& c : spec.categories) names.push_back(c.name);
  const std::vector<std::string> held(names.end() - unseen, names.end());
  write_corpus(corpus, names, held, rc.get<double>("synth.test_fraction"), frames, spec.joints, rc.out);
  open_output(rc.out / "corpus_spec.json") << corpus_spec_to_json(spec) << "\n";
  log << "[synth] wrote " << corpus.size() << " samples in " << n_cat << " categories (" << unseen
      << " unseen) to " << rc.out.string() << "\n";
}

void cmd_pretrain_diffusion(RunConfig rc, std::ostream& log) {
  const Dataset ds = load_dataset(rc, log);
  const auto corpus_kind = rc.get<std::string>("diffusion.corpus");
  if (corpus_kind != "train" && corpus_kind != "all")
    throw ConfigError("diffusion.corpus must be train or all, got '" + corpus_kind + "'");
  std::vector<MotionSequence> corpus;
  for (std::size_t i = 0; i < ds.motions().size(); ++i)
    if (corpus_kind == "all" || ds.split(i) == Split::kTrain) corpus.push_back(ds.motion(i).motion);

  DiffusionTrainConfig c;
  c.steps = rc.get<int>("diffusion.steps");
  c.dct_components = rc.get<int>("diffusion.dct_components");
  c.hidden = rc.get<int>("diffusion.hidden");
  c.blocks = rc.get<int>("diffusion.blocks");
  c.time_dim = rc.get<int>("diffusion.time_dim");
  c.epochs = rc.get<int>("diffusion.epochs");
  c.batch_size = rc.get<int>("diffusion.batch_size");
  c.lr = rc.get<double>("diffusion.lr");
  c.threads = rc.get<int>("diffusion.threads");
  c.validation_size = rc.get<int>("diffusion.validation_size");
  c.seed = rc.seed;
  if (c.dct_components < 1 || c.dct_components > ds.manifest().frame_length)
    throw ConfigError("diffusion.dct_components must lie in [1, frame_length]");
  write_resolved_config(rc);
  log << "[pretrain-diffusion] " << corpus.size() << " clips, " << c.epochs << " epochs, T=" << c.steps
      << ", M=" << c.dct_components << "\n";

  const auto result = train_diffusion(corpus, c);
  write_checkpoint(rc.out / "diffusion.ckpt",
                   diffusion_to_checkpoint(result.model, {{"seed", rc.seed}, {"corpus", corpus_kind},
                                                          {"epochs", c.epochs}}));
  auto csv = open_output(rc.out / "diffusion_loss.csv");
  csv << "epoch,loss\n" << std::setprecision(17);
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) csv << e + 1 << ',' << result.epoch_loss[e] << '\n';
  open_output(rc.out / "diffusion_summary.json")
      << json{{"initial_validation_loss", result.initial_validation_loss},
              {"final_validation_loss", result.final_validation_loss},
              {"first_epoch_loss", result.epoch_loss.front()},
              {"last_epoch_loss", result.epoch_loss.back()}}
             .dump(2)
      << "\n";
  log << "[pretrain-diffusion] loss " << result.epoch_loss.front() << " -> " << result.epoch_loss.back()
      << ", validation " << result.initial_validation_loss << " -> " << result.final_validation_loss << "\n";
}

void cmd_train(RunConfig rc, std::ostream& log) {
  const Dataset ds = load_dataset(rc, log);
  const auto& m = ds.manifest();
  EncoderConfig ec;
  ec.blocks = rc.get<int>("encoder.blocks");
  ec.layers_per_block = rc.get<int>("encoder.layers_per_block");
  ec.hidden_dim = rc.get<int>("encoder.hidden_dim");
  ec.dct_components = rc.get<int>("encoder.dct_components");
  ec.joints = m.joints;
  ec.validate();
  if (ec.dct_components > m.frame_length) throw ConfigError("encoder.dct_components exceeds the frame length");

  TrainConfig tc;
  tc.epochs = rc.get<int>("train.epochs");
  tc.lr_start = rc.get<double>("train.lr_start");
  tc.lr_end = rc.get<double>("train.lr_end");
  tc.temperature = rc.get<double>("train.temperature");
  tc.n_g = effective_n_g(rc, "train.n_g");
  tc.steps_per_epoch = rc.get<int>("train.steps_per_epoch");
  tc.cache_augmentations = rc.get<bool>("train.cache_augmentations");
  tc.seed = rc.seed;
  tc.validate();

  const int observed = observed_frames(rc, m.frame_length);
  const auto model = load_diffusion(rc, m.joints, m.frame_length, tc.n_g > 0);
  const auto augmenter = make_augmenter(rc, model, observed);
  write_resolved_config(rc);
  const auto n_seen = m.train_categories().size();
  log << "[train] " << n_seen << " seen categories, augment=" << augmenter->name() << ", n_g=" << tc.n_g
      << ", batch L=" << 2 * n_seen * static_cast<std::size_t>(1 + tc.n_g) << ", epochs=" << tc.epochs << "\n";

  const auto result = train(ds, ec, *augmenter, tc, [&](const TrainLogEntry& e, const EncoderParams&) {
    if (e.epoch == 1 || e.epoch % 10 == 0 || e.epoch == tc.epochs)
      log << "[train] epoch " << e.epoch << " lr " << e.lr << " loss " << e.loss << "\n";
  });
  const json extra = {{"frame_length", m.frame_length},
                      {"center_root", m.center_root},
                      {"run_seed", rc.seed},
                      {"batch_size", 2 * n_seen * static_cast<std::size_t>(1 + tc.n_g)},
                      {"augment", {{"kind", augmenter->name()}, {"n_g", tc.n_g}, {"observed", observed}}},
                      {"train", rc.values.at("train")}};
  write_checkpoint(rc.out / "encoder.ckpt", encoder_to_checkpoint(result.params, extra));
  auto csv = open_output(rc.out / "train_log.csv");
  write_train_log_csv(csv, result.log);
}

void cmd_eval(RunConfig rc, std::ostream& log) {
  const auto enc = load_encoder(rc);
  const Dataset ds = load_dataset(rc, log);
  check_encoder_data(enc, ds.manifest());
  const EvalConfig ec = eval_config(rc);
  check_categories(ec, ds.manifest());
  const int observed = observed_frames(rc, enc.frame_length);
  const auto model = load_diffusion(rc, enc.params.config.joints, enc.frame_length, ec.n_g > 0);
  const auto augmenter = make_augmenter(rc, model, observed);
  write_resolved_config(rc);

  const auto report = evaluate(ds, enc.params, *augmenter, ec);
  log_report("eval", report, log);
  auto csv = open_output(rc.out / "eval.csv");
  write_eval_csv(csv, report);
  open_output(rc.out / "eval_summary.json") << eval_summary_json(report).dump(2) << "\n";
}

void cmd_score(RunConfig rc, std::ostream& out, std::ostream& log) {
  const auto enc = load_encoder(rc);
  const int joints = enc.params.config.joints;
  const auto support_dir = required_path(rc, "score.support_dir", "a support directory");
  const auto input = required_path(rc, "score.input", "an input motion file");
  if (!fs::is_directory(support_dir)) throw IoError("support directory " + support_dir.string() + " does not exist");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(support_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".bin") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ContractError("support directory " + support_dir.string() + " holds no .bin motions");

  const PreprocessOptions prep{enc.frame_length, enc.center_root};
  SupportSet support;
  support.category = rc.get<std::string>("score.category");
  if (support.category.empty()) support.category = support_dir.filename().string();
  if (support.category.empty()) support.category = support_dir.parent_path().filename().string();
  for (const auto& f : files) {
    support.members.push_back(preprocess(read_motion_file(f, joints), prep));
    support.member_ids.push_back(f.stem().string());
  }
  const auto test = preprocess(read_motion_file(input, joints), prep);

  const int n_g = effective_n_g(rc, "eval.n_g");
  const int observed = observed_frames(rc, enc.frame_length);
  const auto model = load_diffusion(rc, joints, enc.frame_length, n_g > 0);
  const auto augmenter = make_augmenter(rc, model, observed);
  const DctBasis basis(enc.params.config.dct_components, enc.frame_length);
  write_resolved_config(rc);
  const auto a = score(enc.params, basis, support, *augmenter, n_g, test, rc.seed, input.stem().string(),
                       parse_metric(rc.get<std::string>("eval.metric")));
  out << std::setprecision(17) << a.value << "\n";
  log << "[score] " << a.sample_id << " vs " << support.members.size() << " support motions of '"
      << a.support_category << "' (n_g=" << n_g << ")\n";
  open_output(rc.out / "score.json") << json{{"score", a.value},
                                             {"sample_id", a.sample_id},
                                             {"support_category", a.support_category},
                                             {"support_ids", support.member_ids},
                                             {"n_g", n_g}}
                                            .dump(2)
                                     << "\n";
}

void cmd_sweep(RunConfig rc, std::ostream& log) {
  const auto enc = load_encoder(rc);
  const Dataset ds = load_dataset(rc, log);
  check_encoder_data(enc, ds.manifest());
  const EvalConfig base = eval_config(rc);
  check_categories(base, ds.manifest());
  const int frames = enc.frame_length;

  std::vector<std::pair<int, int>> op;
  for (int o : rc.get<std::vector<int>>("sweep.observed")) op.emplace_back(o, frames - o);
  auto n_g_axis = rc.get<std::vector<int>>("sweep.n_g");
  if (augment_kind(rc) == "none") n_g_axis = {0};
  const auto grid = sweep_grid(rc.get<std::vector<int>>("sweep.n_s"), n_g_axis, op);
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  for (const auto& p : grid) {
    if (p.observed < 0 || p.predicted < 0)
      throw ConfigError("sweep.observed value " + std::to_string(p.observed) + " exceeds the frame length " +
                        std::to_string(frames));
    if (p.n_g < 0) throw ConfigError("sweep.n_g values must be non-negative");
  }
  const bool any_generation = std::any_of(grid.begin(), grid.end(), [](const SweepPoint& p) { return p.n_g > 0; });
  const auto model = load_diffusion(rc, enc.params.config.joints, frames, any_generation);
  const AugmenterFactory factory = [&](int observed) { return make_augmenter(rc, model, observed); };
  write_resolved_config(rc);

  const auto rows = sweep(ds, enc.params, factory, grid, base);
  for (const auto& r : rows) {
    log << "[sweep] n_s=" << r.point.n_s << " n_g=" << r.point.n_g << " O=" << r.point.observed
        << " P=" << r.point.predicted << " mean auc " << r.report.mean_auc << " mean std " << r.report.mean_std
        << "\n";
  }
  auto csv = open_output(rc.out / "sweep.csv");
  write_sweep_csv(csv, rows);
}

void cmd_export_embeddings(RunConfig rc, std::ostream& log) {
  const auto enc = load_encoder(rc);
  const Dataset ds = load_dataset(rc, log);
  check_encoder_data(enc, ds.manifest());
  const auto split = rc.get<std::string>("export.split");
  if (split != "test" && split != "all") throw ConfigError("export.split must be test or all");
  std::vector<LabeledMotion> samples;
  for (std::size_t i = 0; i < ds.motions().size(); ++i)
    if (split == "all" || ds.split(i) == Split::kTest) samples.push_back(ds.motion(i));
  const DctBasis basis(enc.params.config.dct_components, enc.frame_length);
  write_resolved_config(rc);
  const auto table = export_embeddings(enc.params, basis, samples);
  auto csv = open_output(rc.out / "embeddings.csv");
  write_embeddings_csv(csv, table);
  log << "[export-embeddings] wrote " << table.values.rows() << " embeddings of length " << table.values.cols()
      << "\n";
}

// ---- argument parsing ----

namespace {

using FlagMap = std::map<std::string, json>;

template <typename T>
CLI::Option* flag_option(CLI::App* sub, const std::string& name, const std::string& key, FlagMap& flags,
                  const std::string& help) {
  return sub->add_option_function<T>(name, [&flags, key](const T& v) { flags[key] = v; }, help + " [" + key + "]");
}

CLI::Option* bind_path(CLI::App* sub, const std::string& name, const std::string& key, FlagMap& flags,
                       const std::string& help) {
  return sub->add_option_function<std::string>(
      name, [&flags, key](const std::string& v) { flags[key] = fs::absolute(v).lexically_normal().string(); },
      help + " [" + key + "]");
}

void bind_augment(CLI::App* sub, FlagMap& flags) {
  flag_option<std::string>(sub, "--aug", "augment.kind", flags, "augmenter: diffusion, perturb or none");
  flag_option<int>(sub, "--observed", "augment.observed", flags, "observed frames O; the rest are completed");
  flag_option<double>(sub, "--sigma", "augment.sigma", flags, "perturbation jitter scale");
  bind_path(sub, "--diffusion", "diffusion.checkpoint", flags, "diffusion checkpoint");
}

void apply_set(const std::string& assignment, FlagMap& flags) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const auto key = assignment.substr(0, eq);
  const auto text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;  // bare strings
  }
  flags[key] = value;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Few-shot human action anomaly detection with contrastive motion embeddings.", "haad"};
  app.require_subcommand(1);
  app.fallthrough();

  ConfigSources src;
  FlagMap flags;
  std::vector<std::string> sets;
  std::string config_file, out_dir;
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "global random seed");
  app.add_option("--config", config_file, "JSON config file (defaults < file < flags)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", sets, "override any key, e.g. --set train.epochs=20");

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus and manifest");
  flag_option<int>(synth, "--categories", "synth.categories", flags, "number of categories");
  flag_option<int>(synth, "--per-category", "synth.per_category", flags, "samples per category");
  flag_option<int>(synth, "--joints", "synth.joints", flags, "joints per skeleton");
  flag_option<int>(synth, "--unseen", "synth.unseen", flags, "trailing categories held out of training");
  flag_option<double>(synth, "--test-fraction", "synth.test_fraction", flags, "share of each seen category kept for test");
  flag_option<int>(synth, "--frame-length", "synth.frame_length", flags, "clip length after preprocessing");
  flag_option<double>(synth, "--phase-jitter", "synth.phase_jitter", flags, "per-sample phase shift range (radians)");
  flag_option<double>(synth, "--tempo-jitter", "synth.tempo_jitter", flags, "relative tempo change after a random onset");
  bind_path(synth, "--spec", "synth.spec", flags, "corpus spec JSON instead of a random one");

  auto* pre = app.add_subcommand("pretrain-diffusion", "train the frequency-domain completion model");
  bind_path(pre, "--manifest", "data.manifest", flags, "dataset manifest");
  flag_option<int>(pre, "--steps", "diffusion.steps", flags, "diffusion steps");
  flag_option<int>(pre, "--dct", "diffusion.dct_components", flags, "DCT components");
  flag_option<int>(pre, "--epochs", "diffusion.epochs", flags, "training epochs");
  flag_option<int>(pre, "--hidden", "diffusion.hidden", flags, "predictor width");
  flag_option<int>(pre, "--batch-size", "diffusion.batch_size", flags, "batch size");
  flag_option<double>(pre, "--lr", "diffusion.lr", flags, "Adam learning rate");
  flag_option<int>(pre, "--threads", "diffusion.threads", flags, "gradient threads");
  flag_option<std::string>(pre, "--corpus", "diffusion.corpus", flags, "train or all");

  auto* tr = app.add_subcommand("train", "train the motion encoder");
  bind_path(tr, "--manifest", "data.manifest", flags, "dataset manifest");
  flag_option<int>(tr, "--ng", "train.n_g", flags, "generations per real sample");
  flag_option<int>(tr, "--epochs", "train.epochs", flags, "training epochs");
  flag_option<double>(tr, "--lr-start", "train.lr_start", flags, "initial learning rate");
  flag_option<double>(tr, "--lr-end", "train.lr_end", flags, "final learning rate");
  flag_option<double>(tr, "--temperature", "train.temperature", flags, "contrastive temperature");
  flag_option<int>(tr, "--steps-per-epoch", "train.steps_per_epoch", flags, "minibatches per epoch");
  tr->add_flag_function("--cache", [&flags](std::int64_t) { flags["train.cache_augmentations"] = true; },
                        "reuse generations across epochs [train.cache_augmentations]");
  flag_option<int>(tr, "--hidden", "encoder.hidden_dim", flags, "encoder width");
  flag_option<int>(tr, "--blocks", "encoder.blocks", flags, "residual blocks");
  flag_option<int>(tr, "--dct", "encoder.dct_components", flags, "DCT components");
  bind_augment(tr, flags);

  auto* ev = app.add_subcommand("eval", "few-shot AUC evaluation over trials");
  bind_path(ev, "--manifest", "data.manifest", flags, "dataset manifest");
  bind_path(ev, "--encoder", "encoder.checkpoint", flags, "encoder checkpoint");
  flag_option<int>(ev, "--support", "eval.n_s", flags, "support set size");
  flag_option<int>(ev, "--ng", "eval.n_g", flags, "generations per support member");
  flag_option<int>(ev, "--trials", "eval.trials", flags, "trials");
  flag_option<std::string>(ev, "--metric", "eval.metric", flags, "euclidean or cosine");
  flag_option<std::vector<std::string>>(ev, "--category", "eval.categories", flags, "restrict to categories")
      ->delimiter(',');
  bind_augment(ev, flags);

  auto* sc = app.add_subcommand("score", "score one motion against a support directory");
  bind_path(sc, "--encoder", "encoder.checkpoint", flags, "encoder checkpoint");
  bind_path(sc, "--support-dir", "score.support_dir", flags, "directory of .bin support motions");
  bind_path(sc, "--input", "score.input", flags, "motion file to score");
  flag_option<std::string>(sc, "--category", "score.category", flags, "support category label");
  flag_option<int>(sc, "--ng", "eval.n_g", flags, "generations per support member");
  flag_option<std::string>(sc, "--metric", "eval.metric", flags, "euclidean or cosine");
  bind_augment(sc, flags);

  auto* sw = app.add_subcommand("sweep", "evaluate over a grid of support sizes, generations and splits");
  bind_path(sw, "--manifest", "data.manifest", flags, "dataset manifest");
  bind_path(sw, "--encoder", "encoder.checkpoint", flags, "encoder checkpoint");
  flag_option<std::vector<int>>(sw, "--support", "sweep.n_s", flags, "support sizes, comma separated")->delimiter(',');
  flag_option<std::vector<int>>(sw, "--ng", "sweep.n_g", flags, "generation counts, comma separated")->delimiter(',');
  flag_option<std::vector<int>>(sw, "--observed-list", "sweep.observed", flags, "observed lengths, comma separated")
      ->delimiter(',');
  flag_option<int>(sw, "--trials", "eval.trials", flags, "trials per point");
  flag_option<std::string>(sw, "--aug", "augment.kind", flags, "augmenter: diffusion, perturb or none");
  flag_option<double>(sw, "--sigma", "augment.sigma", flags, "perturbation jitter scale");
  bind_path(sw, "--diffusion", "diffusion.checkpoint", flags, "diffusion checkpoint");

  auto* ex = app.add_subcommand("export-embeddings", "write per-sample embeddings as CSV");
  bind_path(ex, "--manifest", "data.manifest", flags, "dataset manifest");
  bind_path(ex, "--encoder", "encoder.checkpoint", flags, "encoder checkpoint");
  flag_option<std::string>(ex, "--split", "export.split", flags, "test or all");

  std::vector<std::string> argv_store{"haad"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    for (const auto& s : sets) apply_set(s, flags);
    src.command = command;
    src.config_file = config_file;
    src.flags = flags;
    src.seed_given = app.count("--seed") > 0;
    src.seed = seed;
    src.out_given = app.count("--out") > 0;
    src.out = out_dir;
    const RunConfig rc = resolve_config(src);

    if (command == "synth") cmd_synth(rc, err);
    else if (command == "pretrain-diffusion") cmd_pretrain_diffusion(rc, err);
    else if (command == "train") cmd_train(rc, err);
    else if (command == "eval") cmd_eval(rc, err);
    else if (command == "score") cmd_score(rc, out, err);
    else if (command == "sweep") cmd_sweep(rc, err);
    else if (command == "export-embeddings") cmd_export_embeddings(rc, err);
    return kOk;
  } catch (const ConfigError& e) {
    err << "haad " << command << ": config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ParseError& e) {
    err << "haad " << command << ": parse error: " << e.what() << "\n";
    return kParse;
  } catch (const IoError& e) {
    err << "haad " << command << ": io error: " << e.what() << "\n";
    return kIo;
  } catch (const CompatibilityError& e) {
    err << "haad " << command << ": compatibility error: " << e.what() << "\n";
    return kCompatibility;
  } catch (const ContractError& e) {
    err << "haad " << command << ": contract error: " << e.what() << "\n";
    return kContract;
  } catch (const DivergenceError& e) {
    err << "haad " << command << ": divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const ArgumentError& e) {
    err << "haad " << command << ": invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "haad " << command << ": error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace haad::cli
