#include "haad/motion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "haad/errors.hpp"
#include "haad/random.hpp"

namespace haad {

namespace fs = std::filesystem;
using json = nlohmann::json;

MotionSequence::MotionSequence(Eigen::MatrixXd frames, int joint_count)
    : frames_(std::move(frames)), joint_count_(joint_count) {
  if (joint_count_ <= 0) throw ArgumentError("motion joint count must be positive");
  if (frames_.rows() <= 0) throw ArgumentError("motion must have at least one frame");
  if (frames_.cols() != 3 * joint_count_) {
    throw ArgumentError("motion has " + std::to_string(frames_.cols()) + " columns, expected 3*" +
                        std::to_string(joint_count_));
  }
  if (!frames_.allFinite()) throw ArgumentError("motion contains non-finite coordinates");
}

std::string to_string(Split split) { return split == Split::kTrain ? "train" : "test"; }

std::string to_string(CategorySplit split) {
  return split == CategorySplit::kTrain ? "train" : "unseen-test";
}

std::vector<std::string> DatasetManifest::train_categories() const {
  std::vector<std::string> out;
  for (const auto& c : categories)
    if (category_split.at(c) == CategorySplit::kTrain) out.push_back(c);
  return out;
}

std::vector<std::string> DatasetManifest::unseen_categories() const {
  std::vector<std::string> out;
  for (const auto& c : categories)
    if (category_split.at(c) == CategorySplit::kUnseenTest) out.push_back(c);
  return out;
}

namespace {

void derive_category_splits(DatasetManifest& m) {
  m.category_split.clear();
  for (const auto& c : m.categories) m.category_split[c] = CategorySplit::kUnseenTest;
  for (const auto& s : m.samples)
    if (s.split == Split::kTrain) m.category_split[s.category] = CategorySplit::kTrain;
}

template <typename T>
T required(const json& node, const std::string& key, const std::string& where) {
  if (!node.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; translate it to a line number.
    std::ifstream again(path);
    std::string text((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
    auto upto = std::min<std::size_t>(e.byte, text.size());
    auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
  const std::string where = path.string();
  if (!doc.is_object()) throw ParseError(where + ": manifest must be a JSON object");

  DatasetManifest m;
  m.categories = required<std::vector<std::string>>(doc, "categories", where);
  m.frame_length = required<int>(doc, "frame_length", where);
  m.joints = required<int>(doc, "joints", where);
  if (doc.contains("center_root")) m.center_root = required<bool>(doc, "center_root", where);
  if (m.frame_length <= 0) throw ParseError(where + ": field 'frame_length' must be positive");
  if (m.joints <= 0) throw ParseError(where + ": field 'joints' must be positive");
  std::set<std::string> known(m.categories.begin(), m.categories.end());
  if (known.size() != m.categories.size())
    throw ParseError(where + ": field 'categories' contains duplicates");

  const auto samples = required<json>(doc, "samples", where);
  if (!samples.is_array()) throw ParseError(where + ": field 'samples' must be an array");
  if (samples.empty()) throw ParseError("manifest contains no samples");

  const fs::path base = path.parent_path();
  std::set<std::string> ids;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string at = where + ": samples[" + std::to_string(i) + "]";
    SampleEntry e;
    e.id = required<std::string>(samples[i], "id", at);
    e.category = required<std::string>(samples[i], "category", at);
    const auto split = required<std::string>(samples[i], "split", at);
    const auto file = required<std::string>(samples[i], "file", at);
    if (!known.count(e.category))
      throw ParseError(at + ": field 'category' names undeclared category '" + e.category + "'");
    if (split == "train") {
      e.split = Split::kTrain;
    } else if (split == "test") {
      e.split = Split::kTest;
    } else {
      throw ParseError(at + ": field 'split' must be 'train' or 'test', got '" + split + "'");
    }
    if (!ids.insert(e.id).second) throw ParseError(at + ": duplicate sample id '" + e.id + "'");
    e.file = fs::path(file).is_absolute() ? fs::path(file) : base / file;
    if (!fs::exists(e.file)) throw IoError("missing data file " + e.file.string());
    m.samples.push_back(std::move(e));
  }
  derive_category_splits(m);
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  json doc;
  doc["categories"] = manifest.categories;
  doc["frame_length"] = manifest.frame_length;
  doc["joints"] = manifest.joints;
  doc["center_root"] = manifest.center_root;
  doc["samples"] = json::array();
  const fs::path base = path.parent_path();
  for (const auto& s : manifest.samples) {
    fs::path file = s.file;
    if (!base.empty() && file.is_absolute()) {
      auto rel = file.lexically_relative(fs::absolute(base));
      if (!rel.empty()) file = rel;
    }
    doc["samples"].push_back(
        {{"id", s.id}, {"category", s.category}, {"split", to_string(s.split)}, {"file", file.generic_string()}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed writing manifest " + path.string());
}

namespace {

float from_little_endian(float v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    bits = __builtin_bswap32(bits);
    std::memcpy(&v, &bits, 4);
  }
  return v;
}

}  // namespace

MotionSequence read_motion_file(const fs::path& path, int joints) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open sample file " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t row_bytes = sizeof(float) * 3 * static_cast<std::size_t>(joints);
  if (bytes.empty() || bytes.size() % row_bytes != 0) {
    throw ParseError(path.string() + ": size " + std::to_string(bytes.size()) +
                     " bytes is not a positive multiple of 3*" + std::to_string(joints) + " f32 values");
  }
  const auto rows = static_cast<Eigen::Index>(bytes.size() / row_bytes);
  Eigen::MatrixXd frames(rows, 3 * joints);
  const char* p = bytes.data();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < 3 * joints; ++c, p += sizeof(float)) {
      float v;
      std::memcpy(&v, p, sizeof(float));
      frames(r, c) = from_little_endian(v);
    }
  }
  try {
    return MotionSequence(std::move(frames), joints);
  } catch (const ArgumentError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_motion_file(const MotionSequence& motion, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write sample file " + path.string());
  const auto& f = motion.frames();
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      const float v = from_little_endian(static_cast<float>(f(r, c)));
      out.write(reinterpret_cast<const char*>(&v), sizeof(float));
    }
  }
  if (!out) throw IoError("failed writing sample file " + path.string());
}

MotionSequence preprocess(const MotionSequence& motion, const PreprocessOptions& options) {
  if (options.target_len <= 0) throw ArgumentError("preprocess target length must be positive");
  const auto& src = motion.frames();
  const Eigen::Index h = options.target_len;
  const Eigen::Index keep = std::min<Eigen::Index>(h, src.rows());
  Eigen::MatrixXd out(h, src.cols());
  out.topRows(keep) = src.topRows(keep);
  for (Eigen::Index r = keep; r < h; ++r) out.row(r) = src.row(src.rows() - 1);
  if (options.center_root) {
    const Eigen::RowVector3d root = out.row(0).head<3>();
    for (Eigen::Index j = 0; j < out.cols(); j += 3) out.middleCols(j, 3).rowwise() -= root;
  }
  return MotionSequence(std::move(out), motion.joint_count());
}

Dataset::Dataset(DatasetManifest manifest) : manifest_(std::move(manifest)) {
  const PreprocessOptions opts{manifest_.frame_length, manifest_.center_root};
  motions_.reserve(manifest_.samples.size());
  for (const auto& s : manifest_.samples) {
    auto raw = read_motion_file(s.file, manifest_.joints);
    motions_.push_back({preprocess(raw, opts), s.category, s.id});
  }
}

Dataset::Dataset(DatasetManifest manifest, std::vector<LabeledMotion> motions)
    : manifest_(std::move(manifest)), motions_(std::move(motions)) {
  if (motions_.size() != manifest_.samples.size())
    throw ArgumentError("dataset motion count does not match manifest sample count");
  for (std::size_t i = 0; i < motions_.size(); ++i) {
    if (motions_[i].sample_id != manifest_.samples[i].id)
      throw ArgumentError("dataset motion order does not match manifest at " + motions_[i].sample_id);
    if (motions_[i].motion.frame_count() != manifest_.frame_length ||
        motions_[i].motion.joint_count() != manifest_.joints)
      throw ArgumentError("dataset motion " + motions_[i].sample_id + " has the wrong shape");
  }
}

std::vector<std::size_t> Dataset::train_pool(const std::string& category) const {
  std::vector<std::size_t> out;
  if (manifest_.category_split.at(category) != CategorySplit::kTrain) return out;
  for (std::size_t i = 0; i < motions_.size(); ++i)
    if (motions_[i].category == category && split(i) == Split::kTrain) out.push_back(i);
  return out;
}

std::vector<std::size_t> Dataset::test_pool(const std::string& category) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < motions_.size(); ++i)
    if (motions_[i].category == category && split(i) == Split::kTest) out.push_back(i);
  return out;
}

std::vector<std::size_t> Dataset::test_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < motions_.size(); ++i)
    if (split(i) == Split::kTest) out.push_back(i);
  return out;
}

SupportSet sample_support_set(const Dataset& dataset, const std::string& category, int n_s,
                              std::uint64_t seed) {
  if (n_s <= 0) throw ArgumentError("support set size must be positive");
  auto pool = dataset.test_pool(category);
  if (static_cast<std::size_t>(n_s) > pool.size()) {
    throw ContractError("support set of " + std::to_string(n_s) + " exceeds the " +
                        std::to_string(pool.size()) + " test samples of category '" + category + "'");
  }
  Rng rng(seed);
  // Partial Fisher-Yates: the first n_s slots become a uniform draw without replacement.
  for (int i = 0; i < n_s; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
  }
  SupportSet out;
  out.category = category;
  for (int i = 0; i < n_s; ++i) {
    const auto& m = dataset.motion(pool[static_cast<std::size_t>(i)]);
    out.members.push_back(m.motion);
    out.member_ids.push_back(m.sample_id);
  }
  return out;
}

// ---- synthetic corpus ----

SyntheticCorpusSpec random_corpus_spec(int categories, int joints, int samples_per_category,
                                       std::uint64_t seed) {
  if (categories < 2) throw ConfigError("synthetic corpus needs at least 2 categories");
  if (joints <= 0) throw ConfigError("synthetic corpus needs a positive joint count");
  Rng rng(derive_seed(seed, {0x5eed}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SyntheticCorpusSpec spec;
  spec.joints = joints;
  spec.min_frames = 50;
  spec.max_frames = 90;
  spec.samples_per_category = samples_per_category;
  spec.translation_jitter = 0.5;
  const int cols = 3 * joints;
  spec.rest_pose = uniform(cols, 1, 0.8, rng);
  for (int c = 0; c < categories; ++c) {
    SyntheticCategory cat;
    cat.name = "action" + std::to_string(c);
    // Each category moves a random subset of joints at its own base tempo.
    const double tempo = 0.01 + 0.04 * unit(rng);
    cat.frequency.resize(cols);
    cat.amplitude.resize(cols);
    cat.phase.resize(cols);
    for (int j = 0; j < joints; ++j) {
      const bool active = unit(rng) < 0.5;
      for (int k = 0; k < 3; ++k) {
        const int col = 3 * j + k;
        cat.frequency(col) = tempo * (0.8 + 0.4 * unit(rng));
        cat.amplitude(col) = active ? 0.05 + 0.25 * unit(rng) : 0.02 * unit(rng);
        cat.phase(col) = 2.0 * std::numbers::pi * unit(rng);
      }
    }
    cat.amplitude_jitter = 0.2;
    cat.phase_jitter = std::numbers::pi;
    cat.noise = 0.01;
    spec.categories.push_back(std::move(cat));
  }
  return spec;
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_json_vec(const json& node, const std::string& key, int expected,
                              const std::string& where) {
  auto values = required<std::vector<double>>(node, key, where);
  if (static_cast<int>(values.size()) != expected) {
    throw ConfigError(where + ": field '" + key + "' has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(expected));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), expected);
}

}  // namespace

SyntheticCorpusSpec corpus_spec_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("corpus spec: ") + e.what());
  }
  SyntheticCorpusSpec spec;
  const std::string where = "corpus spec";
  spec.joints = required<int>(doc, "joints", where);
  spec.min_frames = doc.value("min_frames", 60);
  spec.max_frames = doc.value("max_frames", spec.min_frames);
  spec.samples_per_category = doc.value("samples_per_category", 20);
  spec.translation_jitter = doc.value("translation_jitter", 0.0);
  spec.tempo_onset_min = doc.value("tempo_onset_min", 20);
  spec.tempo_onset_max = doc.value("tempo_onset_max", 40);
  if (spec.tempo_onset_min < 0 || spec.tempo_onset_max < spec.tempo_onset_min)
    throw ConfigError("corpus spec: need 0 <= tempo_onset_min <= tempo_onset_max");
  if (spec.joints <= 0) throw ConfigError("corpus spec: joints must be positive");
  if (spec.min_frames <= 0 || spec.max_frames < spec.min_frames)
    throw ConfigError("corpus spec: need 0 < min_frames <= max_frames");
  const int cols = 3 * spec.joints;
  spec.rest_pose = doc.contains("rest_pose") ? from_json_vec(doc, "rest_pose", cols, where)
                                             : Eigen::VectorXd::Zero(cols);
  for (const auto& node : required<json>(doc, "categories", where)) {
    SyntheticCategory cat;
    cat.name = required<std::string>(node, "name", where);
    const auto at = where + " category '" + cat.name + "'";
    cat.frequency = from_json_vec(node, "frequency", cols, at);
    cat.amplitude = from_json_vec(node, "amplitude", cols, at);
    cat.phase = from_json_vec(node, "phase", cols, at);
    cat.amplitude_jitter = node.value("amplitude_jitter", 0.0);
    cat.phase_jitter = node.value("phase_jitter", 0.0);
    cat.tempo_jitter = node.value("tempo_jitter", 0.0);
    if (cat.tempo_jitter < 0.0 || cat.tempo_jitter >= 1.0) throw ConfigError(at + ": tempo_jitter must lie in [0, 1)");
    cat.noise = node.value("noise", 0.0);
    spec.categories.push_back(std::move(cat));
  }
  if (spec.categories.size() < 2) throw ConfigError("synthetic corpus needs at least 2 categories");
  return spec;
}

std::string corpus_spec_to_json(const SyntheticCorpusSpec& spec) {
  json doc;
  doc["joints"] = spec.joints;
  doc["min_frames"] = spec.min_frames;
  doc["max_frames"] = spec.max_frames;
  doc["samples_per_category"] = spec.samples_per_category;
  doc["translation_jitter"] = spec.translation_jitter;
  doc["tempo_onset_min"] = spec.tempo_onset_min;
  doc["tempo_onset_max"] = spec.tempo_onset_max;
  if (spec.rest_pose.size() > 0) doc["rest_pose"] = to_vec(spec.rest_pose);
  doc["categories"] = json::array();
  for (const auto& c : spec.categories) {
    doc["categories"].push_back({{"name", c.name},
                                 {"frequency", to_vec(c.frequency)},
                                 {"amplitude", to_vec(c.amplitude)},
                                 {"phase", to_vec(c.phase)},
                                 {"amplitude_jitter", c.amplitude_jitter},
                                 {"phase_jitter", c.phase_jitter},
                                 {"tempo_jitter", c.tempo_jitter},
                                 {"noise", c.noise}});
  }
  return doc.dump(2);
}

std::vector<LabeledMotion> generate_synthetic_corpus(const SyntheticCorpusSpec& spec,
                                                     std::uint64_t seed) {
  if (spec.categories.size() < 2) throw ConfigError("synthetic corpus needs at least 2 categories");
  if (spec.joints <= 0 || spec.min_frames <= 0 || spec.max_frames < spec.min_frames)
    throw ConfigError("synthetic corpus spec has invalid shape parameters");
  const int cols = 3 * spec.joints;
  const Eigen::VectorXd rest =
      spec.rest_pose.size() == cols ? spec.rest_pose : Eigen::VectorXd::Zero(cols);

  std::vector<LabeledMotion> out;
  for (std::size_t c = 0; c < spec.categories.size(); ++c) {
    const auto& cat = spec.categories[c];
    if (cat.frequency.size() != cols || cat.amplitude.size() != cols || cat.phase.size() != cols)
      throw ConfigError("category '" + cat.name + "' parameter vectors must have length 3J");
    for (int s = 0; s < spec.samples_per_category; ++s) {
      Rng rng(derive_seed(seed, {c, static_cast<std::uint64_t>(s)}));
      std::uniform_real_distribution<double> sym(-1.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::uniform_int_distribution<int> length(spec.min_frames, spec.max_frames);
      const int frames = length(rng);
      const double scale = 1.0 + cat.amplitude_jitter * sym(rng);
      const double shift = cat.phase_jitter * sym(rng);
      Eigen::RowVector3d offset;
      for (int k = 0; k < 3; ++k) offset(k) = spec.translation_jitter * sym(rng);
      // Warped time: unit rate up to the onset, then `rate`; drawn only when enabled so that
      // corpora without tempo changes keep their random streams.
      int onset = frames;
      double rate = 1.0;
      if (cat.tempo_jitter > 0.0) {
        onset = std::uniform_int_distribution<int>(spec.tempo_onset_min, spec.tempo_onset_max)(rng);
        rate = 1.0 + cat.tempo_jitter * sym(rng);
      }

      Eigen::MatrixXd x(frames, cols);
      for (int h = 0; h < frames; ++h) {
        const double time = h <= onset ? h : onset + rate * (h - onset);
        for (int col = 0; col < cols; ++col) {
          const double arg = 2.0 * std::numbers::pi * cat.frequency(col) * time + cat.phase(col) + shift;
          double v = rest(col) + offset(col % 3) + scale * cat.amplitude(col) * std::sin(arg);
          if (cat.noise > 0.0) v += cat.noise * gauss(rng);
          x(h, col) = v;
        }
      }
      char id[64];
      std::snprintf(id, sizeof(id), "%s_%04d", cat.name.c_str(), s);
      out.push_back({MotionSequence(std::move(x), spec.joints), cat.name, id});
    }
  }
  return out;
}

namespace {

DatasetManifest corpus_manifest(const std::vector<LabeledMotion>& corpus,
                                const std::vector<std::string>& categories,
                                const std::vector<std::string>& unseen, double test_fraction,
                                int frame_length, int joints) {
  if (test_fraction <= 0.0 || test_fraction > 1.0)
    throw ConfigError("test fraction must lie in (0, 1]");
  const std::set<std::string> unseen_set(unseen.begin(), unseen.end());
  for (const auto& u : unseen)
    if (std::find(categories.begin(), categories.end(), u) == categories.end())
      throw ConfigError("unseen category '" + u + "' is not a corpus category");
  DatasetManifest m;
  m.categories = categories;
  m.frame_length = frame_length;
  m.joints = joints;
  std::map<std::string, int> total, seen;
  for (const auto& s : corpus) ++total[s.category];
  for (const auto& s : corpus) {
    SampleEntry e;
    e.id = s.sample_id;
    e.category = s.category;
    // Within a seen category the leading samples train and the trailing share is held out.
    const int n = total[s.category];
    const int n_test = std::max(1, static_cast<int>(std::lround(test_fraction * n)));
    const int k = seen[s.category]++;
    e.split = (unseen_set.count(s.category) || k >= n - n_test) ? Split::kTest : Split::kTrain;
    m.samples.push_back(std::move(e));
  }
  derive_category_splits(m);
  return m;
}

}  // namespace

DatasetManifest write_corpus(const std::vector<LabeledMotion>& corpus,
                             const std::vector<std::string>& categories,
                             const std::vector<std::string>& unseen, double test_fraction,
                             int frame_length, int joints, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "samples", ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto m = corpus_manifest(corpus, categories, unseen, test_fraction, frame_length, joints);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    m.samples[i].file = fs::absolute(dir / "samples" / (corpus[i].sample_id + ".bin"));
    write_motion_file(corpus[i].motion, m.samples[i].file);
  }
  save_manifest(m, dir / "manifest.json");
  return m;
}

Dataset make_dataset(const std::vector<LabeledMotion>& corpus,
                     const std::vector<std::string>& categories,
                     const std::vector<std::string>& unseen, double test_fraction,
                     int frame_length, int joints, bool center_root) {
  auto m = corpus_manifest(corpus, categories, unseen, test_fraction, frame_length, joints);
  m.center_root = center_root;
  const PreprocessOptions opts{frame_length, center_root};
  std::vector<LabeledMotion> motions;
  motions.reserve(corpus.size());
  for (const auto& s : corpus) motions.push_back({preprocess(s.motion, opts), s.category, s.sample_id});
  return Dataset(std::move(m), std::move(motions));
}

}  // namespace haad
