#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace haad {

// H x 3J joint coordinates. Column 3j+k holds coordinate k (x, y, z) of joint j.
class MotionSequence {
 public:
  MotionSequence() = default;
  MotionSequence(Eigen::MatrixXd frames, int joint_count);

  const Eigen::MatrixXd& frames() const { return frames_; }
  int joint_count() const { return joint_count_; }
  int frame_count() const { return static_cast<int>(frames_.rows()); }

  bool operator==(const MotionSequence& other) const {
    return joint_count_ == other.joint_count_ && frames_ == other.frames_;
  }

 private:
  Eigen::MatrixXd frames_;
  int joint_count_ = 0;
};

struct LabeledMotion {
  MotionSequence motion;
  std::string category;
  std::string sample_id;
};

enum class Split { kTrain, kTest };
enum class CategorySplit { kTrain, kUnseenTest };

std::string to_string(Split split);
std::string to_string(CategorySplit split);

struct SampleEntry {
  std::string id;
  std::string category;
  Split split = Split::kTrain;
  std::filesystem::path file;  // absolute, resolved against the manifest directory
};

// A category is kTrain when at least one of its samples is tagged "train";
// categories with only "test" samples are unseen during training.
struct DatasetManifest {
  std::vector<std::string> categories;
  std::vector<SampleEntry> samples;
  std::map<std::string, CategorySplit> category_split;
  int frame_length = 60;
  int joints = 24;
  bool center_root = true;

  std::vector<std::string> train_categories() const;
  std::vector<std::string> unseen_categories() const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
// Sample paths are written relative to the manifest's directory when possible.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Raw little-endian f32, row-major H x 3J.
MotionSequence read_motion_file(const std::filesystem::path& path, int joints);
void write_motion_file(const MotionSequence& motion, const std::filesystem::path& path);

struct PreprocessOptions {
  int target_len = 60;
  bool center_root = true;
};

// Crops from the start or pads by repeating the last frame, then optionally subtracts
// joint 0 of the first frame from every joint in every frame.
MotionSequence preprocess(const MotionSequence& motion, const PreprocessOptions& options);

// Manifest plus every sample loaded and preprocessed to the manifest's frame length.
class Dataset {
 public:
  explicit Dataset(DatasetManifest manifest);
  Dataset(DatasetManifest manifest, std::vector<LabeledMotion> motions);

  const DatasetManifest& manifest() const { return manifest_; }
  const std::vector<LabeledMotion>& motions() const { return motions_; }
  const LabeledMotion& motion(std::size_t index) const { return motions_.at(index); }
  Split split(std::size_t index) const { return manifest_.samples.at(index).split; }

  std::vector<std::size_t> train_pool(const std::string& category) const;
  std::vector<std::size_t> test_pool(const std::string& category) const;
  std::vector<std::size_t> test_indices() const;

 private:
  DatasetManifest manifest_;
  std::vector<LabeledMotion> motions_;
};

struct SupportSet {
  std::string category;
  std::vector<MotionSequence> members;
  std::vector<std::string> member_ids;
};

// Draws n_s distinct members from the category's test pool.
SupportSet sample_support_set(const Dataset& dataset, const std::string& category, int n_s,
                              std::uint64_t seed);

// ---- synthetic corpus ----

// Every sample of a category shares the per-column sinusoid family; samples differ by a
// global amplitude scale, a global phase shift, additive noise and a random translation.
// With tempo_jitter > 0 each sample also changes tempo by a random factor from a random onset
// frame on, so the continuation of a motion is not determined by its beginning.
struct SyntheticCategory {
  std::string name;
  Eigen::VectorXd frequency;  // cycles per frame, length 3J
  Eigen::VectorXd amplitude;  // meters, length 3J
  Eigen::VectorXd phase;      // radians, length 3J
  double amplitude_jitter = 0.0;
  double phase_jitter = 0.0;
  double tempo_jitter = 0.0;  // relative tempo change after the onset, U(-j, j)
  double noise = 0.0;
};

struct SyntheticCorpusSpec {
  int joints = 24;
  int min_frames = 60;
  int max_frames = 60;
  int samples_per_category = 20;
  double translation_jitter = 0.0;
  int tempo_onset_min = 20;  // onset frame range for tempo changes
  int tempo_onset_max = 40;
  Eigen::VectorXd rest_pose;  // length 3J; empty means zeros
  std::vector<SyntheticCategory> categories;
};

// Builds a spec whose categories draw their sinusoid families from seeded distributions.
SyntheticCorpusSpec random_corpus_spec(int categories, int joints, int samples_per_category,
                                       std::uint64_t seed);

SyntheticCorpusSpec corpus_spec_from_json(const std::string& text);
std::string corpus_spec_to_json(const SyntheticCorpusSpec& spec);

std::vector<LabeledMotion> generate_synthetic_corpus(const SyntheticCorpusSpec& spec,
                                                     std::uint64_t seed);

// Writes samples/<id>.bin per motion plus manifest.json under `dir`. The trailing
// `test_fraction` share of each seen category (in corpus order) goes to the test split;
// categories listed in `unseen` contribute test samples only.
DatasetManifest write_corpus(const std::vector<LabeledMotion>& corpus,
                             const std::vector<std::string>& categories,
                             const std::vector<std::string>& unseen, double test_fraction,
                             int frame_length, int joints, const std::filesystem::path& dir);

// In-memory equivalent of write_corpus followed by loading, for tests and harnesses.
Dataset make_dataset(const std::vector<LabeledMotion>& corpus,
                     const std::vector<std::string>& categories,
                     const std::vector<std::string>& unseen, double test_fraction,
                     int frame_length, int joints, bool center_root = true);

}  // namespace haad
