#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace haad {

struct NamedTensor {
  std::string name;
  Eigen::MatrixXd value;
};

// File layout: one line of compact JSON (the header, with a "tensors" array listing
// name/rows/cols in storage order) followed by every tensor as row-major little-endian f32.
struct Checkpoint {
  nlohmann::json header;
  std::vector<NamedTensor> tensors;

  const Eigen::MatrixXd& tensor(const std::string& name) const;
  bool has_tensor(const std::string& name) const;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace haad
