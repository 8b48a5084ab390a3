#include "haad/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "haad/errors.hpp"

namespace haad {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

const Eigen::MatrixXd& Checkpoint::tensor(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  throw CompatibilityError("checkpoint has no tensor named '" + name + "'");
}

bool Checkpoint::has_tensor(const std::string& name) const {
  return std::any_of(tensors.begin(), tensors.end(), [&](const NamedTensor& t) { return t.name == name; });
}

void write_checkpoint(const fs::path& path, const Checkpoint& checkpoint) {
  auto header = checkpoint.header;
  header["tensors"] = nlohmann::json::array();
  for (const auto& t : checkpoint.tensors)
    header["tensors"].push_back({{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << header.dump() << '\n';
  for (const auto& t : checkpoint.tensors) {
    for (Eigen::Index r = 0; r < t.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.value.cols(); ++c) {
        const float v = static_cast<float>(t.value(r, c));
        out.write(reinterpret_cast<const char*>(&v), sizeof(float));
      }
    }
  }
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint read_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty checkpoint");
  Checkpoint ck;
  try {
    ck.header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": bad checkpoint header: " + e.what());
  }
  if (!ck.header.contains("tensors")) throw ParseError(path.string() + ": header lists no tensors");
  for (const auto& desc : ck.header["tensors"]) {
    NamedTensor t;
    t.name = desc.at("name").get<std::string>();
    const auto rows = desc.at("rows").get<Eigen::Index>();
    const auto cols = desc.at("cols").get<Eigen::Index>();
    t.value.resize(rows, cols);
    std::vector<float> buf(static_cast<std::size_t>(rows * cols));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw ParseError(path.string() + ": truncated tensor '" + t.name + "'");
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) t.value(r, c) = buf[static_cast<std::size_t>(r * cols + c)];
    ck.tensors.push_back(std::move(t));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw ParseError(path.string() + ": trailing bytes after last tensor");
  return ck;
}

}  // namespace haad
