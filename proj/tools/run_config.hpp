#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace haad::cli {

// Every key the tool understands, grouped by section, with its default value.
nlohmann::json default_config();

// Parses a JSON config file. Top-level "seed", "out" and "command" are accepted next to
// the sections; anything else must exist in the defaults with a compatible type.
nlohmann::json load_config_file(const std::filesystem::path& path);

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  nlohmann::json values;    // defaults < file < flags, fully populated
  nlohmann::json user;      // only what the file and flags set

  template <typename T>
  T get(const std::string& dotted) const {
    return values.at(nlohmann::json::json_pointer(pointer(dotted))).get<T>();
  }
  bool is_explicit(const std::string& dotted) const {
    return user.contains(nlohmann::json::json_pointer(pointer(dotted)));
  }
  static std::string pointer(const std::string& dotted);

  // Snapshot sufficient to rerun the command with --config.
  nlohmann::json snapshot() const;
};

struct ConfigSources {
  std::string command;
  std::filesystem::path config_file;  // empty: none
  std::map<std::string, nlohmann::json> flags;  // dotted key -> value
  bool seed_given = false;
  std::uint64_t seed = 0;
  bool out_given = false;
  std::filesystem::path out;
};

RunConfig resolve_config(const ConfigSources& sources);

// Writes <out>/resolved_config.json, creating the directory.
void write_resolved_config(const RunConfig& config);

}  // namespace haad::cli
