#include "run_config.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "haad/errors.hpp"

namespace haad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

json default_config() {
  return {
      {"data", {{"manifest", ""}}},
      {"synth",
       {{"categories", 4},
        {"per_category", 20},
        {"joints", 24},
        {"unseen", 1},
        {"test_fraction", 0.5},
        {"frame_length", 60},
        {"phase_jitter", std::numbers::pi},
        {"tempo_jitter", 0.0},
        {"spec", ""}}},
      {"diffusion",
       {{"steps", 100},
        {"dct_components", 20},
        {"hidden", 128},
        {"blocks", 2},
        {"time_dim", 32},
        {"epochs", 1000},
        {"batch_size", 32},
        {"lr", 1e-3},
        {"threads", 1},
        {"validation_size", 64},
        {"corpus", "train"},
        {"checkpoint", ""}}},
      {"encoder",
       {{"blocks", 4}, {"layers_per_block", 2}, {"hidden_dim", 128}, {"dct_components", 10}, {"checkpoint", ""}}},
      {"train",
       {{"epochs", 100},
        {"lr_start", 1e-3},
        {"lr_end", 1e-5},
        {"temperature", 1.0},
        {"n_g", 3},
        {"steps_per_epoch", 1},
        {"cache_augmentations", false}}},
      {"augment", {{"kind", "diffusion"}, {"observed", 30}, {"sigma", 0.05}, {"components", 10}}},
      {"eval", {{"n_s", 3}, {"n_g", 10}, {"trials", 10}, {"metric", "euclidean"}, {"categories", json::array()}}},
      {"score", {{"support_dir", ""}, {"input", ""}, {"category", ""}}},
      {"sweep", {{"n_s", {1, 3, 5}}, {"n_g", {0, 10}}, {"observed", {30}}}},
      {"export", {{"split", "test"}}},
  };
}

std::string RunConfig::pointer(const std::string& dotted) {
  std::string p = "/" + dotted;
  for (auto& ch : p)
    if (ch == '.') ch = '/';
  return p;
}

namespace {

bool compatible(const json& reference, const json& value) {
  if (reference.is_number_float()) return value.is_number();
  if (reference.is_number_integer()) return value.is_number_integer();
  if (reference.is_boolean()) return value.is_boolean();
  if (reference.is_string()) return value.is_string();
  if (reference.is_array()) {
    if (!value.is_array()) return false;
    if (reference.empty()) return true;
    for (const auto& v : value)
      if (!compatible(reference.front(), v)) return false;
    return true;
  }
  return false;
}

void check_key(const json& defaults, const std::string& dotted, const json& value, const std::string& origin) {
  const json::json_pointer ptr(RunConfig::pointer(dotted));
  if (!defaults.contains(ptr) || defaults.at(ptr).is_object())
    throw ConfigError(origin + ": unknown config key '" + dotted + "'");
  if (!compatible(defaults.at(ptr), value)) {
    throw ConfigError(origin + ": key '" + dotted + "' expects " + std::string(defaults.at(ptr).type_name()) +
                      ", got " + value.dump());
  }
}

void validate_file(const json& defaults, const json& node, const std::string& origin) {
  if (!node.is_object()) throw ConfigError(origin + ": config must be a JSON object");
  for (const auto& [section, body] : node.items()) {
    if (section == "seed" || section == "out" || section == "command") continue;
    if (!defaults.contains(section)) throw ConfigError(origin + ": unknown config section '" + section + "'");
    if (!body.is_object()) throw ConfigError(origin + ": section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) check_key(defaults, section + "." + key, value, origin);
  }
}

}  // namespace

json load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  json node;
  try {
    node = json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  validate_file(default_config(), node, path.string());
  return node;
}

RunConfig resolve_config(const ConfigSources& src) {
  const json defaults = default_config();
  RunConfig rc;
  rc.command = src.command;
  rc.user = json::object();
  rc.out = "out";

  if (!src.config_file.empty()) {
    json file = load_config_file(src.config_file);
    if (file.contains("seed")) {
      if (!file["seed"].is_number_unsigned()) throw ConfigError("config 'seed' must be a non-negative integer");
      rc.seed = file["seed"].get<std::uint64_t>();
    }
    if (file.contains("out")) {
      if (!file["out"].is_string()) throw ConfigError("config 'out' must be a string");
      rc.out = file["out"].get<std::string>();
    }
    file.erase("seed");
    file.erase("out");
    file.erase("command");
    rc.user.merge_patch(file);
  }
  for (const auto& [key, value] : src.flags) {
    check_key(defaults, key, value, "command line");
    rc.user[json::json_pointer(RunConfig::pointer(key))] = value;
  }
  if (src.seed_given) rc.seed = src.seed;
  if (src.out_given) rc.out = src.out;

  rc.values = defaults;
  rc.values.merge_patch(rc.user);
  return rc;
}

json RunConfig::snapshot() const {
  json s = values;
  s["command"] = command;
  s["seed"] = seed;
  s["out"] = out.string();
  return s;
}

void write_resolved_config(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw IoError("cannot create output directory " + config.out.string() + ": " + ec.message());
  const auto path = config.out / "resolved_config.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << config.snapshot().dump(2) << '\n';
}

}  // namespace haad::cli
