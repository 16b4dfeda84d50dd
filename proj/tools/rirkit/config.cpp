#include "config.hpp"

#include <fstream>

#include "rirkit/error.hpp"

namespace rirkit::cli {

Config::Config(nlohmann::json root, std::filesystem::path base_dir)
    : root_(std::move(root)), base_dir_(std::move(base_dir)) {
  if (!root_.is_object()) {
    throw Error(ErrorCode::kConfiguration, "config must be a JSON object");
  }
}

Config Config::load(const std::string& path) {
  if (path.empty()) return Config();
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, "config " + path + ": " + e.what());
  }
  return Config(std::move(root), std::filesystem::absolute(path).parent_path());
}

const nlohmann::json& Config::section(std::string_view name) const {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  const auto it = root_.find(std::string(name));
  if (it == root_.end()) return kEmpty;
  if (!it->is_object()) {
    throw Error(ErrorCode::kConfiguration, "config section '" + std::string(name) +
                                               "' must be an object");
  }
  return *it;
}

bool Config::has(std::string_view section, std::string_view key) const {
  return this->section(section).contains(std::string(key));
}

std::filesystem::path Config::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

void Config::bad_value(std::string_view section, std::string_view key) {
  std::string where = section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
  throw Error(ErrorCode::kConfiguration, "config value '" + where + "' has the wrong type");
}

}  // namespace rirkit::cli
