#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace rirkit::cli {

/// A JSON config file with one object per verb ("ingest", "synth", "codec",
/// "sample", "eval") plus top-level keys shared by all of them. Relative
/// paths inside the file resolve against the file's directory.
class Config {
 public:
  Config() = default;
  Config(nlohmann::json root, std::filesystem::path base_dir);

  static Config load(const std::string& path);

  template <typename T>
  T get(std::string_view section, std::string_view key, T fallback) const {
    const nlohmann::json& s = this->section(section);
    const auto it = s.find(std::string(key));
    if (it != s.end()) return read<T>(*it, section, key);
    const auto top = root_.find(std::string(key));
    if (top != root_.end() && !top->is_object()) return read<T>(*top, "", key);
    return fallback;
  }

  bool has(std::string_view section, std::string_view key) const;
  const nlohmann::json& section(std::string_view name) const;
  std::filesystem::path resolve(const std::string& path) const;

 private:
  template <typename T>
  static T read(const nlohmann::json& v, std::string_view section, std::string_view key) {
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      bad_value(section, key);
    }
  }
  [[noreturn]] static void bad_value(std::string_view section, std::string_view key);

  nlohmann::json root_ = nlohmann::json::object();
  std::filesystem::path base_dir_;
};

}  // namespace rirkit::cli
