#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "config.hpp"
#include "rirkit/waveform.hpp"

namespace rirkit::cli {

/// Flags every verb accepts.
struct CommonOptions {
  std::uint64_t seed = 0;
  std::string config_path;
  int jobs = 1;
};

void add_common_options(CLI::App& sub, CommonOptions& common);

/// Prints the one-line machine-readable summary of a finished command.
void emit_summary(const std::string& command, nlohmann::json fields);

/// Creates `dir` (and parents) for outputs.
void ensure_directory(const std::filesystem::path& dir);

/// Per-item seed derived from the run seed, independent of processing order.
std::uint64_t item_seed(std::uint64_t seed, std::uint64_t index);

/// Runs fn(0..n-1) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Flag value when given on the command line, else config, else fallback.
template <typename T>
T pick(const CLI::Option* flag, const T& flag_value, const Config& config,
       std::string_view section, std::string_view key, T fallback) {
  if (flag != nullptr && flag->count() > 0) return flag_value;
  return config.get<T>(section, key, std::move(fallback));
}

/// Valid rows of a manifest as (id, waveform) at `rate`, fitted to
/// `duration_s`. Relative WAV paths resolve against the manifest directory.
std::vector<std::pair<std::string, Waveform>> load_manifest_waveforms(
    const std::filesystem::path& manifest, int rate, double duration_s, int jobs);

void add_ingest(CLI::App& app);
void add_analyze(CLI::App& app);
void add_quantize(CLI::App& app);
void add_synth(CLI::App& app);
void add_codec(CLI::App& app);
void add_sample(CLI::App& app);
void add_eval(CLI::App& app);

}  // namespace rirkit::cli
