#include "rirkit/manifest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "rirkit/analyze.hpp"
#include "rirkit/error.hpp"
#include "rirkit/resample.hpp"
#include "rirkit/serialize.hpp"
#include "rirkit/wav_io.hpp"

namespace rirkit {

namespace fs = std::filesystem;

std::string manifest_line(const ManifestRow& row) {
  nlohmann::json j;
  j["id"] = row.id;
  j["wav_path"] = row.wav_path;
  j["params"] = row.params ? to_json(*row.params) : nlohmann::json();
  j["quantized"] = row.quantized ? to_json(*row.quantized) : nlohmann::json();
  j["valid"] = row.valid;
  if (!row.exclusion_reason.empty()) j["exclusion_reason"] = row.exclusion_reason;
  return j.dump();
}

ManifestRow parse_manifest_line(const std::string& line, const GridSet& grids) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifest, std::string("malformed manifest line: ") + e.what());
  }
  try {
    ManifestRow row;
    row.id = j.at("id").get<std::string>();
    row.wav_path = j.at("wav_path").get<std::string>();
    if (const auto it = j.find("params"); it != j.end() && !it->is_null()) {
      row.params = acoustic_params_from_json(*it);
    }
    if (const auto it = j.find("quantized"); it != j.end() && !it->is_null()) {
      row.quantized = quantized_params_from_json(*it, grids);
    }
    row.valid = j.value("valid", true);
    row.exclusion_reason = j.value("exclusion_reason", std::string());
    return row;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifest, std::string("malformed manifest row: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kManifest, std::string("malformed manifest row: ") + e.what());
  }
}

void validate(const Manifest& manifest) {
  std::set<std::string> seen;
  for (const ManifestRow& row : manifest) {
    if (!seen.insert(row.id).second) {
      throw Error(ErrorCode::kManifest, "duplicate manifest id '" + row.id + "'");
    }
  }
}

Manifest read_manifest(const fs::path& path, const GridSet& grids) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  Manifest manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      manifest.push_back(parse_manifest_line(line, grids));
    } catch (const Error& e) {
      throw Error(ErrorCode::kManifest,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(manifest);
  return manifest;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
  validate(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest " + path.string());
  for (const ManifestRow& row : manifest) out << manifest_line(row) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Waveform load_row_waveform(const ManifestRow& row, const fs::path& base_dir,
                           int session_rate_hz) {
  fs::path p(row.wav_path);
  if (p.is_relative()) p = base_dir / p;
  Waveform w = read_wav(p).waveform;
  if (w.sample_rate_hz != session_rate_hz) w = resample(w, session_rate_hz);
  return w;
}

ManifestRow ingest_file(const fs::path& wav, const std::string& id,
                        const IngestOptions& options) {
  ManifestRow row;
  row.id = id;
  row.wav_path = wav.string();
  const auto reject = [&](std::string reason) {
    row.valid = false;
    row.exclusion_reason = std::move(reason);
    return row;
  };
  try {
    Waveform w = read_wav(wav).waveform;
    if (w.sample_rate_hz != options.session_rate_hz) w = resample(w, options.session_rate_hz);
    w = fit_length(w, seconds_to_samples(options.duration_s, options.session_rate_hz));
    const AnalysisResult analysis = analyze_detailed(w);
    row.params = analysis.params;
    const AcousticParams& p = analysis.params;
    if (!p.valid(slot_index(Measure::kT30))) return reject("insufficient-decay");
    if (!p.valid(slot_index(Measure::kC80)) && std::isinf(p.broadband.c80_db)) {
      return reject("c80-sentinel");
    }
    if (analysis.noise_floor_db > options.max_noise_floor_db) return reject("noise-floor");
    row.quantized = quantize_params(p, options.grids);
  } catch (const Error& e) {
    return reject(std::string(error_code_name(e.code())));
  }
  return row;
}

Manifest ingest_directory(const fs::path& dir, const IngestOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  if (files.empty()) throw Error(ErrorCode::kIo, "no WAV files in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  Manifest manifest(files.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      manifest[i] = ingest_file(files[i], files[i].stem().string(), options);
    }
  };
  const int jobs = std::clamp(options.jobs, 1, static_cast<int>(files.size()));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }
  validate(manifest);
  return manifest;
}

}  // namespace rirkit
