#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rirkit/acoustic_params.hpp"
#include "rirkit/params.hpp"
#include "rirkit/waveform.hpp"

namespace rirkit {

/// One JSONL row of a corpus manifest.
struct ManifestRow {
  std::string id;
  std::string wav_path;
  std::optional<AcousticParams> params;
  std::optional<QuantizedParams> quantized;
  bool valid = true;
  std::string exclusion_reason;  // empty when valid
};

using Manifest = std::vector<ManifestRow>;

/// Serializes one row as a single JSON line (no trailing newline).
std::string manifest_line(const ManifestRow& row);
ManifestRow parse_manifest_line(const std::string& line, const GridSet& grids = default_grids());

/// Throws kManifest for duplicate ids or malformed lines, kIo for
/// unreadable files.
Manifest read_manifest(const std::filesystem::path& path, const GridSet& grids = default_grids());
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// Throws kManifest on the first duplicate id.
void validate(const Manifest& manifest);

struct IngestOptions {
  int session_rate_hz = kDefaultSessionRateHz;
  double duration_s = 2.0;
  double max_noise_floor_db = -20.0;  // relative to peak power
  int jobs = 1;
  GridSet grids = default_grids();
};

/// Reads, resamples, fits to duration, analyzes and quantizes one file.
/// Never throws for per-file problems: the row is marked invalid with the
/// error-code name (or "noise-floor", "insufficient-decay",
/// "c80-sentinel") as reason.
ManifestRow ingest_file(const std::filesystem::path& wav, const std::string& id,
                        const IngestOptions& options = {});

/// All *.wav files of `dir` (non-recursive), sorted by file name; ids are
/// the file stems. Throws kIo when the directory is missing or holds no WAV.
Manifest ingest_directory(const std::filesystem::path& dir, const IngestOptions& options = {});

/// Loads the waveform of a row, resolving relative paths against `base_dir`.
Waveform load_row_waveform(const ManifestRow& row, const std::filesystem::path& base_dir,
                           int session_rate_hz = kDefaultSessionRateHz);

}  // namespace rirkit
