#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "commands.hpp"
#include "rirkit/analyze.hpp"
#include "rirkit/error.hpp"
#include "rirkit/manifest.hpp"
#include "rirkit/resample.hpp"
#include "rirkit/serialize.hpp"
#include "rirkit/spectrum.hpp"
#include "rirkit/synth.hpp"
#include "rirkit/wav_io.hpp"

namespace rirkit::cli {

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidValue, path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Manifest paths are stored relative to the manifest's own directory.
std::string relative_to(const fs::path& file, const fs::path& dir) {
  const fs::path rel = fs::weakly_canonical(file).lexically_relative(fs::weakly_canonical(dir));
  return rel.empty() ? file.string() : rel.generic_string();
}

fs::path parent_or_dot(const fs::path& p) {
  return p.has_parent_path() ? p.parent_path() : fs::path(".");
}

}  // namespace

void add_ingest(CLI::App& app) {
  struct Opts {
    CommonOptions common;
    std::string dir;
    std::string out;
    int session_rate = kDefaultSessionRateHz;
    double max_noise_floor_db = -20.0;
    double duration_s = 2.0;
    CLI::Option* rate_flag = nullptr;
    CLI::Option* floor_flag = nullptr;
    CLI::Option* duration_flag = nullptr;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("ingest", "Analyze and quantize a directory of RIR WAVs");
  add_common_options(*sub, o->common);
  sub->add_option("dir", o->dir, "Directory of WAV files")->required();
  sub->add_option("-o,--out", o->out, "Output manifest (JSONL)")->required();
  sub->add_option("--jobs", o->common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  o->rate_flag = sub->add_option("--session-rate", o->session_rate, "Session sample rate (Hz)");
  o->floor_flag = sub->add_option("--max-noise-floor-db", o->max_noise_floor_db,
                                  "Reject files whose noise floor is above this (dB re peak)");
  o->duration_flag = sub->add_option("--duration", o->duration_s, "Truncate/pad length (s)");
  sub->callback([o] {
    const Config config = Config::load(o->common.config_path);
    IngestOptions options;
    options.session_rate_hz =
        pick(o->rate_flag, o->session_rate, config, "ingest", "session_rate_hz", kDefaultSessionRateHz);
    options.max_noise_floor_db =
        pick(o->floor_flag, o->max_noise_floor_db, config, "ingest", "max_noise_floor_db", -20.0);
    options.duration_s = pick(o->duration_flag, o->duration_s, config, "ingest", "duration_s", 2.0);
    options.jobs = o->common.jobs;

    Manifest manifest = ingest_directory(o->dir, options);
    const fs::path out(o->out);
    ensure_directory(parent_or_dot(out));
    std::size_t valid = 0;
    for (ManifestRow& row : manifest) {
      row.wav_path = relative_to(row.wav_path, parent_or_dot(out));
      if (row.valid) ++valid;
    }
    write_manifest(out, manifest);
    nlohmann::json reasons = nlohmann::json::object();
    for (const ManifestRow& row : manifest) {
      if (!row.valid) reasons[row.exclusion_reason] = reasons.value(row.exclusion_reason, 0) + 1;
    }
    emit_summary("ingest", {{"manifest", out.string()},
                            {"rows", manifest.size()},
                            {"valid", valid},
                            {"invalid", manifest.size() - valid},
                            {"exclusions", reasons}});
  });
}

void add_analyze(CLI::App& app) {
  struct Opts {
    CommonOptions common;
    std::string wav;
    std::string out;
    int session_rate = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("analyze", "Measure the 46 acoustic parameters of one RIR");
  add_common_options(*sub, o->common);
  sub->add_option("wav", o->wav, "RIR WAV file")->required();
  sub->add_option("-o,--out", o->out, "Write the parameters as JSON");
  sub->add_option("--session-rate", o->session_rate, "Resample to this rate before analysis");
  sub->callback([o] {
    const Config config = Config::load(o->common.config_path);
    Waveform w = read_wav(o->wav).waveform;
    const int rate = o->session_rate > 0
                         ? o->session_rate
                         : config.get<int>("analyze", "session_rate_hz", w.sample_rate_hz);
    if (rate != w.sample_rate_hz) w = resample(w, rate);
    const AnalysisResult r = analyze_detailed(w);
    const nlohmann::json params = to_json(r.params);
    if (!o->out.empty()) {
      ensure_directory(parent_or_dot(o->out));
      write_json_file(o->out, params);
    }
    emit_summary("analyze", {{"input", o->wav},
                             {"onset_s", static_cast<double>(r.onset) / w.sample_rate_hz},
                             {"noise_floor_db", r.noise_floor_db},
                             {"invalid_slots", r.params.invalid.count()},
                             {"params", params}});
  });
}

void add_quantize(CLI::App& app) {
  struct Opts {
    CommonOptions common;
    std::string input;
    std::string out;
    std::string mode = "raw";
    bool dequantize = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("quantize", "Map parameters to grid classes and back");
  add_common_options(*sub, o->common);
  sub->add_option("params", o->input, "Parameter JSON (or quantized JSON with --dequantize)")
      ->required();
  sub->add_option("-o,--out", o->out, "Output JSON");
  sub->add_option("--conditioning", o->mode, "Conditioning layout")
      ->check(CLI::IsMember({"raw", "one_hot"}));
  sub->add_flag("--dequantize", o->dequantize, "Map class indices back to bin centers");
  sub->callback([o] {
    const nlohmann::json in = read_json_file(o->input);
    nlohmann::json result;
    nlohmann::json summary;
    if (o->dequantize) {
      const QuantizedParams q = quantized_params_from_json(in.contains("quantized") ? in["quantized"] : in);
      result = to_json(dequantize_params(q));
      summary = {{"params", result}};
    } else {
      const QuantizedParams q = quantize_params(acoustic_params_from_json(in));
      const ConditioningVector v = to_conditioning_vector(
          q, o->mode == "raw" ? ConditioningMode::kRaw : ConditioningMode::kOneHot);
      result = {{"quantized", to_json(q)}, {"conditioning", to_json(v)}};
      summary = {{"indices", q.indices}, {"conditioning_length", v.values.size()}};
    }
    if (!o->out.empty()) {
      ensure_directory(parent_or_dot(o->out));
      write_json_file(o->out, result);
    }
    summary["input"] = o->input;
    emit_summary("quantize", summary);
  });
}

namespace {

// Measured values where valid, bin centers of the quantized classes elsewhere.
AcousticParams complete_params(const ManifestRow& row) {
  if (!row.quantized) {
    throw Error(ErrorCode::kManifest, "row '" + row.id + "' has no quantized parameters");
  }
  AcousticParams p = dequantize_params(*row.quantized);
  if (row.params) {
    for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
      if (row.params->valid(slot)) p.set_value(slot, row.params->value(slot));
    }
  }
  return p;
}

}  // namespace

void add_synth(CLI::App& app) {
  struct Opts {
    CommonOptions common;
    std::string params;
    std::string manifest;
    int random = 0;
    std::string out_dir;
    std::string eq;
    std::string id = "synth";
    double duration_s = 2.0;
    int session_rate = kDefaultSessionRateHz;
    int max_iterations = 10;
    CLI::Option* duration_flag = nullptr;
    CLI::Option* rate_flag = nullptr;
    CLI::Option* iter_flag = nullptr;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("synth", "Synthesize RIRs matching acoustic parameters");
  add_common_options(*sub, o->common);
  auto* params = sub->add_option("--params", o->params, "Target parameter JSON");
  auto* manifest = sub->add_option("--manifest", o->manifest, "Targets from a manifest");
  auto* random = sub->add_option("--random", o->random, "Number of random realizable grid targets")
                     ->check(CLI::PositiveNumber);
  params->excludes(manifest)->excludes(random);
  manifest->excludes(random);
  sub->add_option("-o,--out-dir", o->out_dir, "Output directory")->required();
  sub->add_option("--id", o->id, "Output id for --params")->capture_default_str();
  sub->add_option("--eq", o->eq, "Mel energy profile JSON to match");
  sub->add_option("--jobs", o->common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  o->duration_flag = sub->add_option("--duration", o->duration_s, "Length (s)");
  o->rate_flag = sub->add_option("--session-rate", o->session_rate, "Sample rate (Hz)");
  o->iter_flag = sub->add_option("--max-iterations", o->max_iterations, "Refinement rounds");
  sub->callback([o, params, manifest, random] {
    if (params->count() + manifest->count() + random->count() == 0) {
      throw CLI::RequiredError("one of --params, --manifest, --random");
    }
    const Config config = Config::load(o->common.config_path);
    SynthOptions options;
    options.max_iterations = pick(o->iter_flag, o->max_iterations, config, "synth", "max_iterations", 10);
    const double duration = pick(o->duration_flag, o->duration_s, config, "synth", "duration_s", 2.0);
    const int rate =
        pick(o->rate_flag, o->session_rate, config, "synth", "session_rate_hz", kDefaultSessionRateHz);
    std::optional<MelEnergyProfile> eq;
    if (!o->eq.empty()) eq = mel_profile_from_json(read_json_file(o->eq));

    std::vector<std::string> ids;
    std::vector<SynthTarget> targets;
    const auto add_target = [&](std::string id, AcousticParams p) {
      SynthTarget t;
      t.params = p;
      t.eq_profile = eq;
      t.duration_s = duration;
      t.sample_rate_hz = rate;
      t.seed = item_seed(o->common.seed, targets.size());
      ids.push_back(std::move(id));
      targets.push_back(std::move(t));
    };
    if (params->count() > 0) {
      add_target(o->id, acoustic_params_from_json(read_json_file(o->params)));
    } else if (manifest->count() > 0) {
      for (const ManifestRow& row : read_manifest(o->manifest)) {
        if (row.valid) add_target(row.id, complete_params(row));
      }
    } else {
      for (int i = 0; i < o->random; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "synth_%04d", i);
        SynthTarget t =
            random_grid_target(item_seed(o->common.seed, i), default_grids(), options, rate, duration);
        add_target(id, t.params);
      }
    }

    const fs::path out_dir(o->out_dir);
    ensure_directory(out_dir);
    Manifest rows(targets.size());
    std::vector<int> converged(targets.size(), 0);
    parallel_for(targets.size(), o->common.jobs, [&](std::size_t i) {
      auto [w, report] = synth_rir(targets[i], options);
      const std::string file = ids[i] + ".wav";
      write_wav(out_dir / file, w);
      write_json_file(out_dir / (ids[i] + ".report.json"), to_json(report));
      ManifestRow& row = rows[i];
      row.id = ids[i];
      row.wav_path = file;
      row.params = report.achieved;
      try {
        row.quantized = quantize_params(report.achieved);
      } catch (const Error& e) {
        row.valid = false;
        row.exclusion_reason = std::string(error_code_name(e.code()));
      }
      converged[i] = report.converged ? 1 : 0;
    });
    write_manifest(out_dir / "manifest.jsonl", rows);
    std::size_t n_converged = 0;
    for (int c : converged) n_converged += static_cast<std::size_t>(c);
    emit_summary("synth", {{"out_dir", out_dir.string()},
                           {"count", targets.size()},
                           {"converged", n_converged},
                           {"manifest", (out_dir / "manifest.jsonl").string()}});
  });
}

}  // namespace rirkit::cli
