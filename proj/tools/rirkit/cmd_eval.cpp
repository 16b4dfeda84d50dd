#include <algorithm>
#include <fstream>
#include <memory>
#include <set>

#include "commands.hpp"
#include "rirkit/error.hpp"
#include "rirkit/eval.hpp"
#include "rirkit/manifest.hpp"
#include "rirkit/resample.hpp"
#include "rirkit/serialize.hpp"
#include "rirkit/synth.hpp"
#include "rirkit/wav_io.hpp"

namespace rirkit::cli {

namespace fs = std::filesystem;

namespace {

fs::path parent_or_dot(const fs::path& p) {
  return p.has_parent_path() ? p.parent_path() : fs::path(".");
}

std::vector<EvalItem> load_items(const fs::path& manifest, const std::vector<ManifestRow>& rows,
                                 int rate, int jobs) {
  std::vector<EvalItem> items(rows.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    items[i] = {rows[i].id, load_row_waveform(rows[i], parent_or_dot(manifest), rate)};
  });
  return items;
}

std::vector<Waveform> load_dry(const std::string& dir, int count, int rate, std::uint64_t seed) {
  std::vector<Waveform> dry;
  if (dir.empty()) {
    for (int i = 0; i < count; ++i) {
      dry.push_back(synthetic_speech(seed + static_cast<std::uint64_t>(i), 2.0, rate));
    }
    return dry;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::kIo, "no dry WAV files in " + dir);
  for (const fs::path& f : files) {
    Waveform w = read_wav(f).waveform;
    if (w.sample_rate_hz != rate) w = resample(w, rate);
    dry.push_back(std::move(w));
  }
  return dry;
}

}  // namespace

void add_eval(CLI::App& app) {
  struct Opts {
    CommonOptions common;
    std::string generated;
    std::string reference;
    std::string dry_dir;
    std::string method = "generated";
    std::string out;
    std::string csv;
    bool no_srmr = false;
    int resamples = 2000;
    CLI::Option* resample_flag = nullptr;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("eval", "Compare generated RIRs against references");
  add_common_options(*sub, o->common);
  sub->add_option("--generated", o->generated, "Generated manifest")->required();
  sub->add_option("--reference", o->reference, "Reference manifest")->required();
  sub->add_option("--dry-dir", o->dry_dir, "Directory of dry speech WAVs for SRMR");
  sub->add_option("--method", o->method, "Method name in the report")->capture_default_str();
  sub->add_option("-o,--out", o->out, "Report JSON")->required();
  sub->add_option("--csv", o->csv, "Also write the table as CSV");
  sub->add_flag("--no-srmr", o->no_srmr, "Skip the SRMR metric");
  o->resample_flag = sub->add_option("--resamples", o->resamples, "Bootstrap resamples")
                         ->check(CLI::PositiveNumber);
  sub->add_option("--jobs", o->common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->callback([o] {
    const Config config = Config::load(o->common.config_path);
    const int rate = config.get<int>("eval", "session_rate_hz", kDefaultSessionRateHz);

    // Invalid reference rows were discarded at ingest; drop their generated
    // counterparts too. Unknown generated ids are kept so the mismatch is
    // reported.
    const Manifest ref_all = read_manifest(o->reference);
    std::set<std::string> invalid_ids;
    std::vector<ManifestRow> ref_rows;
    for (const ManifestRow& row : ref_all) {
      if (row.valid) {
        ref_rows.push_back(row);
      } else {
        invalid_ids.insert(row.id);
      }
    }
    std::vector<ManifestRow> gen_rows;
    for (const ManifestRow& row : read_manifest(o->generated)) {
      if (!invalid_ids.contains(row.id)) gen_rows.push_back(row);
    }

    EvalOptions options;
    options.method = o->method;
    options.n_resamples = pick(o->resample_flag, o->resamples, config, "eval", "n_resamples", 2000);
    options.level = config.get<double>("eval", "level", 0.95);
    options.seed = o->common.seed;
    options.jobs = o->common.jobs;
    options.with_srmr = !o->no_srmr && config.get<bool>("eval", "with_srmr", true);
    std::vector<Waveform> dry;
    if (options.with_srmr) {
      dry = load_dry(o->dry_dir, config.get<int>("eval", "num_dry", 4), rate, o->common.seed);
    }

    const EvalReport report =
        evaluate_set(load_items(o->generated, gen_rows, rate, o->common.jobs),
                     load_items(o->reference, ref_rows, rate, o->common.jobs), dry, options);
    const nlohmann::json j = to_json(report);
    ensure_directory(parent_or_dot(o->out));
    {
      std::ofstream out(o->out, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::kIo, "cannot write " + o->out);
      out << j.dump(2) << '\n';
    }
    if (!o->csv.empty()) {
      ensure_directory(parent_or_dot(o->csv));
      std::ofstream out(o->csv, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::kIo, "cannot write " + o->csv);
      out << eval_report_csv({report});
    }
    nlohmann::json means = nlohmann::json::object();
    for (const MetricSummary& m : report.metrics) means[m.name] = j["metrics"][m.name]["mean"];
    emit_summary("eval", {{"report", o->out},
                          {"method", report.method},
                          {"num_samples", report.num_samples},
                          {"means", means}});
  });
}

}  // namespace rirkit::cli
