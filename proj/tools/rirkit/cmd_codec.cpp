#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "rirkit/analyze.hpp"
#include "rirkit/codec.hpp"
#include "rirkit/error.hpp"
#include "rirkit/manifest.hpp"
#include "rirkit/params.hpp"
#include "rirkit/resample.hpp"
#include "rirkit/wav_io.hpp"

namespace rirkit::cli {

namespace fs = std::filesystem;

namespace {

fs::path parent_or_dot(const fs::path& p) {
  return p.has_parent_path() ? p.parent_path() : fs::path(".");
}

bool is_json_path(const fs::path& p) { return p.extension() == ".json"; }

Codegram load_codegram(const fs::path& p) {
  if (!is_json_path(p)) return load_codegram_raw(p);
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return codegram_from_json(ss.str());
}

void save_codegram(const Codegram& c, const fs::path& p) {
  if (!is_json_path(p)) {
    save_codegram_raw(c, p);
    return;
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  out << codegram_to_json(c) << '\n';
}

// Waveform of one file at the codebooks' rate.
Waveform load_for_codec(const fs::path& wav, int rate) {
  Waveform w = read_wav(wav).waveform;
  if (w.sample_rate_hz != rate) w = resample(w, rate);
  return w;
}

double snr_db(const Waveform& ref, const Waveform& test) {
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double t = i < test.size() ? test.samples[i] : 0.0;
    signal += ref.samples[i] * ref.samples[i];
    noise += (ref.samples[i] - t) * (ref.samples[i] - t);
  }
  if (noise <= 0.0) return 999.0;
  return 10.0 * std::log10(signal / noise);
}

}  // namespace

std::vector<std::pair<std::string, Waveform>> load_manifest_waveforms(const fs::path& manifest,
                                                                      int rate, double duration_s,
                                                                      int jobs) {
  const Manifest rows = read_manifest(manifest);
  std::vector<const ManifestRow*> valid;
  for (const ManifestRow& row : rows) {
    if (row.valid) valid.push_back(&row);
  }
  std::vector<std::pair<std::string, Waveform>> out(valid.size());
  const fs::path base = parent_or_dot(manifest);
  const std::size_t n = seconds_to_samples(duration_s, rate);
  parallel_for(valid.size(), jobs, [&](std::size_t i) {
    out[i] = {valid[i]->id, fit_length(load_row_waveform(*valid[i], base, rate), n)};
  });
  return out;
}

void add_codec(CLI::App& app) {
  CLI::App* codec = app.add_subcommand("codec", "Residual-VQ codec: train, encode, decode");
  codec->require_subcommand(1);

  struct TrainOpts {
    CommonOptions common;
    std::string manifest;
    std::string out;
    RvqTrainOptions train;
    int session_rate = kDefaultSessionRateHz;
    double duration_s = 2.0;
    CLI::Option* stages = nullptr;
    CLI::Option* size = nullptr;
    CLI::Option* frame = nullptr;
    CLI::Option* iters = nullptr;
    CLI::Option* rate = nullptr;
  };
  auto t = std::make_shared<TrainOpts>();
  CLI::App* train = codec->add_subcommand("train", "Train codebooks on a manifest's valid rows");
  add_common_options(*train, t->common);
  train->add_option("--manifest", t->manifest, "Training manifest")->required();
  train->add_option("-o,--out", t->out, "Codebook file")->required();
  train->add_option("--jobs", t->common.jobs, "Loader threads")->check(CLI::PositiveNumber);
  t->stages = train->add_option("--stages", t->train.num_stages, "Number of RVQ stages");
  t->size = train->add_option("--codebook-size", t->train.codebook_size, "Codes per stage");
  t->frame = train->add_option("--frame-len", t->train.frame_len, "Samples per frame");
  t->iters = train->add_option("--iterations", t->train.lloyd_iterations, "Lloyd iterations");
  t->rate = train->add_option("--session-rate", t->session_rate, "Session sample rate (Hz)");
  train->callback([t] {
    const Config config = Config::load(t->common.config_path);
    RvqTrainOptions opts;
    opts.num_stages = pick(t->stages, t->train.num_stages, config, "codec", "num_stages", 4);
    opts.codebook_size = pick(t->size, t->train.codebook_size, config, "codec", "codebook_size", 256);
    opts.frame_len = pick(t->frame, t->train.frame_len, config, "codec", "frame_len", 512);
    opts.lloyd_iterations =
        pick(t->iters, t->train.lloyd_iterations, config, "codec", "lloyd_iterations", 20);
    opts.seed = t->common.seed;
    const int rate =
        pick(t->rate, t->session_rate, config, "codec", "session_rate_hz", kDefaultSessionRateHz);
    const double duration = config.get<double>("codec", "duration_s", 2.0);

    std::vector<Waveform> corpus;
    for (auto& [id, w] : load_manifest_waveforms(t->manifest, rate, duration, t->common.jobs)) {
      corpus.push_back(std::move(w));
    }
    if (corpus.empty()) throw Error(ErrorCode::kManifest, "no valid rows in " + t->manifest);
    const RvqCodebooks cb = train_rvq(corpus, opts);
    ensure_directory(parent_or_dot(t->out));
    save_codebooks(cb, t->out);
    emit_summary("codec train", {{"codebooks", t->out},
                                 {"items", corpus.size()},
                                 {"frames", count_frames(corpus, cb.frame_len)},
                                 {"num_stages", cb.num_stages},
                                 {"codebook_size", cb.codebook_size},
                                 {"frame_len", cb.frame_len},
                                 {"sample_rate_hz", cb.sample_rate_hz}});
  });

  struct EncodeOpts {
    CommonOptions common;
    std::string codebooks;
    std::string input;
    std::string manifest;
    std::string out;
    std::string format = "raw";
  };
  auto e = std::make_shared<EncodeOpts>();
  CLI::App* encode_cmd = codec->add_subcommand("encode", "Encode WAVs to codegrams");
  add_common_options(*encode_cmd, e->common);
  encode_cmd->add_option("--codebooks", e->codebooks, "Codebook file")->required();
  auto* input = encode_cmd->add_option("--input", e->input, "One WAV file");
  auto* manifest = encode_cmd->add_option("--manifest", e->manifest, "All valid rows of a manifest");
  input->excludes(manifest);
  encode_cmd->add_option("-o,--out", e->out,
                         "Codegram file for --input, output directory for --manifest")
      ->required();
  encode_cmd->add_option("--format", e->format, "Codegram format for --manifest")
      ->check(CLI::IsMember({"raw", "json"}));
  encode_cmd->add_option("--jobs", e->common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  encode_cmd->callback([e, input, manifest] {
    if (input->count() + manifest->count() == 0) {
      throw CLI::RequiredError("one of --input, --manifest");
    }
    const Config config = Config::load(e->common.config_path);
    const RvqCodebooks cb = load_codebooks(e->codebooks);
    if (input->count() > 0) {
      const Waveform w = load_for_codec(e->input, cb.sample_rate_hz);
      const Codegram c = encode(w, cb);
      ensure_directory(parent_or_dot(e->out));
      save_codegram(c, e->out);
      emit_summary("codec encode", {{"codegram", e->out},
                                    {"num_frames", c.num_frames},
                                    {"snr_db", snr_db(w, decode(c, cb))}});
      return;
    }
    const double duration = config.get<double>("codec", "duration_s", 2.0);
    const auto items =
        load_manifest_waveforms(e->manifest, cb.sample_rate_hz, duration, e->common.jobs);
    const fs::path out_dir(e->out);
    ensure_directory(out_dir);
    const std::string ext = e->format == "json" ? ".json" : ".rvqc";
    parallel_for(items.size(), e->common.jobs, [&](std::size_t i) {
      save_codegram(encode(items[i].second, cb), out_dir / (items[i].first + ext));
    });
    emit_summary("codec encode", {{"out_dir", out_dir.string()}, {"count", items.size()}});
  });

  struct DecodeOpts {
    CommonOptions common;
    std::string codebooks;
    std::string input;
    std::string out;
    int stages = -1;
  };
  auto d = std::make_shared<DecodeOpts>();
  CLI::App* decode_cmd = codec->add_subcommand("decode", "Decode codegrams to WAVs");
  add_common_options(*decode_cmd, d->common);
  decode_cmd->add_option("--codebooks", d->codebooks, "Codebook file")->required();
  decode_cmd->add_option("--input", d->input, "Codegram file or directory of codegrams")
      ->required();
  decode_cmd->add_option("-o,--out", d->out, "WAV file, or output directory for a directory input")
      ->required();
  decode_cmd->add_option("--stages", d->stages, "Use only the first N stages");
  decode_cmd->add_option("--jobs", d->common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  decode_cmd->callback([d] {
    const RvqCodebooks cb = load_codebooks(d->codebooks);
    if (!fs::is_directory(d->input)) {
      const Codegram c = load_codegram(d->input);
      validate(c, cb);
      ensure_directory(parent_or_dot(d->out));
      write_wav(d->out, decode(c, cb, d->stages));
      emit_summary("codec decode", {{"wav", d->out}, {"num_frames", c.num_frames}});
      return;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(d->input)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".rvqc" || ext == ".json")) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(ErrorCode::kIo, "no codegrams in " + d->input);
    const fs::path out_dir(d->out);
    ensure_directory(out_dir);
    Manifest rows(files.size());
    parallel_for(files.size(), d->common.jobs, [&](std::size_t i) {
      const Codegram c = load_codegram(files[i]);
      validate(c, cb);
      const Waveform w = decode(c, cb, d->stages);
      ManifestRow& row = rows[i];
      row.id = files[i].stem().string();
      row.wav_path = row.id + ".wav";
      write_wav(out_dir / row.wav_path, w);
      try {
        row.params = analyze(w);
        row.quantized = quantize_params(*row.params);
      } catch (const Error& err) {
        row.valid = false;
        row.exclusion_reason = std::string(error_code_name(err.code()));
      }
    });
    write_manifest(out_dir / "manifest.jsonl", rows);
    emit_summary("codec decode", {{"out_dir", out_dir.string()},
                                  {"count", rows.size()},
                                  {"manifest", (out_dir / "manifest.jsonl").string()}});
  });
}

}  // namespace rirkit::cli
