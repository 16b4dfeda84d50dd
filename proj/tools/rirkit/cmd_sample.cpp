#include <algorithm>
#include <cstdio>
#include <memory>
#include <optional>

#include "commands.hpp"
#include "rirkit/analyze.hpp"
#include "rirkit/codec.hpp"
#include "rirkit/error.hpp"
#include "rirkit/guidance.hpp"
#include "rirkit/manifest.hpp"
#include "rirkit/models.hpp"
#include "rirkit/ngram.hpp"
#include "rirkit/samplers.hpp"
#include "rirkit/wav_io.hpp"

namespace rirkit::cli {

namespace fs = std::filesystem;

namespace {

struct Corpus {
  std::vector<Codegram> codegrams;
  std::vector<QuantizedParams> labels;
};

Corpus encode_corpus(const fs::path& manifest, const RvqCodebooks& cb, double duration_s,
                     int jobs) {
  const Manifest rows = read_manifest(manifest);
  std::vector<QuantizedParams> labels;
  for (const ManifestRow& row : rows) {
    if (!row.valid) continue;
    if (!row.quantized) {
      throw Error(ErrorCode::kManifest, "valid row '" + row.id + "' lacks quantized params");
    }
    labels.push_back(*row.quantized);
  }
  const auto items = load_manifest_waveforms(manifest, cb.sample_rate_hz, duration_s, jobs);
  Corpus corpus;
  corpus.codegrams.resize(items.size());
  corpus.labels = std::move(labels);
  parallel_for(items.size(), jobs,
               [&](std::size_t i) { corpus.codegrams[i] = encode(items[i].second, cb); });
  if (corpus.codegrams.empty()) {
    throw Error(ErrorCode::kManifest, "no valid rows in " + manifest.string());
  }
  return corpus;
}

GuidanceConfig guidance_from(const Config& config, GuidanceMode mode, int vocab_size) {
  GuidanceConfig g;
  g.mode = mode;
  g.lambda = config.get<double>("sample", "lambda", 1.0);
  g.cfg_weight = config.get<double>("sample", "cfg_weight", 0.0);
  g.top_k = config.get<int>("sample", "top_k", std::min(64, vocab_size));
  g.temperature = config.get<double>("sample", "temperature", 1.0);
  const nlohmann::json& weights = config.section("sample").value("classifier_weights",
                                                                 nlohmann::json::object());
  for (const auto& [name, value] : weights.items()) {
    bool found = false;
    for (std::size_t slot = 0; slot < kNumSlots; ++slot) {
      if (slot_name(slot) == name) {
        g.classifier_weights[slot] = value.get<double>();
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::kConfiguration, "unknown classifier weight slot '" + name + "'");
  }
  return g;
}

}  // namespace

void add_sample(CLI::App& app) {
  struct Opts {
    CommonOptions common;
    std::string mode;
    std::string codebooks;
    std::string manifest;
    std::string targets;
    int count = 1;
    std::string out_dir;
    CLI::Option* mode_flag = nullptr;
    CLI::Option* count_flag = nullptr;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("sample", "Generate RIRs with a guided sampler");
  add_common_options(*sub, o->common);
  o->mode_flag = sub->add_option("--mode", o->mode, "Sampler")
                     ->check(CLI::IsMember({"ar-cfg", "ar-cg", "maskgit", "flow"}));
  sub->add_option("--codebooks", o->codebooks, "Codebook file")->required();
  sub->add_option("--manifest", o->manifest, "Training corpus for the reference models");
  auto* targets = sub->add_option("--targets", o->targets,
                                  "Condition on each valid row of this manifest (ids are kept)");
  o->count_flag = sub->add_option("-n,--count", o->count, "Unconditional samples")
                      ->check(CLI::PositiveNumber);
  targets->excludes(o->count_flag);
  sub->add_option("-o,--out-dir", o->out_dir, "Output directory")->required();
  sub->add_option("--jobs", o->common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->callback([o, targets] {
    const Config config = Config::load(o->common.config_path);
    const std::string mode = pick(o->mode_flag, o->mode, config, "sample", "mode", std::string("ar-cfg"));
    if (mode != "ar-cfg" && mode != "ar-cg" && mode != "maskgit" && mode != "flow") {
      throw Error(ErrorCode::kConfiguration, "unknown sampling mode '" + mode + "'");
    }
    const RvqCodebooks cb = load_codebooks(o->codebooks);
    const double duration = config.get<double>("sample", "duration_s", 2.0);
    const std::string model_kind = config.get<std::string>("sample", "model", "corpus");

    std::vector<std::string> ids;
    std::vector<std::optional<QuantizedParams>> conditions;
    if (targets->count() > 0) {
      for (const ManifestRow& row : read_manifest(o->targets)) {
        if (!row.valid || !row.quantized) continue;
        ids.push_back(row.id);
        conditions.emplace_back(*row.quantized);
      }
    } else {
      for (int i = 0; i < o->count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "sample_%04d", i);
        ids.emplace_back(id);
        conditions.emplace_back(std::nullopt);
      }
    }

    std::size_t num_frames = frames_for(seconds_to_samples(duration, cb.sample_rate_hz), cb.frame_len);
    std::size_t num_samples = seconds_to_samples(duration, cb.sample_rate_hz);
    std::optional<Codegram> oracle;
    Corpus corpus;
    if (model_kind == "oracle") {
      if (mode != "maskgit" && mode != "ar-cfg") {
        throw Error(ErrorCode::kConfiguration, "the oracle model supports maskgit and ar-cfg only");
      }
      const fs::path path = config.resolve(config.get<std::string>("sample", "oracle_codegram", ""));
      oracle = load_codegram_raw(path);
      validate(*oracle, cb);
      num_frames = oracle->num_frames;
      num_samples = oracle->num_samples;
    } else if (model_kind == "corpus") {
      if (o->manifest.empty()) {
        throw Error(ErrorCode::kConfiguration, "--manifest is required for corpus models");
      }
      corpus = encode_corpus(o->manifest, cb, duration, o->common.jobs);
    } else {
      throw Error(ErrorCode::kConfiguration, "unknown sample.model '" + model_kind + "'");
    }
    num_frames = config.get<std::size_t>("sample", "num_frames", num_frames);
    num_samples = std::min(num_samples, num_frames * static_cast<std::size_t>(cb.frame_len));

    const int steps = config.get<int>("sample", "steps", mode == "flow" ? 25 : 20);
    const std::size_t length = num_frames * static_cast<std::size_t>(cb.num_stages);
    std::unique_ptr<ArModel> ar;
    std::unique_ptr<MaskedModel> masked;
    std::unique_ptr<VelocityModel> flow;
    std::unique_ptr<ClassifierModel> classifier;
    const double scale = config.get<double>("sample", "condition_scale", 0.5);
    if (mode == "ar-cfg" || mode == "ar-cg") {
      if (oracle) {
        ar = std::make_unique<OracleArModel>(flatten(*oracle), cb.codebook_size);
      } else {
        std::vector<TokenSequence> tokens;
        for (const Codegram& c : corpus.codegrams) tokens.push_back(flatten(c));
        ar = std::make_unique<NgramModel>(tokens, config.get<int>("sample", "ngram_order", 2),
                                          cb.codebook_size,
                                          config.get<double>("sample", "ngram_smoothing", 0.1));
      }
      if (mode == "ar-cg") {
        classifier = std::make_unique<AnalyzerClassifier>(
            default_grids(), config.get<double>("sample", "classifier_sigma", 1.0));
      }
    } else if (mode == "maskgit") {
      if (oracle) {
        masked = std::make_unique<OracleMaskedModel>(*oracle, cb.codebook_size);
      } else {
        masked = std::make_unique<PositionalFrequencyModel>(
            corpus.codegrams, corpus.labels, cb.codebook_size,
            config.get<double>("sample", "smoothing", 0.5), scale);
      }
    } else {
      std::vector<LatentSequence> latents;
      for (const Codegram& c : corpus.codegrams) latents.push_back(reconstruct_latent(c, cb));
      flow = std::make_unique<EmpiricalFlowModel>(std::move(latents), corpus.labels, scale);
    }

    GuidanceConfig guidance = guidance_from(
        config, mode == "ar-cg" ? GuidanceMode::kCg : GuidanceMode::kCfg, cb.codebook_size);
    validate(guidance, cb.codebook_size);
    CgContext cg{&cb, classifier.get(), config.get<int>("sample", "cg_candidates", 8)};
    MaskgitOptions maskgit;
    maskgit.schedule.total_steps = steps;
    maskgit.cfg_weight = guidance.cfg_weight;
    maskgit.temperature = guidance.temperature;

    const fs::path out_dir(o->out_dir);
    ensure_directory(out_dir);
    Manifest rows(ids.size());
    parallel_for(ids.size(), o->common.jobs, [&](std::size_t i) {
      Rng rng(item_seed(o->common.seed, i));
      const QuantizedParams* cond = conditions[i] ? &*conditions[i] : nullptr;
      Waveform w;
      std::optional<Codegram> codes;
      if (ar) {
        const TokenSequence seq =
            ar_generate(*ar, cond, guidance, length, rng, mode == "ar-cg" ? &cg : nullptr);
        codes = unflatten(seq, cb.num_stages);
      } else if (masked) {
        codes = maskgit_generate(*masked, cond, cb.num_stages, num_frames, maskgit, rng);
      } else {
        const LatentSequence x0 = gaussian_latent(num_frames, cb.frame_len, rng);
        const LatentSequence x1 = euler_sample(*flow, x0, cond, steps, guidance.cfg_weight);
        w = latent_to_waveform(x1, cb.sample_rate_hz, num_samples);
      }
      if (codes) {
        codes->num_samples = num_samples;
        save_codegram_raw(*codes, out_dir / (ids[i] + ".rvqc"));
        w = decode(*codes, cb);
      }
      ManifestRow& row = rows[i];
      row.id = ids[i];
      row.wav_path = ids[i] + ".wav";
      write_wav(out_dir / row.wav_path, w);
      try {
        row.params = analyze(w);
        row.quantized = quantize_params(*row.params);
      } catch (const Error& e) {
        row.valid = false;
        row.exclusion_reason = std::string(error_code_name(e.code()));
      }
    });
    write_manifest(out_dir / "manifest.jsonl", rows);
    emit_summary("sample", {{"mode", mode},
                            {"model", model_kind},
                            {"count", rows.size()},
                            {"num_frames", num_frames},
                            {"out_dir", out_dir.string()},
                            {"manifest", (out_dir / "manifest.jsonl").string()}});
  });
}

}  // namespace rirkit::cli
