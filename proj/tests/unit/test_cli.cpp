#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "rirkit/wav_io.hpp"
#include "signals.hpp"

using namespace rirkit;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(RIRKIT_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.out += buf;
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json last_line(const std::string& out) {
  std::istringstream in(out);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return nlohmann::json::parse(last);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("usage and errors") {
  CHECK(run("--help").exit_code == 0);
  CHECK(run("").exit_code == 2);
  CHECK(run("analyze --bogus x.wav").exit_code == 2);
  CHECK(run("sample --codebooks x --mode nonsense -o out").exit_code == 2);

  const RunResult missing = run("analyze /nonexistent/file.wav");
  CHECK(missing.exit_code == 1);
  const nlohmann::json j = last_line(missing.out);
  CHECK(j["status"] == "error");
  CHECK(j["error"] == "io");
  CHECK(j["command"] == "analyze");
}

TEST_CASE("analyze and quantize") {
  const fs::path dir = test::scratch_dir("cli_analyze");
  write_wav(dir / "rir.wav", test::exponential_rir(0.5));
  const RunResult a = run("analyze " + (dir / "rir.wav").string() + " -o " + (dir / "p.json").string());
  REQUIRE(a.exit_code == 0);
  const nlohmann::json summary = last_line(a.out);
  CHECK(summary["status"] == "ok");
  const nlohmann::json params = nlohmann::json::parse(slurp(dir / "p.json"));
  CHECK(params["broadband"]["t30_s"].get<double>() == doctest::Approx(0.5).epsilon(0.01));
  CHECK(params["bands"].size() == 8);

  const RunResult q = run("quantize " + (dir / "p.json").string() + " -o " + (dir / "q.json").string());
  REQUIRE(q.exit_code == 0);
  const nlohmann::json quant = nlohmann::json::parse(slurp(dir / "q.json"));
  CHECK(quant.dump().find("indices") != std::string::npos);

  const RunResult d = run("quantize --dequantize " + (dir / "q.json").string() + " -o " +
                          (dir / "d.json").string());
  REQUIRE(d.exit_code == 0);
  const nlohmann::json centers = nlohmann::json::parse(slurp(dir / "d.json"));
  CHECK(centers.dump().find("t30_s") != std::string::npos);
}

TEST_CASE("seeded synthesis is reproducible") {
  const fs::path a = test::scratch_dir("cli_synth_a");
  const fs::path b = test::scratch_dir("cli_synth_b");
  for (const fs::path& d : {a, b}) {
    const RunResult r = run("synth --random 2 --duration 1 --seed 5 -o " + d.string());
    REQUIRE(r.exit_code == 0);
    CHECK(last_line(r.out)["status"] == "ok");
  }
  std::size_t wavs = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".wav") continue;
    ++wavs;
    CHECK(test::file_hash(e.path()) == test::file_hash(b / e.path().filename()));
  }
  CHECK(wavs == 2);
  CHECK(slurp(a / "manifest.jsonl") == slurp(b / "manifest.jsonl"));

  CHECK(run("synth --random 1 --params x.json -o " + a.string()).exit_code == 2);
  CHECK(run("synth -o " + a.string()).exit_code == 2);
}

TEST_CASE("config file values apply and flags override them") {
  const fs::path dir = test::scratch_dir("cli_config");
  std::ofstream(dir / "cfg.json") << "{\n  // comments are allowed\n  \"synth\": {\"duration_s\": 0.5}\n}\n";
  const RunResult r = run("synth --random 1 --config " + (dir / "cfg.json").string() + " -o " +
                          (dir / "out").string());
  REQUIRE(r.exit_code == 0);
  fs::path wav;
  for (const auto& e : fs::directory_iterator(dir / "out")) {
    if (e.path().extension() == ".wav") wav = e.path();
  }
  REQUIRE_FALSE(wav.empty());
  CHECK(read_wav(wav).waveform.size() == 22050);

  const RunResult o = run("synth --random 1 --duration 0.25 --config " + (dir / "cfg.json").string() +
                          " -o " + (dir / "out2").string());
  REQUIRE(o.exit_code == 0);
  for (const auto& e : fs::directory_iterator(dir / "out2")) {
    if (e.path().extension() == ".wav") CHECK(read_wav(e.path()).waveform.size() == 11025);
  }

  std::ofstream(dir / "bad.json") << "{\"synth\": {\"duration_s\": \"long\"}}";
  const RunResult bad = run("synth --random 1 --config " + (dir / "bad.json").string() + " -o " +
                            (dir / "out3").string());
  CHECK(bad.exit_code == 1);
  CHECK(last_line(bad.out)["error"] == "configuration");
}
