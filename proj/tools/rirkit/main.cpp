#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <vector>
#include <exception>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "rirkit/error.hpp"

namespace rirkit::cli {

void add_common_options(CLI::App& sub, CommonOptions& common) {
  sub.add_option("--seed", common.seed, "Random seed")->capture_default_str();
  sub.add_option("--config", common.config_path, "JSON config file")->envname("RIRKIT_CONFIG");
}

void emit_summary(const std::string& command, nlohmann::json fields) {
  nlohmann::json line = {{"command", command}, {"status", "ok"}};
  line.update(fields);
  std::cout << line.dump() << std::endl;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

std::uint64_t item_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1)));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rirkit::cli

int main(int argc, char** argv) {
  using namespace rirkit::cli;
  CLI::App app{"rirkit: room impulse response analysis, synthesis and generation toolkit"};
  app.require_subcommand(1);
  add_ingest(app);
  add_analyze(app);
  add_quantize(app);
  add_synth(app);
  add_codec(app);
  add_sample(app);
  add_eval(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::string command = "rirkit";
    for (const CLI::App* sub : app.get_subcommands()) command = sub->get_name();
    nlohmann::json line = {{"command", command}, {"status", "error"}, {"message", e.what()}};
    if (const auto* err = dynamic_cast<const rirkit::Error*>(&e)) {
      line["error"] = std::string(rirkit::error_code_name(err->code()));
    }
    std::cerr << "rirkit " << command << ": " << e.what() << '\n';
    std::cout << line.dump() << std::endl;
    return 1;
  }
  return 0;
}
