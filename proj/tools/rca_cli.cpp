// rca <command> --config job.json [--out dir] [--threads N] [--seed-free]
//
// Exit status: 0 ok, 2 bad config or usage, 3 computation failed.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "rca/jobs.hpp"
#include "rca/parallel.hpp"

namespace fs = std::filesystem;
using namespace rca::jobs;

int main(int argc, char** argv) {
  CLI::App app{"Rational and polynomial approximation on sampled compact sets"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  unsigned threads = 1;
  bool seed_free = false;
  bool quiet = false;

  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "job description (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (default: $RCA_OUTPUT_DIR or ./rca-out)");
    sub->add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::Range(0u, 1024u));
    // every algorithm is deterministic; the flag is accepted for scripts that pass it anyway
    sub->add_flag("--seed-free", seed_free, "assert that no random numbers are used");
    sub->add_flag("-q,--quiet", quiet, "do not print the result document");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (out.empty()) {
    const char* env = std::getenv("RCA_OUTPUT_DIR");
    out = env && *env ? env : "rca-out";
  }
  rca::set_thread_count(threads);

  JobOutcome outcome;
  try {
    const Json cfg = load_json(config);
    outcome = run_job(command, cfg, fs::path(config).parent_path());
  } catch (const ConfigError& e) {
    std::cerr << "rca " << command << ": " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    write_outputs(outcome, out);
  } catch (const std::exception& e) {
    std::cerr << "rca " << command << ": " << e.what() << "\n";
    return kExitFailure;
  }
  if (!quiet) std::cout << dump_result(outcome.result);
  for (const auto& d : outcome.result["diagnostics"])
    std::cerr << "rca " << command << ": " << d["module"].get<std::string>() << ": " << d["reason"].get<std::string>()
              << "\n";
  return outcome.exit_code;
}
