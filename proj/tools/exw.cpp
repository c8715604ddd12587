#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "excluwall/excluwall.h"

namespace {

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::string out_dir = ".";
  unsigned replicas_in_flight = 1;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inserts or checks the "experiment" key without reformatting the rest of the text.
std::string with_experiment(const std::string& text, const std::string& experiment) {
  const auto brace = text.find('{');
  if (brace == std::string::npos) return text;
  if (text.find("\"experiment\"") != std::string::npos) return text;
  const auto rest = text.find_first_not_of(" \t\r\n", brace + 1);
  const bool empty = rest != std::string::npos && text[rest] == '}';
  return text.substr(0, brace + 1) + "\"experiment\":\"" + experiment + "\"" + (empty ? "" : ",") +
         text.substr(brace + 1);
}

int run(const std::string& experiment, const Flags& flags, const CLI::App& sub) {
  std::string text;
  if (!flags.config.empty()) {
    text = read_file(flags.config);
  } else if (experiment == "selfcheck") {
    text = "{}";
  } else {
    std::cerr << "exw " << experiment << ": --config is required\n";
    return 1;
  }
  if (!experiment.empty()) text = with_experiment(text, experiment);

  exw_run_options opts{};
  if (sub.count("--seed") > 0) {
    opts.seed = flags.seed;
    opts.has_seed = 1;
  } else if (const char* env = std::getenv("EXCLUWALL_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    opts.seed = std::strtoull(env, &end, 10);
    if (*end != '\0') {
      std::cerr << "exw: EXCLUWALL_SEED must be an unsigned integer\n";
      return 1;
    }
    opts.has_seed = 1;
  }
  opts.samples = flags.samples;
  opts.replicas_in_flight = flags.replicas_in_flight;

  exw_result* result = nullptr;
  if (const exw_status st = exw_run_experiment(text.c_str(), &opts, &result); st != EXW_OK) {
    std::cerr << "exw: " << exw_last_error() << "\n";
    return 1;
  }
  std::filesystem::create_directories(flags.out_dir);
  for (size_t i = 0; i < exw_result_artifact_count(result); ++i) {
    size_t len = 0;
    const char* data = exw_result_artifact_data(result, i, &len);
    const auto path = std::filesystem::path(flags.out_dir) / exw_result_artifact_name(result, i);
    std::ofstream os(path, std::ios::binary);
    os.write(data, static_cast<std::streamsize>(len));
    if (!os) {
      std::cerr << "exw: cannot write " << path << "\n";
      exw_result_destroy(result);
      return 1;
    }
    if (!flags.quiet) std::cout << path.string() << "\n";
  }
  const bool verified = exw_result_verified(result) != 0;
  if (!flags.quiet) std::cout << (verified ? "verified" : "VERIFICATION FAILED") << "\n";
  exw_result_destroy(result);
  return verified ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exclusion process with a moving wall: simulation and verification runs."};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::string> names = {"simulate", "verify-identity", "verify-coupling", "colour-position",
                                          "density",  "fluctuations",    "classify",        "selfcheck"};
  std::vector<std::pair<std::string, CLI::App*>> subs;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "base seed (default: EXCLUWALL_SEED, then the config's seed, then 0)");
    sub->add_option("--samples", flags.samples, "override the sample or replica count");
    sub->add_option("--out-dir", flags.out_dir, "directory for CSV and JSON outputs")->capture_default_str();
    sub->add_option("--replicas-in-flight", flags.replicas_in_flight, "worker threads; outputs do not depend on it")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_flag("--quiet,-q", flags.quiet, "print nothing on success");
  };
  for (const auto& name : names) {
    const char* help = exw_experiment_help(name.c_str());
    CLI::App* sub = app.add_subcommand(name, std::string(help).substr(0, std::string(help).find('\n')));
    sub->footer(help);
    add_common(sub);
    subs.emplace_back(name, sub);
  }
  CLI::App* run_sub = app.add_subcommand("run", "run the experiment named by the config's \"experiment\" key");
  add_common(run_sub);
  run_sub->get_option("--config")->required();
  subs.emplace_back("", run_sub);

  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) return run(name, flags, *sub);
    }
  } catch (const std::exception& e) {
    std::cerr << "exw: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
