#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "excluwall/asymptotics.hpp"
#include "excluwall/dynamics.hpp"
#include "excluwall/identities.hpp"
#include "excluwall/multispecies.hpp"
#include "excluwall/stats.hpp"

namespace excluwall {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Artifact {
  std::string name;
  std::string data;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  unsigned threads = 1;
};

struct RunResult {
  bool verified = true;
  json report;
  std::vector<Artifact> artifacts;
};

RunResult run_experiment(const json& config, const RunOptions& options);
RunResult run_selfcheck();
// nullptr for unknown experiments.
const char* experiment_help(std::string_view experiment);

// FNV-1a over the compact dump of the config.
std::uint64_t config_digest(const json& config);

// ---------------------------------------------------------------------------
// Config pieces shared with the tests.

InitialConditionSpec parse_ic(const json& j, std::size_t n_max);
// Absent or "none" -> nullopt. {"preset": "demo_wall"} uses T.
std::optional<PiecewiseFn> parse_wall(const json& j, double T);

// ---------------------------------------------------------------------------
// Experiment kernels.

// Random strictly decreasing positions with u_1 in [-3, 0] and gaps in [0, 3].
std::vector<Site> random_ic(std::mt19937_64& rng, std::size_t n);

struct MarginalCase {
  bool equal = true;
  std::size_t events = 0;
};

// Runs the multi-species process from pi(id) (packed when u is a step) with
// the wall admissibility z+1 <= f(t) and compares, after every event, the
// n rightmost occupied sites at cutoff u_n + n - 1 with the single-species run.
MarginalCase marginal_consistency(std::span<const Site> u, const PiecewiseFn* f, double T,
                                  std::uint64_t seed);

struct DensityRun {
  DensityProfile profile;
  std::vector<double> predicted;  // empty unless a closed form applies
  std::vector<bool> scored;       // bins outside the kink margins
  double sup_error = 0.0;
};

DensityRun density_run(const InitialConditionSpec& ic, const PiecewiseFn* f, double T,
                       std::size_t replicas, Site bin_width, Site lo, Site hi, double margin_factor,
                       std::uint64_t seed, unsigned threads);

struct ShockProbe {
  double alpha = 0.0;
  double xi = 0.0;
  double rho_left = 0.0;
  double rho_right = 0.0;
  ShockDensities predicted;
  double mean_position = 0.0;
  Site window = 0;
};

// Densities in windows of T^{2/3} sites left and right of particle alpha T,
// averaged over replicas.
ShockProbe shock_probe(const InitialConditionSpec& ic, double d, const PiecewiseFn* f, double T,
                       double alpha, std::size_t replicas, std::uint64_t seed, unsigned threads);

struct DecouplingRun {
  double T = 0.0;
  std::size_t label = 0;
  double discrepancy = 0.0;
  double band = 0.0;
  std::vector<double> grid;  // s values
  std::vector<double> s_lhs, s_comp1, s_comp2;
};

DecouplingRun decoupling_run(const InitialConditionSpec& ic, const PiecewiseFn& f, double T,
                             double alpha, double xi, std::span<const double> S_grid,
                             std::size_t samples, std::uint64_t seed, unsigned threads,
                             double level = 0.99);

// S = (xi T - x_{alpha T}(T)) / T^{1/3} samples.
std::vector<double> tagged_samples(const InitialConditionSpec& ic, const PiecewiseFn* f, double T,
                                   double alpha, double xi, std::size_t samples, std::uint64_t seed,
                                   unsigned threads);

// X_T(tau) samples (replica-major).
std::vector<std::vector<double>> fixed_time_samples(double alpha, double T,
                                                    std::span<const double> tau,
                                                    std::size_t samples, std::uint64_t seed,
                                                    unsigned threads);

}  // namespace excluwall
