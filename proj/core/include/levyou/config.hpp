#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "levyou/errors.hpp"
#include "levyou/levy.hpp"
#include "levyou/linmodel.hpp"
#include "levyou/testfn.hpp"

namespace levyou {

/// Config problems map to exit code 2 in the CLI; the message carries the
/// offending field path (or the parser's line/byte diagnostics).
class ConfigError : public Error {
  public:
    using Error::Error;
};

struct SimulateParams {
    double t = 1.0;
    Eigen::VectorXd x;
    std::int64_t path_export_limit = 1000;
};

struct TvDecayParams {
    std::vector<double> t_grid;
    Eigen::VectorXd x, y;
    std::string method = "weight";  // weight | histogram | both
    bool clamp_rho0 = true;
    std::optional<Eigen::VectorXd> z0;
    std::optional<double> eps;
};

struct HarnackParams {
    int cases = 100;
    double p = 2.0;
};

struct VpParams {
    double p = 2.0;
    std::vector<double> r_grid;
};

struct RankParams {
    int m = 1;
    std::optional<double> t_max;  // run estimate_tm when present
    long tuple_samples = 10000;
};

struct FellerParams {
    int m = 1;
    double t = 1.0;
    std::vector<double> radii;
    TestFnSpec f;
    Eigen::VectorXd direction;
    Eigen::VectorXd x;
    std::optional<double> tm;  // default: estimate, or +inf when certified clean
};

struct GirsanovParams {
    double T = 1.0;
    std::vector<std::string> functionals;  // one | count | terminal_indicator
};

struct MeckeParams {
    std::vector<double> T_grid;
    std::vector<std::string> functionals;
    // indicator_box | config_count | point_norm | product_mix | inv_count
};

struct BerryEsseenParams {
    double x = 1.0;
    std::vector<double> t_grid;
};

using ExperimentParams =
    std::variant<SimulateParams, TvDecayParams, HarnackParams, VpParams, RankParams,
                 FellerParams, GirsanovParams, MeckeParams, BerryEsseenParams>;

struct ExperimentConfig {
    OUModel model;
    LevyNoise noise;
    std::string experiment_type;
    ExperimentParams params;

    std::uint64_t seed = 1;
    std::int64_t replicas = 10000;
    int workers = 1;
    std::string output_dir = "out";

    /// Canonical JSON echo (defaults filled, overrides applied); written
    /// beside the results and guaranteed to re-parse to this config.
    std::string resolved_json;
};

/// CLI-level overrides applied on top of the file values.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> replicas;
    std::optional<int> workers;
    std::optional<std::string> output_dir;
};

/// Strict parse: unknown keys anywhere in the document are rejected.
ExperimentConfig parse_config(const std::string& json_text,
                              const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const ConfigOverrides& overrides = {});

}  // namespace levyou
