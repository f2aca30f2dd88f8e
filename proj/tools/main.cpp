#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "levyou/config.hpp"
#include "levyou/errors.hpp"
#include "levyou/experiment.hpp"

namespace {

// Exit codes: 0 all assertions pass, 1 assertion failures, 2 config/usage
// errors, 3 precondition (hypothesis) failures.
constexpr int kExitAssertionFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;

struct GlobalFlags {
    std::string config_path;
    std::optional<double> seed;
    std::optional<double> replicas;
    std::optional<double> workers;
    std::optional<std::string> out;
};

void add_common_flags(CLI::App* cmd, GlobalFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--seed", flags.seed, "Override the config seed");
    cmd->add_option("--replicas", flags.replicas, "Override the replica count");
    cmd->add_option("--workers", flags.workers, "Override the worker count");
    cmd->add_option("--out", flags.out, "Override the output directory");
}

int execute(const GlobalFlags& flags, const std::string& subcommand) {
    levyou::ConfigOverrides overrides;
    if (flags.seed) overrides.seed = static_cast<std::uint64_t>(*flags.seed);
    if (flags.replicas) overrides.replicas = static_cast<std::int64_t>(*flags.replicas);
    if (flags.workers) overrides.workers = static_cast<int>(*flags.workers);
    if (flags.out) overrides.output_dir = *flags.out;

    levyou::ExperimentConfig config;
    try {
        config = levyou::load_config(flags.config_path, overrides);
    } catch (const levyou::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    if (config.experiment_type != subcommand) {
        std::fprintf(stderr, "error: config experiment type '%s' does not match subcommand '%s'\n",
                     config.experiment_type.c_str(), subcommand.c_str());
        return kExitConfig;
    }

    try {
        const levyou::RunResult result = levyou::run(config);
        for (const auto& a : result.assertions) {
            std::printf("[%s] %s%s%s\n", a.pass ? "PASS" : "FAIL", a.name.c_str(),
                        a.detail.empty() ? "" : " — ", a.detail.c_str());
        }
        std::printf("results written to %s\n", result.output_dir.c_str());
        return result.all_pass ? 0 : kExitAssertionFail;
    } catch (const levyou::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const levyou::PreconditionError& e) {
        std::fprintf(stderr, "precondition failed: %s\n", e.what());
        return kExitPrecondition;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitAssertionFail;
    }
}

}  // namespace

// One experiment per invocation; a batch is a manifest file listing config
// paths (one per line, '#' comments allowed), each run in sequence.
int run_batch(const std::string& manifest_path, const GlobalFlags& flags) {
    std::ifstream manifest(manifest_path);
    if (!manifest) {
        std::fprintf(stderr, "error: cannot open manifest %s\n", manifest_path.c_str());
        return kExitConfig;
    }
    levyou::ConfigOverrides overrides;
    if (flags.seed) overrides.seed = static_cast<std::uint64_t>(*flags.seed);
    if (flags.replicas) overrides.replicas = static_cast<std::int64_t>(*flags.replicas);
    if (flags.workers) overrides.workers = static_cast<int>(*flags.workers);

    int worst = 0;
    std::string line;
    while (std::getline(manifest, line)) {
        const auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        const std::string path = line.substr(start);
        std::printf("== %s ==\n", path.c_str());
        try {
            const levyou::ExperimentConfig config = levyou::load_config(path, overrides);
            const levyou::RunResult result = levyou::run(config);
            for (const auto& a : result.assertions) {
                std::printf("[%s] %s%s%s\n", a.pass ? "PASS" : "FAIL", a.name.c_str(),
                            a.detail.empty() ? "" : " — ", a.detail.c_str());
            }
            if (!result.all_pass) worst = std::max(worst, kExitAssertionFail);
        } catch (const levyou::ConfigError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            worst = std::max(worst, kExitConfig);
        } catch (const levyou::PreconditionError& e) {
            std::fprintf(stderr, "precondition failed: %s\n", e.what());
            worst = std::max(worst, kExitPrecondition);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            worst = std::max(worst, kExitAssertionFail);
        }
    }
    return worst;
}

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification toolkit for linear SDEs driven by Levy jump noise"};
    app.require_subcommand(1);

    const char* subcommands[] = {"simulate",       "tv-decay",    "harnack",
                                 "vp",             "rank",        "feller",
                                 "girsanov-check", "mecke-check", "berry-esseen"};
    const char* descriptions[] = {
        "Sample terminal states and export jump paths",
        "Coupling TV upper bound / histogram TV over a time grid",
        "Randomized Harnack-inequality suite",
        "Tabulate the V_p integral over a radius grid",
        "Controllability rank report and t_m lower bound",
        "Strong-Feller smoothing modulus",
        "Conditional Girsanov identity checks",
        "Mecke identity checks",
        "sqrt(t)-scaled TV sharpness experiment",
    };

    std::vector<GlobalFlags> flags(std::size(subcommands));
    for (std::size_t i = 0; i < std::size(subcommands); ++i) {
        CLI::App* cmd = app.add_subcommand(subcommands[i], descriptions[i]);
        add_common_flags(cmd, flags[i]);
    }

    GlobalFlags batch_flags;
    std::string manifest_path;
    CLI::App* batch = app.add_subcommand("batch", "Run every config listed in a manifest file");
    batch->add_option("--manifest", manifest_path, "Text file with one config path per line")
        ->required();
    batch->add_option("--seed", batch_flags.seed, "Override every config's seed");
    batch->add_option("--replicas", batch_flags.replicas, "Override every config's replicas");
    batch->add_option("--workers", batch_flags.workers, "Override every config's workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (batch->parsed()) return run_batch(manifest_path, batch_flags);
    for (std::size_t i = 0; i < std::size(subcommands); ++i) {
        if (app.get_subcommand(subcommands[i])->parsed()) {
            return execute(flags[i], subcommands[i]);
        }
    }
    return kExitConfig;
}
