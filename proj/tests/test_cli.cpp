#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "levyou/config.hpp"
#include "levyou/experiment.hpp"

using namespace levyou;

namespace {

std::string minimal_config(const std::string& experiment, const std::string& outdir) {
    std::ostringstream os;
    os << R"({
  "model": {"A": [[0.0]], "B": [[1.0]]},
  "noise": {"jump0": {"family": "gaussian", "dim": 1, "sigma2": 1.0, "lambda0": 1.0}},
  "experiment": )"
       << experiment << R"(,
  "seed": 7, "replicas": 2000, "workers": 2, "output_dir": ")"
       << outdir << R"("
})";
    return os.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config parses a minimal document and applies overrides") {
    const std::string text = minimal_config(
        R"({"type": "simulate", "t": 1.0, "x": [0.0]})", "/tmp/levyou_test_sim");
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.experiment_type == "simulate");
    CHECK(cfg.seed == 7);
    CHECK(cfg.replicas == 2000);
    CHECK(cfg.model.n() == 1);

    ConfigOverrides ov;
    ov.seed = 99;
    ov.replicas = 10;
    ov.workers = 1;
    ov.output_dir = "/tmp/elsewhere";
    const ExperimentConfig over = parse_config(text, ov);
    CHECK(over.seed == 99);
    CHECK(over.replicas == 10);
    CHECK(over.output_dir == "/tmp/elsewhere");
}

TEST_CASE("unknown keys are rejected everywhere") {
    CHECK_THROWS_AS(parse_config(R"({"model": {}, "noise": {}, "experiment": {}, "bogus": 1})"),
                    ConfigError);
    const std::string nested = R"({
      "model": {"A": [[0.0]], "B": [[1.0]], "C": [[1.0]]},
      "noise": {"jump0": {"family": "gaussian", "dim": 1, "sigma2": 1, "lambda0": 1}},
      "experiment": {"type": "simulate", "t": 1}
    })";
    CHECK_THROWS_AS(parse_config(nested), ConfigError);
    const std::string in_density = R"({
      "model": {"A": [[0.0]], "B": [[1.0]]},
      "noise": {"jump0": {"family": "gaussian", "dim": 1, "sigma2": 1, "lambda0": 1, "mu": 0}},
      "experiment": {"type": "simulate", "t": 1}
    })";
    CHECK_THROWS_AS(parse_config(in_density), ConfigError);
}

TEST_CASE("malformed JSON and bad values give ConfigError") {
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal_config(R"({"type": "unknown-kind"})", "o")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(minimal_config(R"({"type": "tv-decay"})", "o")),
                    ConfigError);  // missing t_grid / x / y
    // model/noise dimension mismatch
    const std::string mismatch = R"({
      "model": {"A": [[0.0]], "B": [[1.0]]},
      "noise": {"jump0": {"family": "gaussian", "dim": 2, "sigma2": 1, "lambda0": 1}},
      "experiment": {"type": "simulate", "t": 1}
    })";
    CHECK_THROWS_AS(parse_config(mismatch), ConfigError);
}

TEST_CASE("resolved config echo round-trips to an identical config") {
    const std::string text = minimal_config(
        R"({"type": "tv-decay", "t_grid": [2.0, 8.0], "x": [0.3], "y": [0.0], "method": "weight"})",
        "/tmp/levyou_test_echo");
    const ExperimentConfig cfg = parse_config(text);
    const ExperimentConfig again = parse_config(cfg.resolved_json);
    CHECK(again.resolved_json == cfg.resolved_json);
    CHECK(again.experiment_type == cfg.experiment_type);
    CHECK(again.seed == cfg.seed);
    CHECK(again.replicas == cfg.replicas);
}

TEST_CASE("run(simulate) writes the expected artifacts") {
    const std::string outdir = "/tmp/levyou_test_run_sim";
    std::filesystem::remove_all(outdir);
    const ExperimentConfig cfg = parse_config(minimal_config(
        R"({"type": "simulate", "t": 1.0, "x": [0.0], "path_export_limit": 10})", outdir));
    const RunResult result = run(cfg);
    CHECK(result.all_pass);
    CHECK(std::filesystem::exists(outdir + "/results.csv"));
    CHECK(std::filesystem::exists(outdir + "/paths.csv"));
    CHECK(std::filesystem::exists(outdir + "/summary.json"));
    CHECK(std::filesystem::exists(outdir + "/resolved_config.json"));
    const std::string results = slurp(outdir + "/results.csv");
    CHECK(results.rfind("replica,x0", 0) == 0);  // header row first
    const std::string paths = slurp(outdir + "/paths.csv");
    CHECK(paths.rfind("replica,jump_index,time,size0", 0) == 0);
    // resolved echo re-parses
    const ExperimentConfig echo = parse_config(slurp(outdir + "/resolved_config.json"));
    CHECK(echo.resolved_json == cfg.resolved_json);
}

TEST_CASE("run(tv-decay) rejects non-dissipative drift as a precondition") {
    const std::string text = R"({
      "model": {"A": [[0.0, 1.0], [1.0, 0.0]], "B": [[1.0, 0.0], [0.0, 1.0]]},
      "noise": {"jump0": {"family": "gaussian", "dim": 2, "sigma2": 1, "lambda0": 1}},
      "experiment": {"type": "tv-decay", "t_grid": [1.0], "x": [0.1, 0.0], "y": [0.0, 0.0]},
      "replicas": 100, "output_dir": "/tmp/levyou_test_dissip"
    })";
    CHECK_THROWS_AS(run(parse_config(text)), PreconditionError);
}

TEST_CASE("run(rank) emits the report and consistency assertions") {
    const std::string outdir = "/tmp/levyou_test_rank";
    std::filesystem::remove_all(outdir);
    const std::string text = R"({
      "model": {"A": [[0.0, 1.0], [1.0, 0.0]], "B": [[0.0], [1.0]]},
      "noise": {"jump0": {"family": "gaussian", "dim": 1, "sigma2": 1, "lambda0": 1}},
      "experiment": {"type": "rank", "m": 2, "t_max": 3.0, "tuple_samples": 1000},
      "output_dir": ")" + outdir + R"("
    })";
    const RunResult result = run(parse_config(text));
    CHECK(result.all_pass);
    const std::string report = slurp(outdir + "/rank_report.json");
    CHECK(report.find("\"satisfied\": true") != std::string::npos);
    CHECK(report.find("\"tm_lower\": 3.0") != std::string::npos);
}

TEST_CASE("run(vp) tabulates the profile with its invariants") {
    const std::string outdir = "/tmp/levyou_test_vp";
    std::filesystem::remove_all(outdir);
    const ExperimentConfig cfg = parse_config(minimal_config(
        R"({"type": "vp", "p": 2.0, "r_grid": [0.0, 0.5, 1.0]})", outdir));
    const RunResult result = run(cfg);
    CHECK(result.all_pass);
    const std::string csv = slurp(outdir + "/results.csv");
    CHECK(csv.rfind("r,vp", 0) == 0);
}

TEST_CASE("run(vp) writes the literal 'inf' for divergent values") {
    const std::string outdir = "/tmp/levyou_test_vp_inf";
    std::filesystem::remove_all(outdir);
    const std::string text = R"({
      "model": {"A": [[0.0]], "B": [[1.0]]},
      "noise": {"jump0": {"family": "tabulated", "grid": [-1.0, 0.0, 1.0],
                           "values": [0.0, 1.0, 0.0]}},
      "experiment": {"type": "vp", "p": 2.0, "r_grid": [0.0, 0.5]},
      "output_dir": ")" + outdir + R"("
    })";
    run(parse_config(text));
    const std::string csv = slurp(outdir + "/results.csv");
    CHECK(csv.find("0.5,inf") != std::string::npos);
}

TEST_CASE("run(girsanov-check) emits the CSV contract") {
    const std::string outdir = "/tmp/levyou_test_gir";
    std::filesystem::remove_all(outdir);
    const ExperimentConfig cfg = parse_config(minimal_config(
        R"({"type": "girsanov-check", "T": 1.0, "functionals": ["one", "count"]})", outdir));
    const RunResult result = run(cfg);
    const std::string csv = slurp(outdir + "/results.csv");
    CHECK(csv.rfind("test_name,lhs_mean,lhs_stderr,rhs_mean,rhs_stderr,z_score,pass", 0) == 0);
    CHECK(result.assertions.size() >= 3);  // one, one_closed_form, count
}
