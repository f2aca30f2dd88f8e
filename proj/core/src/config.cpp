#include "levyou/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace levyou {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

// Unknown keys are configuration bugs, not extensions.
void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    require_object(j, path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double get_field_number(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) fail(path + "." + key, "missing");
    return get_number(j.at(key), path + "." + key);
}

std::vector<double> get_number_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_number(j.at(i), path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<double> get_positive_list(const json& j, const std::string& path) {
    const std::vector<double> out = get_number_list(j, path);
    if (out.empty()) fail(path, "must be non-empty");
    for (double v : out) {
        if (!(v > 0.0)) fail(path, "entries must be > 0");
    }
    return out;
}

Eigen::VectorXd get_vector(const json& j, const std::string& path) {
    const std::vector<double> v = get_number_list(j, path);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::vector<std::vector<double>> data;
    data.reserve(rows);
    std::size_t cols = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        data.push_back(get_number_list(j.at(r), path + "[" + std::to_string(r) + "]"));
        if (r == 0) {
            cols = data[0].size();
            if (cols == 0) fail(path, "rows must be non-empty");
        } else if (data[r].size() != cols) {
            fail(path, "ragged rows");
        }
    }
    Eigen::MatrixXd M(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) M(r, c) = data[r][c];
    }
    return M;
}

JumpDensity parse_density(const json& j, const std::string& path) {
    check_keys(j, path, {"family", "dim", "sigma2", "lambda0", "c", "r", "alpha", "r_cut",
                         "grid", "values"});
    if (!j.contains("family")) fail(path + ".family", "missing");
    const std::string family = j.at("family").get<std::string>();
    auto dim = [&]() {
        return j.contains("dim") ? static_cast<int>(get_field_number(j, path, "dim")) : 1;
    };
    try {
        if (family == "gaussian") {
            return JumpDensity::gaussian(dim(), get_field_number(j, path, "sigma2"),
                                         get_field_number(j, path, "lambda0"));
        }
        if (family == "polynomial_decay") {
            return JumpDensity::polynomial_decay(dim(), get_field_number(j, path, "c"),
                                                 get_field_number(j, path, "r"));
        }
        if (family == "truncated_stable") {
            return JumpDensity::truncated_stable(dim(), get_field_number(j, path, "c"),
                                                 get_field_number(j, path, "alpha"),
                                                 get_field_number(j, path, "r_cut"));
        }
        if (family == "tabulated") {
            if (!j.contains("grid") || !j.contains("values")) {
                fail(path, "tabulated density needs grid and values");
            }
            return JumpDensity::tabulated(get_number_list(j.at("grid"), path + ".grid"),
                                          get_number_list(j.at("values"), path + ".values"));
        }
    } catch (const InvalidInput& e) {
        fail(path, e.what());
    }
    fail(path + ".family", "unknown family '" + family + "'");
}

json density_to_json(const JumpDensity&, const json& original) {
    // The original block is already validated; echo it as-is.
    return original;
}

TestFnSpec parse_test_fn(const json& j, const std::string& path) {
    check_keys(j, path, {"name", "vec", "a"});
    if (!j.contains("name")) fail(path + ".name", "missing");
    TestFnSpec spec;
    spec.name = j.at("name").get<std::string>();
    if (j.contains("vec")) spec.vec = get_vector(j.at("vec"), path + ".vec");
    if (j.contains("a")) spec.a = get_number(j.at("a"), path + ".a");
    return spec;
}

json test_fn_to_json(const TestFnSpec& spec) {
    json j;
    j["name"] = spec.name;
    if (spec.vec.size() > 0) {
        j["vec"] = std::vector<double>(spec.vec.data(), spec.vec.data() + spec.vec.size());
    }
    if (spec.a != 0.0) j["a"] = spec.a;
    return j;
}

std::vector<std::string> get_string_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j.at(i).is_string()) fail(path + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(j.at(i).get<std::string>());
    }
    return out;
}

std::vector<double> to_list(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (long r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (long c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const ConfigOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    check_keys(doc, "$", {"model", "noise", "experiment", "seed", "replicas", "workers",
                          "output_dir"});

    ExperimentConfig cfg;

    if (!doc.contains("model")) fail("$.model", "missing");
    const json& jm = doc.at("model");
    check_keys(jm, "$.model", {"A", "B"});
    if (!jm.contains("A") || !jm.contains("B")) fail("$.model", "needs A and B");
    cfg.model.A = get_matrix(jm.at("A"), "$.model.A");
    cfg.model.B = get_matrix(jm.at("B"), "$.model.B");
    try {
        cfg.model.validate();
    } catch (const InvalidInput& e) {
        fail("$.model", e.what());
    }

    if (!doc.contains("noise")) fail("$.noise", "missing");
    const json& jn = doc.at("noise");
    check_keys(jn, "$.noise", {"drift", "gaussian_cov", "jump0", "jump1", "small_jump_truncation"});
    if (!jn.contains("jump0")) fail("$.noise.jump0", "missing");
    cfg.noise.jump0 = parse_density(jn.at("jump0"), "$.noise.jump0");
    const int d = cfg.noise.jump0.dim();
    cfg.noise.drift = jn.contains("drift") ? get_vector(jn.at("drift"), "$.noise.drift")
                                           : Eigen::VectorXd::Zero(d);
    cfg.noise.gaussian_cov = jn.contains("gaussian_cov")
                                 ? get_matrix(jn.at("gaussian_cov"), "$.noise.gaussian_cov")
                                 : Eigen::MatrixXd::Zero(d, d);
    if (jn.contains("jump1")) cfg.noise.jump1 = parse_density(jn.at("jump1"), "$.noise.jump1");
    if (jn.contains("small_jump_truncation")) {
        cfg.noise.small_jump_truncation =
            get_number(jn.at("small_jump_truncation"), "$.noise.small_jump_truncation");
    }
    try {
        cfg.noise.validate();
    } catch (const InvalidInput& e) {
        fail("$.noise", e.what());
    }
    if (cfg.model.d() != d) fail("$.noise", "jump dimension does not match model B columns");

    if (doc.contains("seed")) cfg.seed = static_cast<std::uint64_t>(get_field_number(doc, "$", "seed"));
    if (doc.contains("replicas")) {
        cfg.replicas = static_cast<std::int64_t>(get_field_number(doc, "$", "replicas"));
    }
    if (doc.contains("workers")) cfg.workers = static_cast<int>(get_field_number(doc, "$", "workers"));
    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string()) fail("$.output_dir", "expected a string");
        cfg.output_dir = doc.at("output_dir").get<std::string>();
    }
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.replicas) cfg.replicas = *overrides.replicas;
    if (overrides.workers) cfg.workers = *overrides.workers;
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
    if (cfg.replicas < 1) fail("$.replicas", "must be >= 1");
    if (cfg.workers < 1) fail("$.workers", "must be >= 1");

    if (!doc.contains("experiment")) fail("$.experiment", "missing");
    const json& je = doc.at("experiment");
    require_object(je, "$.experiment");
    if (!je.contains("type")) fail("$.experiment.type", "missing");
    cfg.experiment_type = je.at("type").get<std::string>();
    const std::string& type = cfg.experiment_type;
    const int n = cfg.model.n();

    if (type == "simulate") {
        check_keys(je, "$.experiment", {"type", "t", "x", "path_export_limit"});
        SimulateParams p;
        p.t = get_field_number(je, "$.experiment", "t");
        p.x = je.contains("x") ? get_vector(je.at("x"), "$.experiment.x")
                               : Eigen::VectorXd::Zero(n);
        if (je.contains("path_export_limit")) {
            p.path_export_limit =
                static_cast<std::int64_t>(get_field_number(je, "$.experiment", "path_export_limit"));
        }
        cfg.params = p;
    } else if (type == "tv-decay") {
        check_keys(je, "$.experiment",
                   {"type", "t_grid", "x", "y", "method", "clamp_rho0", "z0", "eps"});
        TvDecayParams p;
        if (!je.contains("t_grid")) fail("$.experiment.t_grid", "missing");
        p.t_grid = get_positive_list(je.at("t_grid"), "$.experiment.t_grid");
        if (!je.contains("x") || !je.contains("y")) fail("$.experiment", "needs x and y");
        p.x = get_vector(je.at("x"), "$.experiment.x");
        p.y = get_vector(je.at("y"), "$.experiment.y");
        if (je.contains("method")) p.method = je.at("method").get<std::string>();
        if (p.method != "weight" && p.method != "histogram" && p.method != "both") {
            fail("$.experiment.method", "must be weight, histogram or both");
        }
        if (je.contains("clamp_rho0")) {
            if (!je.at("clamp_rho0").is_boolean()) fail("$.experiment.clamp_rho0", "expected a boolean");
            p.clamp_rho0 = je.at("clamp_rho0").get<bool>();
        }
        if (je.contains("z0")) p.z0 = get_vector(je.at("z0"), "$.experiment.z0");
        if (je.contains("eps")) p.eps = get_number(je.at("eps"), "$.experiment.eps");
        cfg.params = p;
    } else if (type == "harnack") {
        check_keys(je, "$.experiment", {"type", "cases", "p"});
        HarnackParams p;
        if (je.contains("cases")) p.cases = static_cast<int>(get_field_number(je, "$.experiment", "cases"));
        if (je.contains("p")) p.p = get_field_number(je, "$.experiment", "p");
        cfg.params = p;
    } else if (type == "vp") {
        check_keys(je, "$.experiment", {"type", "p", "r_grid"});
        VpParams p;
        if (je.contains("p")) p.p = get_field_number(je, "$.experiment", "p");
        if (!je.contains("r_grid")) fail("$.experiment.r_grid", "missing");
        p.r_grid = get_number_list(je.at("r_grid"), "$.experiment.r_grid");
        cfg.params = p;
    } else if (type == "rank") {
        check_keys(je, "$.experiment", {"type", "m", "t_max", "tuple_samples"});
        RankParams p;
        if (!je.contains("m")) fail("$.experiment.m", "missing");
        p.m = static_cast<int>(get_field_number(je, "$.experiment", "m"));
        if (je.contains("t_max")) p.t_max = get_field_number(je, "$.experiment", "t_max");
        if (je.contains("tuple_samples")) {
            p.tuple_samples = static_cast<long>(get_field_number(je, "$.experiment", "tuple_samples"));
        }
        cfg.params = p;
    } else if (type == "feller") {
        check_keys(je, "$.experiment", {"type", "m", "t", "radii", "f", "direction", "x", "tm"});
        FellerParams p;
        if (!je.contains("m")) fail("$.experiment.m", "missing");
        p.m = static_cast<int>(get_field_number(je, "$.experiment", "m"));
        p.t = je.contains("t") ? get_field_number(je, "$.experiment", "t") : 1.0;
        if (!je.contains("radii")) fail("$.experiment.radii", "missing");
        p.radii = get_number_list(je.at("radii"), "$.experiment.radii");
        if (!je.contains("f")) fail("$.experiment.f", "missing");
        p.f = parse_test_fn(je.at("f"), "$.experiment.f");
        p.direction = je.contains("direction")
                          ? get_vector(je.at("direction"), "$.experiment.direction")
                          : Eigen::VectorXd::Unit(n, 0);
        p.x = je.contains("x") ? get_vector(je.at("x"), "$.experiment.x")
                               : Eigen::VectorXd::Zero(n);
        if (je.contains("tm")) p.tm = get_number(je.at("tm"), "$.experiment.tm");
        cfg.params = p;
    } else if (type == "girsanov-check") {
        check_keys(je, "$.experiment", {"type", "T", "functionals"});
        GirsanovParams p;
        if (je.contains("T")) p.T = get_field_number(je, "$.experiment", "T");
        p.functionals = je.contains("functionals")
                            ? get_string_list(je.at("functionals"), "$.experiment.functionals")
                            : std::vector<std::string>{"one", "count", "terminal_indicator"};
        cfg.params = p;
    } else if (type == "mecke-check") {
        check_keys(je, "$.experiment", {"type", "T_grid", "functionals"});
        MeckeParams p;
        if (!je.contains("T_grid")) fail("$.experiment.T_grid", "missing");
        p.T_grid = get_positive_list(je.at("T_grid"), "$.experiment.T_grid");
        p.functionals = je.contains("functionals")
                            ? get_string_list(je.at("functionals"), "$.experiment.functionals")
                            : std::vector<std::string>{"indicator_box", "config_count",
                                                       "point_norm", "product_mix", "inv_count"};
        cfg.params = p;
    } else if (type == "berry-esseen") {
        check_keys(je, "$.experiment", {"type", "x", "t_grid"});
        BerryEsseenParams p;
        if (je.contains("x")) p.x = get_field_number(je, "$.experiment", "x");
        if (!je.contains("t_grid")) fail("$.experiment.t_grid", "missing");
        p.t_grid = get_positive_list(je.at("t_grid"), "$.experiment.t_grid");
        cfg.params = p;
    } else {
        fail("$.experiment.type", "unknown experiment '" + type + "'");
    }

    // Canonical echo: original structure with defaults and overrides baked in.
    json echo;
    echo["model"]["A"] = matrix_to_json(cfg.model.A);
    echo["model"]["B"] = matrix_to_json(cfg.model.B);
    echo["noise"]["jump0"] = density_to_json(cfg.noise.jump0, jn.at("jump0"));
    echo["noise"]["drift"] = to_list(cfg.noise.drift);
    echo["noise"]["gaussian_cov"] = matrix_to_json(cfg.noise.gaussian_cov);
    if (cfg.noise.jump1) echo["noise"]["jump1"] = density_to_json(*cfg.noise.jump1, jn.at("jump1"));
    if (cfg.noise.small_jump_truncation) {
        echo["noise"]["small_jump_truncation"] = *cfg.noise.small_jump_truncation;
    }
    echo["seed"] = cfg.seed;
    echo["replicas"] = cfg.replicas;
    echo["workers"] = cfg.workers;
    echo["output_dir"] = cfg.output_dir;
    json jexp;
    jexp["type"] = type;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SimulateParams>) {
                jexp["t"] = p.t;
                jexp["x"] = to_list(p.x);
                jexp["path_export_limit"] = p.path_export_limit;
            } else if constexpr (std::is_same_v<T, TvDecayParams>) {
                jexp["t_grid"] = p.t_grid;
                jexp["x"] = to_list(p.x);
                jexp["y"] = to_list(p.y);
                jexp["method"] = p.method;
                jexp["clamp_rho0"] = p.clamp_rho0;
                if (p.z0) jexp["z0"] = to_list(*p.z0);
                if (p.eps) jexp["eps"] = *p.eps;
            } else if constexpr (std::is_same_v<T, HarnackParams>) {
                jexp["cases"] = p.cases;
                jexp["p"] = p.p;
            } else if constexpr (std::is_same_v<T, VpParams>) {
                jexp["p"] = p.p;
                jexp["r_grid"] = p.r_grid;
            } else if constexpr (std::is_same_v<T, RankParams>) {
                jexp["m"] = p.m;
                if (p.t_max) jexp["t_max"] = *p.t_max;
                jexp["tuple_samples"] = p.tuple_samples;
            } else if constexpr (std::is_same_v<T, FellerParams>) {
                jexp["m"] = p.m;
                jexp["t"] = p.t;
                jexp["radii"] = p.radii;
                jexp["f"] = test_fn_to_json(p.f);
                jexp["direction"] = to_list(p.direction);
                jexp["x"] = to_list(p.x);
                if (p.tm) jexp["tm"] = *p.tm;
            } else if constexpr (std::is_same_v<T, GirsanovParams>) {
                jexp["T"] = p.T;
                jexp["functionals"] = p.functionals;
            } else if constexpr (std::is_same_v<T, MeckeParams>) {
                jexp["T_grid"] = p.T_grid;
                jexp["functionals"] = p.functionals;
            } else if constexpr (std::is_same_v<T, BerryEsseenParams>) {
                jexp["x"] = p.x;
                jexp["t_grid"] = p.t_grid;
            }
        },
        cfg.params);
    echo["experiment"] = jexp;
    cfg.resolved_json = echo.dump(2) + "\n";
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

}  // namespace levyou
