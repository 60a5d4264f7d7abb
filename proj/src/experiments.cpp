#include "spdtest/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spdtest/parallel.hpp"
#include "spdtest/version.hpp"

namespace spdtest {

using nlohmann::ordered_json;

namespace {

std::string num_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string size_label(std::size_t n1, std::size_t n2) {
    return "n1=" + std::to_string(n1) + ",n2=" + std::to_string(n2);
}

// --- config parsing helpers (exact error paths) ---

const ordered_json& require_key(const ordered_json& j, const std::string& path,
                                const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path + "." + key, "missing required field");
    return *it;
}

void reject_unknown_keys(const ordered_json& j, const std::string& path,
                         const std::set<std::string>& allowed) {
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(path + "." + k, "unknown field");
}

double as_number(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "must be a number");
    return j.get<double>();
}

std::size_t as_positive_int(const ordered_json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() <= 0)
        throw ConfigError(path, "must be a positive integer");
    return j.get<std::size_t>();
}

std::uint64_t as_seed(const ordered_json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ConfigError(path, "must be a non-negative integer");
    return j.get<std::uint64_t>();
}

std::string as_string(const ordered_json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "must be a string");
    return j.get<std::string>();
}

Matrix as_matrix(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "must be a non-empty 2D array");
    const std::size_t d = j.size();
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != d)
            throw ConfigError(path + "[" + std::to_string(i) + "]",
                              "must be a row of " + std::to_string(d) + " numbers");
        for (std::size_t k = 0; k < d; ++k) {
            const auto& cell = row[k];
            if (!cell.is_number())
                throw ConfigError(path + "[" + std::to_string(i) + "][" +
                                      std::to_string(k) + "]",
                                  "must be a number");
            m(i, k) = cell.get<double>();
        }
    }
    return m;
}

MatrixExpr parse_matrix_expr(const ordered_json& j, const std::string& path) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "identity") return MatrixExpr::identity(1.0);
        if (s.rfind("identity*", 0) == 0) {
            try {
                std::size_t used = 0;
                const double c = std::stod(s.substr(9), &used);
                if (used != s.size() - 9 || !(c >= 0.0)) throw std::invalid_argument("");
                return MatrixExpr::identity(c);
            } catch (const std::exception&) {
                throw ConfigError(path, "bad scalar in '" + s + "'");
            }
        }
        throw ConfigError(path, "expected \"identity\", \"identity*<c>\" or a 2D array");
    }
    if (j.is_array()) return MatrixExpr::matrix(as_matrix(j, path));
    throw ConfigError(path, "expected \"identity\", \"identity*<c>\" or a 2D array");
}

ScenarioKind scenario_kind_from(const std::string& s, const std::string& path) {
    if (s == "wishart_rate") return ScenarioKind::WishartRate;
    if (s == "inv_wishart") return ScenarioKind::InvWishart;
    if (s == "cmu") return ScenarioKind::CovUniform;
    if (s == "cmt") return ScenarioKind::CovT;
    if (s == "scaled_std_wishart") return ScenarioKind::ScaledStdWishart;
    if (s == "ncw") return ScenarioKind::Ncw;
    throw ConfigError(path, "unknown scenario kind '" + s + "'");
}

ScenarioSpec parse_scenario(const ordered_json& j, const std::string& path,
                            std::size_t dim) {
    if (!j.is_object()) throw ConfigError(path, "must be an object");
    reject_unknown_keys(j, path,
                        {"name", "kind", "shape", "scale", "nobs", "factor", "two_nu",
                         "means"});
    ScenarioSpec s;
    s.name = as_string(require_key(j, path, "name"), path + ".name");
    s.kind = scenario_kind_from(as_string(require_key(j, path, "kind"), path + ".kind"),
                                path + ".kind");
    s.dim = dim;

    auto resolve_scale = [&]() -> SpdMatrix {
        if (!j.contains("scale")) return SpdMatrix::identity(dim);
        try {
            return parse_matrix_expr(j.at("scale"), path + ".scale")
                .resolve(dim, Definiteness::StrictPd);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(path + ".scale", e.what());
        }
    };

    try {
        switch (s.kind) {
            case ScenarioKind::WishartRate:
            case ScenarioKind::InvWishart:
                s.shape = as_number(require_key(j, path, "shape"), path + ".shape");
                s.scale = resolve_scale();
                break;
            case ScenarioKind::CovUniform:
                s.nobs = j.contains("nobs")
                             ? as_positive_int(j.at("nobs"), path + ".nobs")
                             : dim;
                break;
            case ScenarioKind::CovT:
                s.shape = as_number(require_key(j, path, "shape"), path + ".shape");
                s.scale = resolve_scale();
                s.nobs = j.contains("nobs")
                             ? as_positive_int(j.at("nobs"), path + ".nobs")
                             : dim;
                break;
            case ScenarioKind::ScaledStdWishart:
                s.shape = as_number(require_key(j, path, "shape"), path + ".shape");
                s.scale = resolve_scale();
                s.scale_factor =
                    j.contains("factor") ? as_number(j.at("factor"), path + ".factor")
                                         : 1.0;
                break;
            case ScenarioKind::Ncw: {
                s.shape = static_cast<double>(
                    as_positive_int(require_key(j, path, "two_nu"), path + ".two_nu"));
                s.scale = resolve_scale();
                const auto& means = require_key(j, path, "means");
                if (!means.is_array())
                    throw ConfigError(path + ".means", "must be an array of vectors");
                for (std::size_t i = 0; i < means.size(); ++i) {
                    const auto& mv = means[i];
                    const std::string mpath =
                        path + ".means[" + std::to_string(i) + "]";
                    if (!mv.is_array() || mv.size() != dim)
                        throw ConfigError(mpath, "must be a vector of " +
                                                     std::to_string(dim) + " numbers");
                    std::vector<double> v(dim);
                    for (std::size_t k = 0; k < dim; ++k) {
                        if (!mv[k].is_number())
                            throw ConfigError(mpath + "[" + std::to_string(k) + "]",
                                              "must be a number");
                        v[k] = mv[k].get<double>();
                    }
                    s.means.push_back(std::move(v));
                }
                break;
            }
        }
        validate_scenario(s);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
    return s;
}

ParamsSpec parse_params(const ordered_json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "must be an object");
    reject_unknown_keys(j, path, {"nu", "sigma", "omega"});
    ParamsSpec p;
    p.nu = as_number(require_key(j, path, "nu"), path + ".nu");
    if (!(p.nu > 0.0)) throw ConfigError(path + ".nu", "must be positive");
    p.sigma = j.contains("sigma") ? parse_matrix_expr(j.at("sigma"), path + ".sigma")
                                  : MatrixExpr::identity(1.0);
    p.omega = j.contains("omega") ? parse_matrix_expr(j.at("omega"), path + ".omega")
                                  : MatrixExpr::identity(1.0);
    return p;
}

ExperimentKind kind_from(const std::string& s, const std::string& path) {
    if (s == "power_table") return ExperimentKind::PowerTable;
    if (s == "df_sweep") return ExperimentKind::DfSweep;
    if (s == "percentile_table") return ExperimentKind::PercentileTable;
    if (s == "two_sample_test") return ExperimentKind::TwoSampleTest;
    throw ConfigError(path, "unknown experiment kind '" + s + "'");
}

std::string meta_params_label(const ExperimentConfig& cfg) {
    std::string s;
    for (const auto& p : cfg.params_grid) {
        if (!s.empty()) s += "; ";
        s += p.label();
    }
    return s;
}

// wall time is reported on stdout by the CLI, never into the table:
// rerunning a config with the same seed must reproduce output files byte
// for byte.
void stamp_metadata(ResultTable& t, const ExperimentConfig& cfg) {
    t.set_meta("seed", std::to_string(cfg.seed));
    t.set_meta("n_reps", std::to_string(cfg.n_reps));
    t.set_meta("alpha", num_label(cfg.alpha));
    t.set_meta("dim", std::to_string(cfg.dim));
    t.set_meta("params", meta_params_label(cfg));
    t.set_meta("software_version", kVersion);
}

}  // namespace

MatrixExpr MatrixExpr::identity(double factor) {
    MatrixExpr e;
    e.identity_factor = factor;
    return e;
}

MatrixExpr MatrixExpr::matrix(Matrix m) {
    MatrixExpr e;
    e.explicit_matrix = std::move(m);
    return e;
}

SpdMatrix MatrixExpr::resolve(std::size_t dim, Definiteness mode) const {
    if (!explicit_matrix) {
        if (identity_factor > 0.0) return SpdMatrix::scaled_identity(dim, identity_factor);
        if (identity_factor == 0.0 && mode == Definiteness::Psd)
            return SpdMatrix::scaled_identity(dim, 0.0);
        throw NotPositiveDefiniteError("identity*" + num_label(identity_factor) +
                                       " is not positive definite");
    }
    if (explicit_matrix->rows() != dim)
        throw DimensionMismatchError("matrix is " + std::to_string(explicit_matrix->rows()) +
                                     "-dim, experiment dimension is " + std::to_string(dim));
    return validate_spd(*explicit_matrix, mode);
}

std::string MatrixExpr::label() const {
    if (!explicit_matrix) {
        if (identity_factor == 1.0) return "identity";
        return "identity*" + num_label(identity_factor);
    }
    std::string s = "[";
    for (std::size_t i = 0; i < explicit_matrix->rows(); ++i) {
        if (i) s += ";";
        for (std::size_t j = 0; j < explicit_matrix->cols(); ++j) {
            if (j) s += " ";
            s += num_label((*explicit_matrix)(i, j));
        }
    }
    return s + "]";
}

NcwParams ParamsSpec::resolve(std::size_t dim) const {
    return NcwParams(nu, sigma.resolve(dim, Definiteness::StrictPd),
                     omega.resolve(dim, Definiteness::Psd));
}

std::string ParamsSpec::label() const {
    return "nu=" + num_label(nu) + ",sigma=" + sigma.label() + ",omega=" + omega.label();
}

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("$", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("$", "config must be a JSON object");
    reject_unknown_keys(j, "$",
                        {"kind", "dim", "seed", "n_reps", "alpha", "scenarios",
                         "size_pairs", "params", "df_grid", "nobs", "output"});

    ExperimentConfig cfg;
    cfg.kind = kind_from(as_string(require_key(j, "$", "kind"), "$.kind"), "$.kind");
    cfg.dim = as_positive_int(require_key(j, "$", "dim"), "$.dim");
    cfg.seed = as_seed(require_key(j, "$", "seed"), "$.seed");
    if (j.contains("n_reps")) cfg.n_reps = as_positive_int(j.at("n_reps"), "$.n_reps");
    if (j.contains("alpha")) {
        cfg.alpha = as_number(j.at("alpha"), "$.alpha");
        if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
            throw ConfigError("$.alpha", "must lie strictly between 0 and 1");
    }

    if (j.contains("scenarios")) {
        const auto& sc = j.at("scenarios");
        if (!sc.is_array()) throw ConfigError("$.scenarios", "must be an array");
        for (std::size_t i = 0; i < sc.size(); ++i)
            cfg.scenarios.push_back(
                parse_scenario(sc[i], "$.scenarios[" + std::to_string(i) + "]", cfg.dim));
    }
    if (j.contains("size_pairs")) {
        const auto& sp = j.at("size_pairs");
        if (!sp.is_array()) throw ConfigError("$.size_pairs", "must be an array");
        for (std::size_t i = 0; i < sp.size(); ++i) {
            const std::string path = "$.size_pairs[" + std::to_string(i) + "]";
            if (!sp[i].is_array() || sp[i].size() != 2)
                throw ConfigError(path, "must be a pair [n1, n2]");
            cfg.size_pairs.emplace_back(as_positive_int(sp[i][0], path + "[0]"),
                                        as_positive_int(sp[i][1], path + "[1]"));
        }
    }
    if (j.contains("params")) {
        const auto& pg = j.at("params");
        if (!pg.is_array()) throw ConfigError("$.params", "must be an array");
        for (std::size_t i = 0; i < pg.size(); ++i)
            cfg.params_grid.push_back(
                parse_params(pg[i], "$.params[" + std::to_string(i) + "]"));
    }
    if (j.contains("df_grid")) {
        const auto& dg = j.at("df_grid");
        if (!dg.is_array() || dg.empty())
            throw ConfigError("$.df_grid", "must be a non-empty array of numbers");
        for (std::size_t i = 0; i < dg.size(); ++i) {
            const std::string path = "$.df_grid[" + std::to_string(i) + "]";
            const double v = as_number(dg[i], path);
            if (!(v > 0.0)) throw ConfigError(path, "df must be positive");
            cfg.df_grid.push_back(v);
        }
    }
    if (j.contains("nobs")) cfg.sweep_nobs = as_positive_int(j.at("nobs"), "$.nobs");
    if (j.contains("output")) {
        const auto& out = j.at("output");
        if (!out.is_object()) throw ConfigError("$.output", "must be an object");
        reject_unknown_keys(out, "$.output", {"path", "format"});
        cfg.output_path = as_string(require_key(out, "$.output", "path"), "$.output.path");
        if (out.contains("format")) {
            const std::string f = as_string(out.at("format"), "$.output.format");
            if (f == "csv")
                cfg.output_format = OutputFormat::Csv;
            else if (f == "json")
                cfg.output_format = OutputFormat::Json;
            else
                throw ConfigError("$.output.format", "must be \"csv\" or \"json\"");
        }
    }

    // kind-specific shape requirements
    switch (cfg.kind) {
        case ExperimentKind::PowerTable:
            if (cfg.scenarios.empty())
                throw ConfigError("$.scenarios", "power_table needs at least one scenario");
            if (cfg.size_pairs.empty())
                throw ConfigError("$.size_pairs", "power_table needs at least one size pair");
            if (cfg.params_grid.empty())
                throw ConfigError("$.params", "power_table needs at least one params entry");
            break;
        case ExperimentKind::PercentileTable:
            if (cfg.scenarios.size() != 1)
                throw ConfigError("$.scenarios",
                                  "percentile_table needs exactly one null scenario");
            if (cfg.size_pairs.empty())
                throw ConfigError("$.size_pairs",
                                  "percentile_table needs at least one size pair");
            if (cfg.params_grid.empty())
                throw ConfigError("$.params",
                                  "percentile_table needs at least one params entry");
            break;
        case ExperimentKind::DfSweep:
            if (!cfg.scenarios.empty())
                throw ConfigError("$.scenarios",
                                  "df_sweep builds its own scenario pair; remove this");
            if (cfg.params_grid.size() != 1)
                throw ConfigError("$.params", "df_sweep needs exactly one params entry");
            if (cfg.size_pairs.empty()) cfg.size_pairs.emplace_back(20, 20);
            if (cfg.size_pairs.size() != 1)
                throw ConfigError("$.size_pairs", "df_sweep takes a single size pair");
            if (cfg.df_grid.empty())
                for (double df = 1.0; df <= 501.0; df += 20.0) cfg.df_grid.push_back(df);
            if (cfg.sweep_nobs < 2) throw ConfigError("$.nobs", "must be at least 2");
            break;
        case ExperimentKind::TwoSampleTest:
            if (cfg.params_grid.empty())
                throw ConfigError("$.params",
                                  "two_sample_test needs at least one params entry");
            if (!cfg.scenarios.empty())
                throw ConfigError("$.scenarios", "two_sample_test tests observed samples");
            break;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

ResultTable run_power_table(const ExperimentConfig& cfg, unsigned threads) {
    const bool multi = cfg.params_grid.size() > 1 || cfg.size_pairs.size() > 1;
    const std::size_t ns = cfg.scenarios.size();

    ResultTable t;
    t.title = "rejection percentage, warp-speed bootstrap";
    t.value_kind = ResultTable::ValueKind::Percent;
    for (const auto& s : cfg.scenarios) t.col_labels.push_back(s.name);
    for (const auto& p : cfg.params_grid)
        for (const auto& [n1, n2] : cfg.size_pairs)
            for (const auto& s : cfg.scenarios)
                t.row_labels.push_back(
                    multi ? p.label() + "|" + size_label(n1, n2) + "|" + s.name : s.name);
    t.cells.assign(t.rows() * t.cols(), std::nan(""));

    std::uint64_t cell_index = 0;
    std::size_t row = 0;
    for (const auto& p : cfg.params_grid) {
        const NcwParams params = p.resolve(cfg.dim);
        for (const auto& [n1, n2] : cfg.size_pairs) {
            for (std::size_t r = 0; r < ns; ++r, ++row) {
                for (std::size_t c = 0; c < ns; ++c, ++cell_index) {
                    // the paper presents symmetric tables with the lower
                    // triangle empty; mirror that when sizes are equal
                    if (n1 == n2 && c < r) continue;
                    const auto run = warp_speed_power(
                        cfg.scenarios[r], cfg.scenarios[c], n1, n2, params, cfg.n_reps,
                        cfg.alpha, derive_seed(cfg.seed, cell_index), threads);
                    t.cell(row, c) = 100.0 * run.rejection_rate;
                }
            }
        }
    }
    stamp_metadata(t, cfg);
    return t;
}

ResultTable run_df_sweep(const ExperimentConfig& cfg, unsigned threads) {
    const auto [n1, n2] = cfg.size_pairs.at(0);
    const NcwParams params = cfg.params_grid.at(0).resolve(cfg.dim);
    const SpdMatrix eye = SpdMatrix::identity(cfg.dim);
    const double wishart_df = static_cast<double>(cfg.sweep_nobs);
    const ScenarioSpec wishart = ScenarioSpec::scaled_std_wishart(
        "scaled_wishart", wishart_df, eye, 1.0 / (wishart_df - 1.0));

    ResultTable t;
    t.title = "rejection percentage vs t degrees of freedom";
    t.value_kind = ResultTable::ValueKind::Percent;
    t.col_labels = {"power_percent"};
    t.cells.assign(cfg.df_grid.size(), std::nan(""));
    for (std::size_t i = 0; i < cfg.df_grid.size(); ++i) {
        const double df = cfg.df_grid[i];
        t.row_labels.push_back("df=" + num_label(df));
        const ScenarioSpec cmt =
            ScenarioSpec::cov_t("cmt", df, eye, cfg.sweep_nobs);
        const auto run =
            warp_speed_power(wishart, cmt, n1, n2, params, cfg.n_reps, cfg.alpha,
                             derive_seed(cfg.seed, i), threads);
        t.cells[i] = 100.0 * run.rejection_rate;
    }
    stamp_metadata(t, cfg);
    t.set_meta("nobs", std::to_string(cfg.sweep_nobs));
    t.set_meta("sizes", size_label(n1, n2));
    return t;
}

ResultTable run_percentile_table(const ExperimentConfig& cfg, unsigned threads) {
    const ScenarioSpec& null_scenario = cfg.scenarios.at(0);

    ResultTable t;
    t.title = "empirical percentiles of the scaled statistic under " + null_scenario.name;
    t.value_kind = ResultTable::ValueKind::Full;
    for (const auto& [n1, n2] : cfg.size_pairs) t.col_labels.push_back(size_label(n1, n2));
    for (const auto& p : cfg.params_grid) t.row_labels.push_back(p.label());
    t.cells.assign(t.rows() * t.cols(), std::nan(""));

    std::uint64_t cell_index = 0;
    for (std::size_t r = 0; r < cfg.params_grid.size(); ++r) {
        const NcwParams params = cfg.params_grid[r].resolve(cfg.dim);
        for (std::size_t c = 0; c < cfg.size_pairs.size(); ++c, ++cell_index) {
            const auto [n1, n2] = cfg.size_pairs[c];
            const std::uint64_t run_seed = derive_seed(cfg.seed, cell_index);
            std::vector<double> values(cfg.n_reps);
            parallel_for(cfg.n_reps, [&](std::size_t j) {
                RngStream rng(run_seed, j);
                const MatrixSample x = draw_sample(null_scenario, n1, rng);
                const MatrixSample y = draw_sample(null_scenario, n2, rng);
                values[j] = statistic_fast(x, y, params).scaled;
            }, threads);
            t.cell(r, c) = critical_value(values, cfg.alpha);
        }
    }
    stamp_metadata(t, cfg);
    t.set_meta("null_scenario", null_scenario.name);
    return t;
}

std::vector<TestResult> run_two_sample_test(const ExperimentConfig& cfg,
                                            const MatrixSample& x, const MatrixSample& y,
                                            unsigned threads) {
    if (x.empty() || y.empty())
        throw EmptySampleError("run_two_sample_test: empty sample");
    if (x.dim() != cfg.dim || y.dim() != cfg.dim)
        throw DimensionMismatchError("run_two_sample_test: samples are " +
                                     std::to_string(x.dim()) + "/" +
                                     std::to_string(y.dim()) + "-dim, config says " +
                                     std::to_string(cfg.dim));
    std::vector<TestResult> out;
    for (std::size_t i = 0; i < cfg.params_grid.size(); ++i) {
        const NcwParams params = cfg.params_grid[i].resolve(cfg.dim);
        const std::uint64_t run_seed = derive_seed(cfg.seed, i);
        TestResult r;
        r.params_label = cfg.params_grid[i].label();
        r.statistic = statistic_fast(x, y, params);
        r.b_reps = cfg.n_reps;
        r.seed = run_seed;
        r.p_value = bootstrap_pvalue(x, y, params, cfg.n_reps, run_seed, threads).p_value;
        out.push_back(std::move(r));
    }
    return out;
}

ResultTable two_sample_table(const std::vector<TestResult>& results, std::size_t n1,
                             std::size_t n2) {
    ResultTable t;
    t.title = "two-sample test";
    t.value_kind = ResultTable::ValueKind::Full;
    t.row_labels = {"statistic", "scaled_statistic", "p_value"};
    for (const auto& r : results) t.col_labels.push_back(r.params_label);
    t.cells.assign(t.rows() * t.cols(), std::nan(""));
    for (std::size_t c = 0; c < results.size(); ++c) {
        t.cell(0, c) = results[c].statistic.raw;
        t.cell(1, c) = results[c].statistic.scaled;
        t.cell(2, c) = results[c].p_value;
    }
    t.set_meta("n1", std::to_string(n1));
    t.set_meta("n2", std::to_string(n2));
    if (!results.empty()) {
        t.set_meta("b_reps", std::to_string(results.front().b_reps));
        t.set_meta("seed", std::to_string(results.front().seed));
    }
    t.set_meta("software_version", kVersion);
    return t;
}

}  // namespace spdtest
