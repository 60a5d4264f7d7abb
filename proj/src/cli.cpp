#include "spdtest/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "spdtest/experiments.hpp"
#include "spdtest/ingest.hpp"
#include "spdtest/version.hpp"

namespace spdtest {

namespace {

/// Flag combinations CLI11 cannot express (exit code 1, like its own).
struct UsageError : Error {
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

/// "a,b,c" or "@file" with one label per line.
std::vector<std::string> parse_label_list(const std::string& arg) {
    std::vector<std::string> labels;
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw Error("cannot open label file '" + arg.substr(1) + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) labels.push_back(line);
        }
    } else {
        for (auto& l : split_commas(arg))
            if (!l.empty()) labels.push_back(l);
    }
    if (labels.empty()) throw Error("empty label list '" + arg + "'");
    return labels;
}

// Identity forms stay symbolic (labels read "identity*2", not a matrix
// dump); only file paths become explicit matrices.
MatrixExpr matrix_expr_from_cli(const std::string& text, std::size_t dim,
                                Definiteness mode) {
    const SpdMatrix parsed = parse_matrix_arg(text, dim, mode);
    if (text == "identity") return MatrixExpr::identity(1.0);
    if (text.rfind("identity*", 0) == 0)
        return MatrixExpr::identity(std::stod(text.substr(9)));
    return MatrixExpr::matrix(parsed.entries());
}

OutputFormat format_from(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw Error("unknown format '" + s + "' (expected csv or json)");
}

struct CommonFlags {
    unsigned threads = 0;
    std::string out;
    std::string format;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t reps = 0;
};

void add_output_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--out", f.out, "Output file path (overrides the config's output)");
    cmd->add_option("--format", f.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

/// Shared runner for the config-driven experiment subcommands.
int run_experiment(const std::string& config_path, ExperimentKind expected,
                   const char* subcommand, const CommonFlags& flags) {
    ExperimentConfig cfg = load_config(config_path);
    if (cfg.kind != expected)
        throw ConfigError("$.kind", std::string("'") + subcommand +
                                        "' expects a matching config kind");
    if (flags.seed_given) cfg.seed = flags.seed;
    if (flags.reps) cfg.n_reps = flags.reps;
    if (!flags.out.empty()) cfg.output_path = flags.out;
    if (!flags.format.empty()) cfg.output_format = format_from(flags.format);
    if (cfg.output_path.empty())
        throw UsageError("no output path: set $.output.path in the config or pass --out");

    const auto start = std::chrono::steady_clock::now();
    ResultTable table;
    switch (expected) {
        case ExperimentKind::PowerTable:
            table = run_power_table(cfg, flags.threads);
            break;
        case ExperimentKind::DfSweep:
            table = run_df_sweep(cfg, flags.threads);
            break;
        case ExperimentKind::PercentileTable:
            table = run_percentile_table(cfg, flags.threads);
            break;
        case ExperimentKind::TwoSampleTest:
            throw Error("two_sample_test configs run through the 'test' subcommand");
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_table(table, cfg.output_path, cfg.output_format);
    std::printf("wrote %zux%zu table to %s (%.1f s)\n", table.rows(), table.cols(),
                cfg.output_path.c_str(), wall);
    return 0;
}

int run_test_command(const std::string& x_path, const std::string& y_path,
                     const std::string& config_path, double nu, const std::string& sigma,
                     const std::string& omega, std::size_t boot, double alpha,
                     const CommonFlags& flags) {
    const MatrixSample x = read_matrix_sample(x_path);
    const MatrixSample y = read_matrix_sample(y_path);
    if (x.dim() != y.dim())
        throw DimensionMismatchError("samples have different dimensions (" +
                                     std::to_string(x.dim()) + " vs " +
                                     std::to_string(y.dim()) + ")");

    ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = load_config(config_path);
        if (cfg.kind != ExperimentKind::TwoSampleTest)
            throw ConfigError("$.kind", "'test' expects kind \"two_sample_test\"");
        if (cfg.dim != x.dim())
            throw DimensionMismatchError("config dim " + std::to_string(cfg.dim) +
                                         " does not match samples (" +
                                         std::to_string(x.dim()) + ")");
        if (flags.seed_given) cfg.seed = flags.seed;
        if (flags.reps) cfg.n_reps = flags.reps;
    } else {
        if (!flags.seed_given) throw UsageError("--seed is required (no silent entropy)");
        cfg.kind = ExperimentKind::TwoSampleTest;
        cfg.dim = x.dim();
        cfg.seed = flags.seed;
        cfg.n_reps = boot;
        cfg.alpha = alpha;
        ParamsSpec p;
        p.nu = nu;
        p.sigma = matrix_expr_from_cli(sigma, x.dim(), Definiteness::StrictPd);
        p.omega = matrix_expr_from_cli(omega, x.dim(), Definiteness::Psd);
        cfg.params_grid.push_back(std::move(p));
    }

    const auto results = run_two_sample_test(cfg, x, y, flags.threads);
    for (const auto& r : results) {
        if (results.size() > 1) std::printf("[%s] ", r.params_label.c_str());
        std::printf("L = %.10g  scaled = %.10g  p = %.6g\n", r.statistic.raw,
                    r.statistic.scaled, r.p_value);
    }
    if (!flags.out.empty()) {
        const OutputFormat fmt =
            flags.format.empty() ? OutputFormat::Csv : format_from(flags.format);
        write_table(two_sample_table(results, x.size(), y.size()), flags.out, fmt);
    }
    return 0;
}

int run_ingest_returns(const std::string& csv, const std::string& columns,
                       std::size_t window, const std::string& divisor,
                       const std::string& out) {
    if (divisor != "n-1" && divisor != "n")
        throw UsageError("--divisor must be 'n-1' or 'n'");
    ReadReport report;
    const std::vector<std::string> cols =
        columns.empty() ? std::vector<std::string>{} : split_commas(columns);
    const SeriesTable prices = read_series_csv(csv, cols, &report);
    const SeriesTable returns = log_returns(prices);
    const MatrixSample sample = windowed_covariances(
        returns, window, divisor == "n" ? CovDivisor::N : CovDivisor::NMinusOne);
    write_matrix_sample(sample, out);
    std::printf("dropped %zu bad row(s); wrote %zu %zux%zu covariance matrices to %s\n",
                report.dropped_rows, sample.size(), sample.dim(), sample.dim(),
                out.c_str());
    return 0;
}

int run_ingest_groups(const std::string& csv, const std::string& group_col,
                      const std::string& features, const std::string& a_labels,
                      const std::string& out_a, const std::string& out_b) {
    ReadReport report;
    const GroupedRecords records =
        read_grouped_csv(csv, group_col, split_commas(features), &report);
    const auto labels = parse_label_list(a_labels);
    auto in_first = [&](const std::string& key) {
        return std::find(labels.begin(), labels.end(), key) != labels.end();
    };
    const auto [a, b] = group_covariances(records, in_first);
    write_matrix_sample(a, out_a);
    write_matrix_sample(b, out_b);
    std::printf("dropped %zu bad row(s); wrote samples of size %zu (%s) and %zu (%s)\n",
                report.dropped_rows, a.size(), out_a.c_str(), b.size(), out_b.c_str());
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Two-sample equality-in-distribution testing for symmetric "
                 "positive definite matrix samples"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // test
    auto* test = app.add_subcommand(
        "test", "Test two matrix samples with a bootstrap p-value");
    std::string x_path, y_path, config_path, sigma = "identity", omega = "identity";
    double nu = 1.0, alpha = 0.05;
    std::size_t boot = 10000;
    CommonFlags test_flags;
    test->add_option("--x", x_path, "First sample (matrix-sample CSV)")->required();
    test->add_option("--y", y_path, "Second sample (matrix-sample CSV)")->required();
    auto* cfg_opt = test->add_option(
        "--config", config_path, "two_sample_test config with a params grid");
    test->add_option("--nu", nu, "Weight-measure determinant exponent (> 0)")
        ->excludes(cfg_opt);
    test->add_option("--sigma", sigma,
                     "Weight-measure sigma: identity, identity*<c>, or matrix CSV path")
        ->excludes(cfg_opt);
    test->add_option("--omega", omega,
                     "Weight-measure omega: identity, identity*<c>, or matrix CSV path")
        ->excludes(cfg_opt);
    test->add_option("--boot", boot, "Bootstrap replicates B")->excludes(cfg_opt);
    test->add_option("--alpha", alpha, "Significance level (metadata only)");
    auto* seed_opt = test->add_option("--seed", test_flags.seed, "RNG seed");
    test->add_option("--threads", test_flags.threads, "Worker cap (0 = all cores)");
    add_output_flags(test, test_flags);

    // config-driven experiments
    struct ExpCmd {
        CLI::App* cmd;
        std::string config;
        CommonFlags flags;
        ExperimentKind kind;
        const char* name;
    };
    std::vector<ExpCmd> experiment_cmds;
    experiment_cmds.reserve(3);  // options bind references into the elements
    auto add_experiment = [&](const char* name, const char* help, ExperimentKind kind) {
        auto* cmd = app.add_subcommand(name, help);
        experiment_cmds.push_back({cmd, "", CommonFlags{}, kind, name});
        auto& e = experiment_cmds.back();
        cmd->add_option("--config", e.config, "Experiment config (JSON)")->required();
        cmd->add_option("--seed", e.flags.seed, "Override the config seed");
        cmd->add_option("--reps", e.flags.reps, "Override the config replication count");
        cmd->add_option("--threads", e.flags.threads, "Worker cap (0 = all cores)");
        add_output_flags(cmd, e.flags);
    };
    add_experiment("power", "Warp-speed rejection-rate table over scenario pairs",
                   ExperimentKind::PowerTable);
    add_experiment("sweep", "Power curve along a t degrees-of-freedom grid",
                   ExperimentKind::DfSweep);
    add_experiment("percentiles", "Percentiles of the scaled statistic under a null",
                   ExperimentKind::PercentileTable);

    // ingest-returns
    auto* ingr = app.add_subcommand(
        "ingest-returns", "Price series -> log returns -> windowed covariances");
    std::string ingr_csv, ingr_columns, ingr_out, ingr_divisor = "n-1";
    std::size_t ingr_window = 0;
    ingr->add_option("--csv", ingr_csv, "Input CSV (timestamp + price columns)")
        ->required();
    ingr->add_option("--columns", ingr_columns,
                     "Comma-separated column subset (default: all)");
    ingr->add_option("--window", ingr_window, "Rows per covariance window (>= 2)")
        ->required();
    ingr->add_option("--divisor", ingr_divisor,
                     "Covariance estimator divisor: n-1 (default) or n")
        ->check(CLI::IsMember({"n-1", "n"}));
    ingr->add_option("--out", ingr_out, "Output matrix-sample CSV")->required();

    // ingest-groups
    auto* ingg = app.add_subcommand(
        "ingest-groups", "Grouped records -> per-group covariances, split in two");
    std::string ingg_csv, ingg_group, ingg_features, ingg_a, ingg_outa, ingg_outb;
    ingg->add_option("--csv", ingg_csv, "Input CSV")->required();
    ingg->add_option("--group-col", ingg_group, "Group label column")->required();
    ingg->add_option("--features", ingg_features, "Comma-separated feature columns")
        ->required();
    ingg->add_option("--a-labels", ingg_a,
                     "Labels routed to the first sample: 'l1,l2,...' or @file")
        ->required();
    ingg->add_option("--out-a", ingg_outa, "First output matrix-sample CSV")->required();
    ingg->add_option("--out-b", ingg_outb, "Second output matrix-sample CSV")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("spdtest");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (test->parsed()) {
            test_flags.seed_given = seed_opt->count() > 0;
            return run_test_command(x_path, y_path, config_path, nu, sigma, omega, boot,
                                    alpha, test_flags);
        }
        for (auto& e : experiment_cmds) {
            if (!e.cmd->parsed()) continue;
            e.flags.seed_given =
                e.cmd->get_option("--seed")->count() > 0;
            return run_experiment(e.config, e.kind, e.name, e.flags);
        }
        if (ingr->parsed())
            return run_ingest_returns(ingr_csv, ingr_columns, ingr_window, ingr_divisor,
                                      ingr_out);
        if (ingg->parsed())
            return run_ingest_groups(ingg_csv, ingg_group, ingg_features, ingg_a,
                                     ingg_outa, ingg_outb);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const PivotFailureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace spdtest
