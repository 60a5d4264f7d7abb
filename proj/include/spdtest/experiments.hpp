#ifndef SPDTEST_EXPERIMENTS_HPP
#define SPDTEST_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdtest/bootstrap.hpp"
#include "spdtest/result_table.hpp"

namespace spdtest {

/// "identity", "identity*<c>", or an explicit matrix; resolved against the
/// experiment dimension when the config is materialized.
struct MatrixExpr {
    double identity_factor = 1.0;
    std::optional<Matrix> explicit_matrix;

    static MatrixExpr identity(double factor = 1.0);
    static MatrixExpr matrix(Matrix m);

    SpdMatrix resolve(std::size_t dim, Definiteness mode) const;
    std::string label() const;
};

/// One weight-measure grid entry. nu is the determinant exponent of the
/// transform (the measure is NCW(2*nu, sigma, omega)).
struct ParamsSpec {
    double nu = 1.0;
    MatrixExpr sigma;
    MatrixExpr omega;

    NcwParams resolve(std::size_t dim) const;
    std::string label() const;
};

enum class ExperimentKind { PowerTable, DfSweep, PercentileTable, TwoSampleTest };

/// Declarative experiment description, 1:1 with the JSON config file.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::PowerTable;
    std::size_t dim = 0;
    std::vector<ScenarioSpec> scenarios;
    std::vector<std::pair<std::size_t, std::size_t>> size_pairs;
    std::vector<ParamsSpec> params_grid;
    std::size_t n_reps = 2000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::string output_path;              // optional; CLI may override
    OutputFormat output_format = OutputFormat::Csv;
    std::vector<double> df_grid;          // df sweep only
    std::size_t sweep_nobs = 500;         // df sweep only
};

/// Parse + schema-validate a config; errors carry exact field paths
/// ("$.scenarios[2].shape: ...").
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Rejection-percentage grid over ordered scenario pairs (upper triangle
/// incl. diagonal when n1 == n2, full grid otherwise), one row block per
/// params/size combination. Cells in percent.
ResultTable run_power_table(const ExperimentConfig& cfg, unsigned threads = 0);

/// Power curve of scaled-Wishart-vs-CMT tests along the df grid.
ResultTable run_df_sweep(const ExperimentConfig& cfg, unsigned threads = 0);

/// Empirical (1-alpha) percentiles of the scaled statistic under the null
/// scenario (no bootstrap): params rows x size columns.
ResultTable run_percentile_table(const ExperimentConfig& cfg, unsigned threads = 0);

struct TestResult {
    std::string params_label;
    StatisticValue statistic;
    double p_value = 1.0;
    std::size_t b_reps = 0;
    std::uint64_t seed = 0;
};

/// Bootstrap test of two observed samples, one result per params entry.
std::vector<TestResult> run_two_sample_test(const ExperimentConfig& cfg,
                                            const MatrixSample& x, const MatrixSample& y,
                                            unsigned threads = 0);

/// Results as an emittable table: statistic/scaled/p-value rows, one
/// column per params entry.
ResultTable two_sample_table(const std::vector<TestResult>& results, std::size_t n1,
                             std::size_t n2);

}  // namespace spdtest

#endif  // SPDTEST_EXPERIMENTS_HPP
