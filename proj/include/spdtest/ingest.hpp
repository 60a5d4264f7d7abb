#ifndef SPDTEST_INGEST_HPP
#define SPDTEST_INGEST_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spdtest/sample.hpp"

namespace spdtest {

/// Aligned time series: strictly increasing timestamps, one named real
/// column per variable, no missing cells (cleaning happens at load).
struct SeriesTable {
    std::vector<std::string> timestamps;   // original text
    std::vector<long long> time_keys;      // parsed ordering keys (ms)
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;  // column-major, aligned by row

    std::size_t rows() const { return timestamps.size(); }
    std::size_t width() const { return columns.size(); }
};

/// Flat records with a group label and a fixed feature vector each.
struct GroupedRecords {
    std::vector<std::string> feature_names;
    std::vector<std::string> group_keys;            // one per record
    std::vector<std::vector<double>> features;      // one per record
};

struct ReadReport {
    std::size_t dropped_rows = 0;  // rows removed for missing/bad cells
};

/// Load a CSV whose first column is an ISO-8601 or integer timestamp.
/// `use_columns` selects a subset of value columns (empty = all). Rows
/// with any missing or non-numeric cell are dropped and counted.
SeriesTable read_series_csv(const std::string& path,
                            const std::vector<std::string>& use_columns = {},
                            ReadReport* report = nullptr);

/// Row t becomes log(v_t / v_{t-1}) per column; one fewer row.
SeriesTable log_returns(const SeriesTable& s);

/// Partition rows into consecutive non-overlapping windows (last partial
/// window dropped); each window yields its centered sample covariance,
/// validated PSD. The estimator divisor defaults to window-1.
MatrixSample windowed_covariances(const SeriesTable& s, std::size_t window,
                                  CovDivisor divisor = CovDivisor::NMinusOne);

/// Load grouped records: `group_column` supplies the label, `feature_columns`
/// the vector entries; rows with missing cells are dropped and counted.
GroupedRecords read_grouped_csv(const std::string& path, const std::string& group_column,
                                const std::vector<std::string>& feature_columns,
                                ReadReport* report = nullptr);

/// Per-group centered covariances, routed into (first, second) by the
/// predicate on the group label. Groups keep first-appearance order.
std::pair<MatrixSample, MatrixSample> group_covariances(
    const GroupedRecords& g, const std::function<bool(const std::string&)>& in_first);

// --- matrix-sample files (shared with the CLI) ---
// Line 1: "dim,<d>"; each further line: one matrix, row-major, d*d values.

void write_matrix_sample(const MatrixSample& sample, const std::string& path);
MatrixSample read_matrix_sample(const std::string& path);

/// Parse a matrix argument: "identity", "identity*<scalar>", or a path to
/// a headerless CSV with d rows of d values. Validates in `mode`.
SpdMatrix parse_matrix_arg(const std::string& text, std::size_t dim, Definiteness mode);

/// Timestamp parser used by read_series_csv (exposed for tests): integer
/// epoch values pass through (as ms); otherwise ISO-8601
/// "YYYY-MM-DD[ T]HH:MM[:SS[.fff]]" is accepted.
long long parse_timestamp(const std::string& text);

}  // namespace spdtest

#endif  // SPDTEST_INGEST_HPP
