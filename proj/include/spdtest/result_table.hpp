#ifndef SPDTEST_RESULT_TABLE_HPP
#define SPDTEST_RESULT_TABLE_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace spdtest {

/// Labeled grid of experiment results. Cells are doubles; NaN marks an
/// intentionally empty cell (the unfilled lower triangle of symmetric
/// power tables). Metadata is an ordered key/value echo of the run
/// (seed, replication count, parameters, software version, ...).
struct ResultTable {
    /// Percent cells are emitted to CSV with one decimal place; Full cells
    /// with shortest-exact precision.
    enum class ValueKind { Percent, Full };

    std::string title;
    ValueKind value_kind = ValueKind::Full;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<double> cells;  // row-major, rows x cols
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t rows() const { return row_labels.size(); }
    std::size_t cols() const { return col_labels.size(); }

    double& cell(std::size_t r, std::size_t c) { return cells[r * cols() + c]; }
    double cell(std::size_t r, std::size_t c) const { return cells[r * cols() + c]; }

    /// Lookup by labels; throws Error when a label is missing.
    double cell(const std::string& row, const std::string& col) const;

    void set_meta(const std::string& key, const std::string& value);
    const std::string* find_meta(const std::string& key) const;
};

/// Structural equality with NaN cells comparing equal.
bool same_table(const ResultTable& a, const ResultTable& b);

std::string emit_csv(const ResultTable& t);
ResultTable parse_csv(const std::string& text);

std::string emit_json(const ResultTable& t);
ResultTable parse_json(const std::string& text);

enum class OutputFormat { Csv, Json };

void write_table(const ResultTable& t, const std::string& path, OutputFormat format);
ResultTable read_table(const std::string& path, OutputFormat format);

}  // namespace spdtest

#endif  // SPDTEST_RESULT_TABLE_HPP
