#include "spdtest/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace spdtest {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trimmed(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm)
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

}  // namespace

long long parse_timestamp(const std::string& text) {
    const std::string t = trimmed(text);
    if (t.empty()) throw CsvFormatError("empty timestamp");

    // pure integer epoch value
    bool integral = t[0] == '-' || std::isdigit(static_cast<unsigned char>(t[0]));
    for (std::size_t i = 1; integral && i < t.size(); ++i)
        integral = std::isdigit(static_cast<unsigned char>(t[i]));
    if (integral) {
        try {
            return std::stoll(t) * 1000;
        } catch (const std::exception&) {
            throw CsvFormatError("timestamp out of range: " + t);
        }
    }

    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0.0;
    int n = std::sscanf(t.c_str(), "%d-%d-%d", &y, &mo, &d);
    if (n != 3) throw CsvFormatError("unparseable timestamp '" + t + "'");
    const auto time_pos = t.find_first_of("T ");
    if (time_pos != std::string::npos) {
        const std::string rest = t.substr(time_pos + 1);
        n = std::sscanf(rest.c_str(), "%d:%d:%lf", &h, &mi, &sec);
        if (n < 2) throw CsvFormatError("unparseable time of day in '" + t + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec >= 61.0)
        throw CsvFormatError("timestamp field out of range in '" + t + "'");
    const long long days = days_from_civil(y, static_cast<unsigned>(mo),
                                           static_cast<unsigned>(d));
    return ((days * 24 + h) * 60 + mi) * 60000 + static_cast<long long>(sec * 1000.0);
}

SeriesTable read_series_csv(const std::string& path,
                            const std::vector<std::string>& use_columns,
                            ReadReport* report) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw CsvFormatError(path + ": empty file");
    const auto header = split_line(lines[0]);
    if (header.size() < 2)
        throw CsvFormatError(path + ": need a timestamp column plus at least one series");

    std::vector<std::size_t> selected;  // indices into header, excluding col 0
    if (use_columns.empty()) {
        for (std::size_t c = 1; c < header.size(); ++c) selected.push_back(c);
    } else {
        for (const auto& want : use_columns) {
            auto match = [&](const std::string& h) { return trimmed(h) == trimmed(want); };
            auto it = std::find_if(header.begin() + 1, header.end(), match);
            if (it == header.end())
                throw CsvFormatError(path + ": no column named '" + want + "'");
            selected.push_back(static_cast<std::size_t>(it - header.begin()));
        }
    }

    SeriesTable s;
    for (std::size_t c : selected) s.column_names.push_back(trimmed(header[c]));
    s.columns.resize(selected.size());

    std::size_t dropped = 0;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trimmed(lines[r]).empty()) continue;
        const auto fields = split_line(lines[r]);
        if (fields.size() != header.size()) {
            ++dropped;
            continue;
        }
        std::vector<double> vals(selected.size());
        bool ok = true;
        for (std::size_t k = 0; ok && k < selected.size(); ++k)
            ok = parse_double(fields[selected[k]], vals[k]);
        if (!ok) {
            ++dropped;
            continue;
        }
        s.timestamps.push_back(trimmed(fields[0]));
        s.time_keys.push_back(parse_timestamp(fields[0]));
        for (std::size_t k = 0; k < selected.size(); ++k) s.columns[k].push_back(vals[k]);
    }
    if (report) report->dropped_rows = dropped;

    for (std::size_t r = 1; r < s.rows(); ++r)
        if (s.time_keys[r] <= s.time_keys[r - 1])
            throw CsvFormatError(path + ": timestamps not strictly increasing at row " +
                                 std::to_string(r) + " ('" + s.timestamps[r] + "')");
    return s;
}

SeriesTable log_returns(const SeriesTable& s) {
    if (s.rows() < 2)
        throw TooShortError("log_returns: need at least 2 rows, have " +
                            std::to_string(s.rows()));
    for (std::size_t c = 0; c < s.width(); ++c)
        for (std::size_t r = 0; r < s.rows(); ++r)
            if (!(s.columns[c][r] > 0.0))
                throw NonPositiveValueError("log_returns: non-positive value at row " +
                                            std::to_string(r) + ", column '" +
                                            s.column_names[c] + "'");
    SeriesTable out;
    out.column_names = s.column_names;
    out.timestamps.assign(s.timestamps.begin() + 1, s.timestamps.end());
    out.time_keys.assign(s.time_keys.begin() + 1, s.time_keys.end());
    out.columns.resize(s.width());
    for (std::size_t c = 0; c < s.width(); ++c) {
        out.columns[c].reserve(s.rows() - 1);
        for (std::size_t r = 1; r < s.rows(); ++r)
            out.columns[c].push_back(std::log(s.columns[c][r] / s.columns[c][r - 1]));
    }
    return out;
}

MatrixSample windowed_covariances(const SeriesTable& s, std::size_t window,
                                  CovDivisor divisor) {
    if (window < 2)
        throw TooShortError("windowed_covariances: window must be at least 2");
    if (s.rows() < window)
        throw TooShortError("windowed_covariances: " + std::to_string(s.rows()) +
                            " rows is shorter than one window of " +
                            std::to_string(window));
    const std::size_t d = s.width();
    const std::size_t count = s.rows() / window;
    MatrixSample out;
    std::vector<std::vector<double>> obs(window, std::vector<double>(d));
    for (std::size_t w = 0; w < count; ++w) {
        for (std::size_t t = 0; t < window; ++t)
            for (std::size_t c = 0; c < d; ++c)
                obs[t][c] = s.columns[c][w * window + t];
        out.push_back(covariance_matrix(obs, d, divisor));
    }
    return out;
}

GroupedRecords read_grouped_csv(const std::string& path, const std::string& group_column,
                                const std::vector<std::string>& feature_columns,
                                ReadReport* report) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw CsvFormatError(path + ": empty file");
    const auto header = split_line(lines[0]);

    auto column_index = [&](const std::string& name) -> std::size_t {
        auto match = [&](const std::string& h) { return trimmed(h) == trimmed(name); };
        auto it = std::find_if(header.begin(), header.end(), match);
        if (it == header.end())
            throw CsvFormatError(path + ": no column named '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t group_idx = column_index(group_column);
    std::vector<std::size_t> feat_idx;
    for (const auto& f : feature_columns) feat_idx.push_back(column_index(f));
    if (feat_idx.empty()) throw CsvFormatError(path + ": no feature columns selected");

    GroupedRecords g;
    for (const auto& f : feature_columns) g.feature_names.push_back(trimmed(f));

    std::size_t dropped = 0;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trimmed(lines[r]).empty()) continue;
        const auto fields = split_line(lines[r]);
        if (fields.size() != header.size()) {
            ++dropped;
            continue;
        }
        std::vector<double> vals(feat_idx.size());
        bool ok = true;
        for (std::size_t k = 0; ok && k < feat_idx.size(); ++k)
            ok = parse_double(fields[feat_idx[k]], vals[k]);
        const std::string key = trimmed(fields[group_idx]);
        if (!ok || key.empty()) {
            ++dropped;
            continue;
        }
        g.group_keys.push_back(key);
        g.features.push_back(std::move(vals));
    }
    if (report) report->dropped_rows = dropped;
    return g;
}

std::pair<MatrixSample, MatrixSample> group_covariances(
    const GroupedRecords& g, const std::function<bool(const std::string&)>& in_first) {
    const std::size_t d = g.feature_names.size();
    std::vector<std::string> order;  // group labels, first appearance
    for (const auto& key : g.group_keys)
        if (std::find(order.begin(), order.end(), key) == order.end())
            order.push_back(key);

    MatrixSample first, second;
    for (const auto& key : order) {
        std::vector<std::vector<double>> obs;
        for (std::size_t r = 0; r < g.group_keys.size(); ++r)
            if (g.group_keys[r] == key) obs.push_back(g.features[r]);
        if (obs.size() < 2)
            throw GroupTooSmallError("group '" + key + "' has " +
                                     std::to_string(obs.size()) +
                                     " record(s); need at least 2 for a covariance");
        (in_first(key) ? first : second).push_back(covariance_matrix(obs, d));
    }
    if (first.empty() || second.empty())
        throw EmptySideError("group split left " +
                             std::string(first.empty() ? "the first" : "the second") +
                             " sample empty");
    return {std::move(first), std::move(second)};
}

void write_matrix_sample(const MatrixSample& sample, const std::string& path) {
    if (sample.empty()) throw EmptySampleError("write_matrix_sample: empty sample");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    const std::size_t d = sample.dim();
    out << "dim," << d << "\n";
    char buf[40];
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const Matrix& m = sample[k].entries();
        for (std::size_t i = 0; i < d * d; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", m.data()[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

MatrixSample read_matrix_sample(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw CsvFormatError(path + ": empty file");
    const auto head = split_line(lines[0]);
    if (head.size() != 2 || trimmed(head[0]) != "dim")
        throw CsvFormatError(path + ": first line must be 'dim,<d>'");
    std::size_t d = 0;
    try {
        const long long v = std::stoll(trimmed(head[1]));
        if (v <= 0) throw std::out_of_range("");
        d = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw CsvFormatError(path + ": bad dimension '" + head[1] + "'");
    }

    MatrixSample sample;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trimmed(lines[r]).empty()) continue;
        const auto fields = split_line(lines[r]);
        if (fields.size() != d * d)
            throw CsvFormatError(path + ": line " + std::to_string(r + 1) + " has " +
                                 std::to_string(fields.size()) + " values, expected " +
                                 std::to_string(d * d));
        Matrix m(d, d);
        for (std::size_t i = 0; i < d * d; ++i)
            if (!parse_double(fields[i], m.data()[i]))
                throw CsvFormatError(path + ": bad value '" + fields[i] + "' on line " +
                                     std::to_string(r + 1));
        sample.push_back(validate_spd(m, Definiteness::Psd));
    }
    if (sample.empty()) throw EmptySampleError(path + ": no matrices");
    return sample;
}

SpdMatrix parse_matrix_arg(const std::string& text, std::size_t dim, Definiteness mode) {
    const std::string t = trimmed(text);
    if (t == "identity") return SpdMatrix::identity(dim);
    if (t.rfind("identity*", 0) == 0) {
        double c = 0.0;
        if (!parse_double(t.substr(9), c))
            throw CsvFormatError("bad scalar in matrix argument '" + text + "'");
        if (c < 0.0) throw NotPsdError("matrix argument '" + text + "' is not PSD");
        return SpdMatrix::scaled_identity(dim, c);
    }
    // otherwise: path to a d x d CSV without header
    const auto lines = read_lines(t);
    std::vector<std::vector<double>> rows;
    for (const auto& line : lines) {
        if (trimmed(line).empty()) continue;
        const auto fields = split_line(line);
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (!parse_double(fields[i], row[i]))
                throw CsvFormatError(t + ": bad value '" + fields[i] + "'");
        rows.push_back(std::move(row));
    }
    if (rows.size() != dim)
        throw DimensionMismatchError(t + ": matrix has " + std::to_string(rows.size()) +
                                     " rows, expected " + std::to_string(dim));
    Matrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (rows[i].size() != dim)
            throw DimensionMismatchError(t + ": row " + std::to_string(i + 1) + " has " +
                                         std::to_string(rows[i].size()) +
                                         " values, expected " + std::to_string(dim));
        for (std::size_t j = 0; j < dim; ++j) m(i, j) = rows[i][j];
    }
    return validate_spd(m, mode);
}

}  // namespace spdtest
