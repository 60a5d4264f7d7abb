#include "spdtest/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spdtest/errors.hpp"

namespace spdtest {

namespace {

std::string format_cell(double v, ResultTable::ValueKind kind) {
    if (std::isnan(v)) return "";
    char buf[40];
    if (kind == ResultTable::ValueKind::Percent)
        std::snprintf(buf, sizeof buf, "%.1f", v);
    else
        std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool needs_quoting(const std::string& s) {
    if (!s.empty() && s.front() == '#') return true;
    return s.find_first_of(",\"\n") != std::string::npos;
}

std::string csv_escape(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw CsvFormatError("unterminated quote in CSV line: " + line);
    fields.push_back(cur);
    return fields;
}

const char* kind_name(ResultTable::ValueKind k) {
    return k == ResultTable::ValueKind::Percent ? "percent" : "full";
}

ResultTable::ValueKind kind_from_name(const std::string& s) {
    if (s == "percent") return ResultTable::ValueKind::Percent;
    if (s == "full") return ResultTable::ValueKind::Full;
    throw CsvFormatError("unknown value kind '" + s + "'");
}

}  // namespace

double ResultTable::cell(const std::string& row, const std::string& col) const {
    for (std::size_t r = 0; r < rows(); ++r) {
        if (row_labels[r] != row) continue;
        for (std::size_t c = 0; c < cols(); ++c)
            if (col_labels[c] == col) return cell(r, c);
    }
    throw Error("ResultTable: no cell (" + row + ", " + col + ")");
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
    for (auto& kv : metadata)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    metadata.emplace_back(key, value);
}

const std::string* ResultTable::find_meta(const std::string& key) const {
    for (const auto& kv : metadata)
        if (kv.first == key) return &kv.second;
    return nullptr;
}

bool same_table(const ResultTable& a, const ResultTable& b) {
    if (a.title != b.title || a.value_kind != b.value_kind ||
        a.row_labels != b.row_labels || a.col_labels != b.col_labels ||
        a.metadata != b.metadata || a.cells.size() != b.cells.size())
        return false;
    for (std::size_t k = 0; k < a.cells.size(); ++k) {
        const bool na = std::isnan(a.cells[k]);
        const bool nb = std::isnan(b.cells[k]);
        if (na != nb) return false;
        if (!na && a.cells[k] != b.cells[k]) return false;
    }
    return true;
}

std::string emit_csv(const ResultTable& t) {
    std::ostringstream out;
    out << "# title=" << t.title << "\n";
    out << "# value_kind=" << kind_name(t.value_kind) << "\n";
    for (const auto& [k, v] : t.metadata) out << "# " << k << "=" << v << "\n";
    for (const auto& c : t.col_labels) out << "," << csv_escape(c);
    out << "\n";
    for (std::size_t r = 0; r < t.rows(); ++r) {
        out << csv_escape(t.row_labels[r]);
        for (std::size_t c = 0; c < t.cols(); ++c)
            out << "," << csv_escape(format_cell(t.cell(r, c), t.value_kind));
        out << "\n";
    }
    return out.str();
}

ResultTable parse_csv(const std::string& text) {
    ResultTable t;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::string body = line.substr(line.rfind("# ", 0) == 0 ? 2 : 1);
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw CsvFormatError("malformed metadata line: " + line);
            const std::string key = body.substr(0, eq);
            const std::string value = body.substr(eq + 1);
            if (key == "title")
                t.title = value;
            else if (key == "value_kind")
                t.value_kind = kind_from_name(value);
            else
                t.metadata.emplace_back(key, value);
            continue;
        }
        auto fields = split_csv_line(line);
        if (!header_seen) {
            if (fields.size() < 2)
                throw CsvFormatError("header row must list at least one column");
            header_seen = true;
            t.col_labels.assign(fields.begin() + 1, fields.end());
            continue;
        }
        if (fields.size() != t.col_labels.size() + 1)
            throw CsvFormatError("row '" + fields[0] + "' has " +
                                 std::to_string(fields.size() - 1) + " cells, expected " +
                                 std::to_string(t.col_labels.size()));
        t.row_labels.push_back(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            if (fields[c].empty()) {
                t.cells.push_back(std::nan(""));
            } else {
                try {
                    t.cells.push_back(std::stod(fields[c]));
                } catch (const std::exception&) {
                    throw CsvFormatError("bad numeric cell '" + fields[c] + "'");
                }
            }
        }
    }
    if (!header_seen) throw CsvFormatError("missing header row");
    return t;
}

std::string emit_json(const ResultTable& t) {
    nlohmann::ordered_json j;
    j["title"] = t.title;
    j["value_kind"] = kind_name(t.value_kind);
    j["row_labels"] = t.row_labels;
    j["col_labels"] = t.col_labels;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < t.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < t.cols(); ++c) {
            const double v = t.cell(r, c);
            if (std::isnan(v))
                row.push_back(nullptr);
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    j["cells"] = std::move(rows);
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.metadata) meta[k] = v;
    j["metadata"] = std::move(meta);
    return j.dump(2) + "\n";
}

ResultTable parse_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw CsvFormatError(std::string("bad result JSON: ") + e.what());
    }
    ResultTable t;
    try {
        t.title = j.at("title").get<std::string>();
        t.value_kind = kind_from_name(j.at("value_kind").get<std::string>());
        t.row_labels = j.at("row_labels").get<std::vector<std::string>>();
        t.col_labels = j.at("col_labels").get<std::vector<std::string>>();
        for (const auto& row : j.at("cells"))
            for (const auto& cell : row)
                t.cells.push_back(cell.is_null() ? std::nan("") : cell.get<double>());
        for (const auto& [k, v] : j.at("metadata").items())
            t.metadata.emplace_back(k, v.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw CsvFormatError(std::string("bad result JSON: ") + e.what());
    }
    if (t.cells.size() != t.rows() * t.cols())
        throw CsvFormatError("result JSON cell count mismatch");
    return t;
}

void write_table(const ResultTable& t, const std::string& path, OutputFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << (format == OutputFormat::Csv ? emit_csv(t) : emit_json(t));
    if (!out) throw Error("failed writing '" + path + "'");
}

ResultTable read_table(const std::string& path, OutputFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return format == OutputFormat::Csv ? parse_csv(buf.str()) : parse_json(buf.str());
}

}  // namespace spdtest
