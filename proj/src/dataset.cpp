#include "crslearn/dataset.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crslearn/errors.hpp"

namespace crslearn {

const char* to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::continuous: return "continuous";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::label: return "label";
    }
    return "?";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "categorical") return ColumnKind::categorical;
    if (s == "label") return ColumnKind::label;
    throw ConfigError("unknown column kind '" + s + "'");
}

std::size_t RawDataset::label_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind == ColumnKind::label) return i;
    }
    throw DataError("dataset has no label column");
}

RawDataset RawDataset::subset(std::span<const std::size_t> indices) const {
    RawDataset out;
    out.n = indices.size();
    out.columns.reserve(columns.size());
    for (const auto& col : columns) {
        RawColumn c;
        c.name = col.name;
        c.kind = col.kind;
        if (col.kind == ColumnKind::continuous) {
            c.numeric.reserve(indices.size());
            for (std::size_t i : indices) c.numeric.push_back(col.numeric[i]);
        } else {
            c.text.reserve(indices.size());
            for (std::size_t i : indices) c.text.push_back(col.text[i]);
        }
        out.columns.push_back(std::move(c));
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splits one CSV record. Handles double-quoted fields with embedded commas
// and doubled quotes; unquoted fields are trimmed.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no,
                                        const std::string& origin) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"' && trim(cur).empty()) {
            quoted = true;
            cur.clear();
        } else if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) {
        throw DataError(origin + ":" + std::to_string(line_no) + ": unterminated quote");
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

SchemaOverrides load_schema_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("schema file '" + path + "': " + e.what());
    }
    const nlohmann::json& cols = j.contains("columns") ? j.at("columns") : j;
    if (!cols.is_object()) throw DataError("schema file '" + path + "': expected an object of column kinds");
    SchemaOverrides out;
    for (auto it = cols.begin(); it != cols.end(); ++it) {
        ColumnKind kind = column_kind_from_string(it.value().get<std::string>());
        if (kind == ColumnKind::label) {
            throw ConfigError("schema file may not declare label columns; use --label-col");
        }
        out[it.key()] = kind;
    }
    return out;
}

RawDataset parse_csv(const std::string& content, const std::string& label_col,
                     const SchemaOverrides& overrides, const std::string& origin) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw DataError(origin + ": empty file");
    std::vector<std::string> header = split_csv_line(line, 1, origin);
    if (header.empty()) throw DataError(origin + ": empty header");
    {
        std::set<std::string> seen;
        for (const auto& name : header) {
            if (name.empty()) throw DataError(origin + ": empty column name in header");
            if (!seen.insert(name).second) throw DataError(origin + ": duplicate column '" + name + "'");
        }
    }

    // an empty label_col loads a label-free table (prediction inputs)
    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!label_col.empty() && header[i] == label_col) label_idx = i;
    }
    if (!label_col.empty() && label_idx == header.size()) {
        throw DataError(origin + ": label column '" + label_col + "' not found");
    }

    std::vector<std::vector<std::string>> cells(header.size());
    std::size_t line_no = 1;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_csv_line(line, line_no, origin);
        if (fields.size() != header.size()) {
            throw DataError(origin + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i].empty()) {
                throw DataError(origin + ":" + std::to_string(line_no) + ": missing value in column '" +
                                header[i] + "'");
            }
            cells[i].push_back(std::move(fields[i]));
        }
        ++n;
    }
    if (n == 0) throw DataError(origin + ": no data rows");

    RawDataset ds;
    ds.n = n;
    ds.columns.resize(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        RawColumn& col = ds.columns[i];
        col.name = header[i];
        if (i == label_idx) {
            col.kind = ColumnKind::label;
            col.text = std::move(cells[i]);
            continue;
        }
        auto ov = overrides.find(col.name);
        if (ov != overrides.end()) {
            col.kind = ov->second;
        } else {
            double tmp;
            bool all_numeric = true;
            for (const auto& v : cells[i]) {
                if (!parse_double(v, tmp)) {
                    all_numeric = false;
                    break;
                }
            }
            col.kind = all_numeric ? ColumnKind::continuous : ColumnKind::categorical;
        }
        if (col.kind == ColumnKind::continuous) {
            col.numeric.reserve(n);
            for (std::size_t r = 0; r < n; ++r) {
                double v;
                if (!parse_double(cells[i][r], v)) {
                    throw DataError(origin + ": column '" + col.name + "' is continuous but row " +
                                    std::to_string(r + 1) + " holds '" + cells[i][r] + "'");
                }
                col.numeric.push_back(v);
            }
        } else {
            col.text = std::move(cells[i]);
        }
    }

    if (!label_col.empty()) {
        std::set<std::string> classes(ds.label_column().text.begin(), ds.label_column().text.end());
        if (classes.size() < 2) {
            throw DataError(origin + ": label column '" + label_col + "' has fewer than 2 classes");
        }
    }
    return ds;
}

RawDataset load_csv(const std::string& path, const std::string& label_col,
                    const SchemaOverrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), label_col, overrides, path);
}

}  // namespace crslearn
