#ifndef CRSLEARN_DATASET_HPP
#define CRSLEARN_DATASET_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

namespace crslearn {

enum class ColumnKind { continuous, categorical, label };

const char* to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

/// One column of a loaded table. Continuous columns hold parsed doubles,
/// categorical and label columns hold the raw strings.
struct RawColumn {
    std::string name;
    ColumnKind kind = ColumnKind::categorical;
    std::vector<double> numeric;
    std::vector<std::string> text;
};

/// Typed tabular data with exactly one label column. Rows are complete:
/// missing values are rejected at load time.
struct RawDataset {
    std::vector<RawColumn> columns;
    std::size_t n = 0;

    std::size_t label_index() const;
    const RawColumn& label_column() const { return columns[label_index()]; }

    /// Row subset in the given index order. Used for CV folds, so that code
    /// fitting on a fold can only ever see that fold's rows.
    RawDataset subset(std::span<const std::size_t> indices) const;
};

/// Per-column kind overrides, e.g. parsed from a schema file. Values must be
/// "continuous" or "categorical".
using SchemaOverrides = std::map<std::string, ColumnKind>;

SchemaOverrides load_schema_file(const std::string& path);

/// Loads a UTF-8 CSV with a header row. Column kinds are inferred (a column
/// where every cell parses as a number is continuous, anything else
/// categorical) unless overridden. Empty cells are treated as missing and
/// rejected; any other token (including "?") is a value.
RawDataset load_csv(const std::string& path, const std::string& label_col,
                    const SchemaOverrides& overrides = {});

/// Same, from an in-memory CSV string (tests, pipes).
RawDataset parse_csv(const std::string& content, const std::string& label_col,
                     const SchemaOverrides& overrides = {}, const std::string& origin = "<memory>");

}  // namespace crslearn

#endif
