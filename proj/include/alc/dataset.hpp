#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

// Tabular data handling: CSV ingestion, schema inference, categorical
// encoding, discretization of continuous columns, target removal, and the
// swap-based anonymizer used for experiments.

namespace alc {

enum class ColumnKind { categorical, continuous };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::categorical;
    int distinct_count = 0;
    // valid iff kind == continuous
    double min = 0.0;
    double max = 0.0;
};

struct Column {
    ColumnSchema schema;
    // categorical: integer codes stored as double; continuous: raw values
    std::vector<double> values;
    // categorical only: code -> text and text -> code (bijective)
    std::vector<std::string> decode;
    std::unordered_map<std::string, int> encode;
    // continuous only: companion bin indices, filled by discretize()
    std::vector<int> bins;
    int bin_count = 0;
    double bin_min = 0.0;
    double bin_width = 0.0;

    bool is_continuous() const { return schema.kind == ColumnKind::continuous; }
};

struct LoadOptions {
    // numeric columns with more distinct values than this are continuous
    int continuous_threshold = 20;
    // optional column grouping multiple rows into one individual
    std::optional<std::string> id_column;
};

struct AnonymizationConfig {
    double swap_fraction = 0.0;  // in [0,1]
    std::uint64_t seed = 0;
};

class TabularDataset {
public:
    std::vector<Column> columns;
    std::vector<std::int64_t> row_ids;
    // defaults to row_ids; differs only when an id column groups rows
    std::vector<std::int64_t> individual_ids;

    std::size_t row_count() const { return row_ids.empty() ? 0 : row_ids.size(); }
    std::size_t column_count() const { return columns.size(); }

    int column_index(std::string_view name) const;       // -1 if absent
    const Column& column(std::string_view name) const;   // throws if absent
    Column& column(std::string_view name);

    // categorical code or raw continuous value at (row, column name)
    double cell(std::size_t row, std::string_view name) const;
    std::string cell_text(std::size_t row, std::size_t col) const;
};

// Parses a RFC 4180 CSV file with a header row and infers the schema.
// Rows with missing continuous values are dropped with a warning on stderr;
// missing categorical values become an (empty-string) category of their own.
TabularDataset load_csv(const std::string& path, const LoadOptions& options = {});

// Same, but categorical encodings and continuous bin edges are taken from
// `reference` so cell values are directly comparable across the two tables.
// Unseen categorical values extend the maps.
TabularDataset load_csv_like(const std::string& path, const TabularDataset& reference,
                             const LoadOptions& options = {});

void write_csv(const TabularDataset& ds, const std::string& path);

// Equal-width binning of every continuous column over its [min, max] into
// `bins` bins; the max value lands in bin bins-1. A zero-range column maps
// to bin 0 everywhere. The raw column is retained.
TabularDataset discretize(const TabularDataset& ds, int bins = 20);

// Re-encodes categorical columns and recomputes bin indices of `ds` using
// the maps and bin edges of `reference` (shared columns only).
TabularDataset align_to(const TabularDataset& ds, const TabularDataset& reference);

// Removes every row whose individual id is in `ids`. Unknown ids are an error.
TabularDataset remove_targets(const TabularDataset& ds, const std::vector<std::int64_t>& ids);

// Per column, a seeded ceil(swap_fraction*N)-subset of cells is permuted
// among themselves. Column value multisets are preserved exactly.
TabularDataset swap_anonymize(const TabularDataset& ds, const AnonymizationConfig& cfg);

// Appends k extra copies of each named record, with fresh row/individual ids.
TabularDataset replicate_records(const TabularDataset& ds, const std::vector<std::int64_t>& ids,
                                 int k);

// Dataset restricted to the given row positions (in the given order).
TabularDataset select_rows(const TabularDataset& ds, const std::vector<std::size_t>& rows);

}  // namespace alc
