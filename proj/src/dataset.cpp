#include "alc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace alc {

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    std::size_t i = 0;
    const std::size_t n = data.size();
    auto end_field = [&] { row.push_back(std::move(field)); field.clear(); };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < n) {
        char c = data[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && data[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // swallow; \n handles row end
        } else if (c == '\n') {
            end_row();
        } else {
            field.push_back(c);
        }
        ++i;
    }
    if (!field.empty() || !row.empty()) end_row();
    return rows;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void csv_write_field(std::ostream& out, const std::string& s) {
    if (s.find_first_of(",\"\n\r") != std::string::npos) {
        out << '"';
        for (char c : s) {
            if (c == '"') out << "\"\"";
            else out << c;
        }
        out << '"';
    } else {
        out << s;
    }
}

std::mt19937_64 column_rng(std::uint64_t seed, std::size_t col_index) {
    const std::uint64_t salted = static_cast<std::uint64_t>(col_index) + 0x9e3779b9ull;
    std::seed_seq seq{seed, salted};
    return std::mt19937_64(seq);
}

TabularDataset build_dataset(const std::vector<std::vector<std::string>>& rows,
                             const LoadOptions& options, const TabularDataset* reference) {
    if (rows.empty()) throw std::runtime_error("empty table");
    const std::vector<std::string>& header = rows.front();
    const std::size_t n_cols = header.size();
    const std::size_t n_rows = rows.size() - 1;
    if (n_rows == 0) throw std::runtime_error("empty table");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != n_cols) {
            throw std::runtime_error("ragged row " + std::to_string(r) + ": expected " +
                                     std::to_string(n_cols) + " fields, got " +
                                     std::to_string(rows[r].size()));
        }
    }

    // schema inference: numeric-valued columns above the distinct threshold
    // are continuous, everything else categorical
    std::vector<bool> continuous(n_cols, false);
    std::vector<std::vector<double>> numeric(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        bool all_numeric = true;
        numeric[c].resize(n_rows);
        std::set<std::string> distinct;
        for (std::size_t r = 0; r < n_rows; ++r) {
            const std::string& s = rows[r + 1][c];
            if (s.empty()) continue;  // missing; resolved after inference
            distinct.insert(s);
            if (all_numeric && !parse_double(s, numeric[c][r])) all_numeric = false;
        }
        bool is_cont = all_numeric && !distinct.empty() &&
                       static_cast<int>(distinct.size()) > options.continuous_threshold;
        if (reference) {
            int ri = reference->column_index(header[c]);
            if (ri >= 0) is_cont = reference->columns[ri].is_continuous() && all_numeric;
        }
        continuous[c] = is_cont;
    }

    // drop rows with a missing value in any continuous column
    std::vector<std::size_t> keep;
    keep.reserve(n_rows);
    std::size_t dropped = 0;
    for (std::size_t r = 0; r < n_rows; ++r) {
        bool ok = true;
        for (std::size_t c = 0; c < n_cols && ok; ++c) {
            if (continuous[c] && rows[r + 1][c].empty()) ok = false;
        }
        if (ok) keep.push_back(r);
        else ++dropped;
    }
    if (dropped > 0) {
        std::cerr << "warning: dropped " << dropped
                  << " row(s) with missing continuous values\n";
    }
    if (keep.empty()) throw std::runtime_error("empty table");

    TabularDataset ds;
    ds.columns.resize(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        Column& col = ds.columns[c];
        col.schema.name = header[c];
        col.values.reserve(keep.size());
        const Column* ref_col = nullptr;
        if (reference) {
            int ri = reference->column_index(header[c]);
            if (ri >= 0) ref_col = &reference->columns[ri];
        }
        if (continuous[c]) {
            col.schema.kind = ColumnKind::continuous;
            for (std::size_t r : keep) col.values.push_back(numeric[c][r]);
            col.schema.min = *std::min_element(col.values.begin(), col.values.end());
            col.schema.max = *std::max_element(col.values.begin(), col.values.end());
            std::set<double> d(col.values.begin(), col.values.end());
            col.schema.distinct_count = static_cast<int>(d.size());
        } else {
            col.schema.kind = ColumnKind::categorical;
            if (ref_col && !ref_col->is_continuous()) {
                col.decode = ref_col->decode;
                col.encode = ref_col->encode;
            } else {
                // encode in sorted text order so codes are stable
                std::set<std::string> distinct;
                for (std::size_t r : keep) distinct.insert(rows[r + 1][c]);
                for (const std::string& v : distinct) {
                    col.encode.emplace(v, static_cast<int>(col.decode.size()));
                    col.decode.push_back(v);
                }
            }
            for (std::size_t r : keep) {
                const std::string& v = rows[r + 1][c];
                auto it = col.encode.find(v);
                if (it == col.encode.end()) {
                    int code = static_cast<int>(col.decode.size());
                    it = col.encode.emplace(v, code).first;
                    col.decode.push_back(v);
                }
                col.values.push_back(static_cast<double>(it->second));
            }
            col.schema.distinct_count = static_cast<int>(col.decode.size());
        }
    }

    ds.row_ids.resize(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) ds.row_ids[r] = static_cast<std::int64_t>(r);
    ds.individual_ids = ds.row_ids;
    if (options.id_column) {
        int idx = ds.column_index(*options.id_column);
        if (idx < 0) throw std::runtime_error("id column not found: " + *options.id_column);
        const Column& idc = ds.columns[idx];
        for (std::size_t r = 0; r < keep.size(); ++r)
            ds.individual_ids[r] = static_cast<std::int64_t>(idc.values[r]);
    }
    return ds;
}

}  // namespace

int TabularDataset::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].schema.name == name) return static_cast<int>(i);
    }
    return -1;
}

const Column& TabularDataset::column(std::string_view name) const {
    int i = column_index(name);
    if (i < 0) throw std::runtime_error("no such column: " + std::string(name));
    return columns[i];
}

Column& TabularDataset::column(std::string_view name) {
    int i = column_index(name);
    if (i < 0) throw std::runtime_error("no such column: " + std::string(name));
    return columns[i];
}

double TabularDataset::cell(std::size_t row, std::string_view name) const {
    return column(name).values.at(row);
}

std::string TabularDataset::cell_text(std::size_t row, std::size_t col) const {
    const Column& c = columns.at(col);
    if (c.is_continuous()) return format_double(c.values.at(row));
    return c.decode.at(static_cast<std::size_t>(c.values.at(row)));
}

TabularDataset load_csv(const std::string& path, const LoadOptions& options) {
    return build_dataset(parse_csv(path), options, nullptr);
}

TabularDataset load_csv_like(const std::string& path, const TabularDataset& reference,
                             const LoadOptions& options) {
    TabularDataset ds = build_dataset(parse_csv(path), options, &reference);
    return align_to(ds, reference);
}

void write_csv(const TabularDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        if (c) out << ',';
        csv_write_field(out, ds.columns[c].schema.name);
    }
    out << '\n';
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        for (std::size_t c = 0; c < ds.columns.size(); ++c) {
            if (c) out << ',';
            csv_write_field(out, ds.cell_text(r, c));
        }
        out << '\n';
    }
}

TabularDataset discretize(const TabularDataset& ds, int bins) {
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    TabularDataset out = ds;
    for (Column& col : out.columns) {
        if (!col.is_continuous()) continue;
        col.bin_count = bins;
        col.bin_min = col.schema.min;
        const double range = col.schema.max - col.schema.min;
        col.bin_width = range / bins;
        col.bins.resize(col.values.size());
        for (std::size_t r = 0; r < col.values.size(); ++r) {
            int b = 0;
            if (range > 0.0) {
                b = static_cast<int>((col.values[r] - col.bin_min) / col.bin_width);
                if (b >= bins) b = bins - 1;  // max value clamps into the last bin
                if (b < 0) b = 0;
            }
            col.bins[r] = b;
        }
    }
    return out;
}

TabularDataset align_to(const TabularDataset& ds, const TabularDataset& reference) {
    TabularDataset out = ds;
    for (Column& col : out.columns) {
        int ri = reference.column_index(col.schema.name);
        if (ri < 0) continue;
        const Column& ref = reference.columns[ri];
        if (!col.is_continuous() && !ref.is_continuous()) {
            std::vector<std::string> texts(col.values.size());
            for (std::size_t r = 0; r < col.values.size(); ++r)
                texts[r] = col.decode.at(static_cast<std::size_t>(col.values[r]));
            col.decode = ref.decode;
            col.encode = ref.encode;
            for (std::size_t r = 0; r < texts.size(); ++r) {
                auto it = col.encode.find(texts[r]);
                if (it == col.encode.end()) {
                    int code = static_cast<int>(col.decode.size());
                    it = col.encode.emplace(texts[r], code).first;
                    col.decode.push_back(texts[r]);
                }
                col.values[r] = static_cast<double>(it->second);
            }
            col.schema.distinct_count = static_cast<int>(col.decode.size());
        } else if (col.is_continuous() && ref.is_continuous() && ref.bin_count > 0) {
            // share the reference's bin edges so bin indices are comparable
            col.bin_count = ref.bin_count;
            col.bin_min = ref.bin_min;
            col.bin_width = ref.bin_width;
            col.bins.resize(col.values.size());
            for (std::size_t r = 0; r < col.values.size(); ++r) {
                int b = 0;
                if (col.bin_width > 0.0) {
                    b = static_cast<int>((col.values[r] - col.bin_min) / col.bin_width);
                    if (b >= col.bin_count) b = col.bin_count - 1;
                    if (b < 0) b = 0;
                }
                col.bins[r] = b;
            }
        }
    }
    return out;
}

TabularDataset remove_targets(const TabularDataset& ds, const std::vector<std::int64_t>& ids) {
    std::unordered_set<std::int64_t> known(ds.individual_ids.begin(), ds.individual_ids.end());
    std::unordered_set<std::int64_t> drop;
    for (std::int64_t id : ids) {
        if (!known.count(id)) throw std::runtime_error("unknown id: " + std::to_string(id));
        drop.insert(id);
    }
    TabularDataset out;
    out.columns = ds.columns;
    for (Column& col : out.columns) {
        col.values.clear();
        col.bins.clear();
    }
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (drop.count(ds.individual_ids[r])) continue;
        out.row_ids.push_back(ds.row_ids[r]);
        out.individual_ids.push_back(ds.individual_ids[r]);
        for (std::size_t c = 0; c < ds.columns.size(); ++c) {
            out.columns[c].values.push_back(ds.columns[c].values[r]);
            if (!ds.columns[c].bins.empty())
                out.columns[c].bins.push_back(ds.columns[c].bins[r]);
        }
    }
    return out;
}

TabularDataset swap_anonymize(const TabularDataset& ds, const AnonymizationConfig& cfg) {
    if (cfg.swap_fraction < 0.0 || cfg.swap_fraction > 1.0)
        throw std::invalid_argument("swap_fraction must be in [0,1]");
    TabularDataset out = ds;
    const std::size_t n = ds.row_count();
    const auto n_swap = static_cast<std::size_t>(
        std::ceil(cfg.swap_fraction * static_cast<double>(n)));
    if (n_swap < 2) return out;  // permuting fewer than two cells is the identity
    for (std::size_t c = 0; c < out.columns.size(); ++c) {
        Column& col = out.columns[c];
        std::mt19937_64 rng = column_rng(cfg.seed, c);
        // pick the participating cell subset via partial Fisher-Yates
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < n_swap; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        idx.resize(n_swap);
        std::vector<double> vals(n_swap);
        for (std::size_t i = 0; i < n_swap; ++i) vals[i] = col.values[idx[i]];
        std::shuffle(vals.begin(), vals.end(), rng);
        for (std::size_t i = 0; i < n_swap; ++i) col.values[idx[i]] = vals[i];
        if (!col.bins.empty()) {
            // recompute companion indices on the permuted values
            for (std::size_t r = 0; r < col.values.size(); ++r) {
                int b = 0;
                if (col.bin_width > 0.0) {
                    b = static_cast<int>((col.values[r] - col.bin_min) / col.bin_width);
                    if (b >= col.bin_count) b = col.bin_count - 1;
                    if (b < 0) b = 0;
                }
                col.bins[r] = b;
            }
        }
    }
    return out;
}

TabularDataset replicate_records(const TabularDataset& ds, const std::vector<std::int64_t>& ids,
                                 int k) {
    if (k < 0) throw std::invalid_argument("replication count must be >= 0");
    std::unordered_set<std::int64_t> known(ds.row_ids.begin(), ds.row_ids.end());
    for (std::int64_t id : ids) {
        if (!known.count(id)) throw std::runtime_error("unknown id: " + std::to_string(id));
    }
    TabularDataset out = ds;
    if (k == 0 || ids.empty()) return out;
    std::int64_t next_id = *std::max_element(ds.row_ids.begin(), ds.row_ids.end()) + 1;
    std::unordered_set<std::int64_t> want(ids.begin(), ids.end());
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (!want.count(ds.row_ids[r])) continue;
        for (int i = 0; i < k; ++i) {
            out.row_ids.push_back(next_id);
            out.individual_ids.push_back(next_id);
            ++next_id;
            for (std::size_t c = 0; c < ds.columns.size(); ++c) {
                out.columns[c].values.push_back(ds.columns[c].values[r]);
                if (!ds.columns[c].bins.empty())
                    out.columns[c].bins.push_back(ds.columns[c].bins[r]);
            }
        }
    }
    return out;
}

TabularDataset select_rows(const TabularDataset& ds, const std::vector<std::size_t>& rows) {
    TabularDataset out;
    out.columns = ds.columns;
    for (Column& col : out.columns) {
        col.values.clear();
        col.bins.clear();
    }
    out.row_ids.reserve(rows.size());
    for (std::size_t r : rows) {
        out.row_ids.push_back(ds.row_ids.at(r));
        out.individual_ids.push_back(ds.individual_ids.at(r));
        for (std::size_t c = 0; c < ds.columns.size(); ++c) {
            out.columns[c].values.push_back(ds.columns[c].values[r]);
            if (!ds.columns[c].bins.empty())
                out.columns[c].bins.push_back(ds.columns[c].bins[r]);
        }
    }
    return out;
}

}  // namespace alc
