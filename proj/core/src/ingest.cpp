#include "cpd/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace cpd {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

std::string position(const std::string& source, std::size_t line, const std::string& column) {
    return source + ": line " + std::to_string(line) + ", column '" + column + "'";
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::label: return "label";
    }
    return "unknown";
}

std::optional<std::size_t> RawTable::label_column() const {
    for (std::size_t c = 0; c < kinds.size(); ++c)
        if (kinds[c] == ColumnKind::label) return c;
    return std::nullopt;
}

RawTable load_table(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    return parse_table(in, options, path);
}

RawTable parse_table(std::istream& in, const LoadOptions& options, const std::string& source) {
    RawTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::size_t> lines;  // source line of each data row
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split_line(line, options.delimiter);
        if (!have_header) {
            table.names = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.names.size()) {
            throw InputError(source + ": line " + std::to_string(line_no) + " (data row " +
                             std::to_string(table.rows.size() + 1) + ") has " + std::to_string(cells.size()) +
                             " fields, expected " + std::to_string(table.names.size()));
        }
        table.rows.push_back(std::move(cells));
        lines.push_back(line_no);
    }
    if (!have_header) throw InputError(source + ": missing header row");
    if (table.rows.empty()) throw InputError(source + ": no data rows");

    const std::size_t cols = table.names.size();
    table.kinds.assign(cols, ColumnKind::numeric);
    for (const auto& [name, kind] : options.kind_overrides) {
        if (std::find(table.names.begin(), table.names.end(), name) == table.names.end()) {
            throw InputError(source + ": no column named '" + name + "'");
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        const auto& name = table.names[c];
        if (options.label_column && *options.label_column == name) {
            table.kinds[c] = ColumnKind::label;
            continue;
        }
        if (auto it = options.kind_overrides.find(name); it != options.kind_overrides.end()) {
            table.kinds[c] = it->second;
        } else {
            const bool numeric = std::all_of(table.rows.begin(), table.rows.end(),
                                             [&](const auto& row) { return parse_number(row[c]).has_value(); });
            table.kinds[c] = numeric ? ColumnKind::numeric : ColumnKind::categorical;
        }
        if (table.kinds[c] != ColumnKind::numeric) continue;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto value = parse_number(table.rows[r][c]);
            if (!value) {
                throw InputError(position(source, lines[r], name) + ": cannot parse '" + table.rows[r][c] +
                                 "' as a number (data row " + std::to_string(r + 1) + ")");
            }
            if (!std::isfinite(*value)) {
                throw InputError(position(source, lines[r], name) + ": non-finite value (data row " +
                                 std::to_string(r + 1) + ")");
            }
        }
    }
    if (options.label_column && !table.label_column()) {
        throw InputError(source + ": no label column named '" + *options.label_column + "'");
    }
    return table;
}

LabeledDataset EncodedTable::labeled() const {
    if (labels.empty()) throw InputError("table has no label column");
    LabeledDataset out{X, labels, class_names};
    out.validate();
    return out;
}

double robust_scale(std::span<const double> column, ScaleEstimator estimator) {
    if (column.size() < 2) return 0.0;
    std::vector<double> diffs(column.size() - 1);
    for (std::size_t i = 0; i + 1 < column.size(); ++i) diffs[i] = std::abs(column[i + 1] - column[i]);
    const double med = median(diffs);
    if (estimator == ScaleEstimator::median_abs_diff) return med;
    for (double& x : diffs) x = std::abs(x - med);
    return median(std::move(diffs));
}

TimeSeriesMatrix robust_normalize(const TimeSeriesMatrix& X, ScaleEstimator estimator,
                                  std::vector<std::size_t>* zero_scale_columns, std::vector<double>* scales) {
    TimeSeriesMatrix out = X;
    std::vector<double> column(X.n());
    if (zero_scale_columns) zero_scale_columns->clear();
    if (scales) scales->assign(X.d(), 1.0);
    for (std::size_t f = 0; f < X.d(); ++f) {
        for (std::size_t i = 0; i < X.n(); ++i) column[i] = X(i, f);
        const double scale = robust_scale(column, estimator);
        if (scale == 0.0) {
            if (zero_scale_columns) zero_scale_columns->push_back(f);
            continue;
        }
        if (scales) (*scales)[f] = scale;
        for (std::size_t i = 0; i < X.n(); ++i) out(i, f) = X(i, f) / scale;
    }
    return out;
}

EncodedTable encode_and_normalize(const RawTable& table, const NormalizeOptions& options) {
    const std::size_t n = table.row_count();
    if (n == 0) throw InputError("table is empty");

    EncodedTable out;
    std::vector<std::vector<double>> columns;
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        switch (table.kinds[c]) {
            case ColumnKind::numeric: {
                std::vector<double> col(n);
                for (std::size_t r = 0; r < n; ++r) col[r] = *parse_number(table.rows[r][c]);
                columns.push_back(std::move(col));
                out.feature_names.push_back(table.names[c]);
                break;
            }
            case ColumnKind::categorical: {
                std::vector<std::string> categories;
                std::unordered_map<std::string, std::size_t> index;
                for (const auto& row : table.rows) {
                    if (index.emplace(row[c], categories.size()).second) categories.push_back(row[c]);
                }
                const std::size_t first = columns.size();
                for (const auto& cat : categories) {
                    columns.emplace_back(n, 0.0);
                    out.feature_names.push_back(table.names[c] + "=" + cat);
                }
                for (std::size_t r = 0; r < n; ++r) columns[first + index.at(table.rows[r][c])][r] = 1.0;
                break;
            }
            case ColumnKind::label: {
                std::unordered_map<std::string, std::size_t> index;
                out.labels.resize(n);
                for (std::size_t r = 0; r < n; ++r) {
                    auto [it, inserted] = index.emplace(table.rows[r][c], out.class_names.size());
                    if (inserted) out.class_names.push_back(table.rows[r][c]);
                    out.labels[r] = it->second;
                }
                break;
            }
        }
    }
    if (columns.empty()) throw InputError("table has no feature columns");

    const std::size_t d = columns.size();
    std::vector<double> data(n * d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t f = 0; f < d; ++f) data[r * d + f] = columns[f][r];
    TimeSeriesMatrix X(n, d, std::move(data));

    if (options.normalize) {
        out.X = robust_normalize(X, options.estimator, &out.zero_scale_columns, &out.scales);
    } else {
        out.X = std::move(X);
        out.scales.assign(d, 1.0);
    }
    return out;
}

}  // namespace cpd
