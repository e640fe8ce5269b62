#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpd/core.hpp"
#include "cpd/simgen.hpp"

namespace cpd {

enum class ColumnKind { numeric, categorical, label };

std::string_view to_string(ColumnKind kind);

/// Parsed delimited text. Cells are kept as text; numeric columns are
/// guaranteed to parse as finite numbers.
struct RawTable {
    std::vector<std::string> names;
    std::vector<ColumnKind> kinds;
    std::vector<std::vector<std::string>> rows;

    std::size_t row_count() const noexcept { return rows.size(); }
    std::size_t column_count() const noexcept { return names.size(); }
    std::optional<std::size_t> label_column() const;
};

struct LoadOptions {
    char delimiter = ',';
    std::optional<std::string> label_column;
    std::map<std::string, ColumnKind> kind_overrides;
};

RawTable load_table(const std::string& path, const LoadOptions& options = {});
RawTable parse_table(std::istream& in, const LoadOptions& options = {}, const std::string& source = "<input>");

enum class ScaleEstimator {
    median_abs_diff,  // median |x_{i+1} - x_i|
    mad_abs_diff,     // median absolute deviation of |x_{i+1} - x_i|
};

struct NormalizeOptions {
    bool normalize = true;
    ScaleEstimator estimator = ScaleEstimator::median_abs_diff;
};

struct EncodedTable {
    TimeSeriesMatrix X;
    std::vector<std::string> feature_names;
    std::vector<double> scales;                 // 1 where no scaling was applied
    std::vector<std::size_t> zero_scale_columns;  // left unscaled because their scale was 0
    std::vector<std::size_t> labels;            // empty without a label column
    std::vector<std::string> class_names;

    LabeledDataset labeled() const;
};

double robust_scale(std::span<const double> column, ScaleEstimator estimator = ScaleEstimator::median_abs_diff);

/// Divides every column by its robust scale; zero-scale columns pass through
/// and are reported in zero_scale_columns when given.
TimeSeriesMatrix robust_normalize(const TimeSeriesMatrix& X, ScaleEstimator estimator = ScaleEstimator::median_abs_diff,
                                  std::vector<std::size_t>* zero_scale_columns = nullptr,
                                  std::vector<double>* scales = nullptr);

/// One indicator column per category (in order of first appearance), then
/// robust normalization when enabled.
EncodedTable encode_and_normalize(const RawTable& table, const NormalizeOptions& options = {});

}  // namespace cpd
