#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cpd/core.hpp"

namespace cpd {

struct LabeledSeries {
    TimeSeriesMatrix X;
    Segmentation truth = Segmentation::trivial(1);
};

/// Observations with one integer class label per row.
struct LabeledDataset {
    TimeSeriesMatrix X;
    std::vector<std::size_t> labels;  // indices into class_names
    std::vector<std::string> class_names;

    std::size_t class_count() const noexcept { return class_names.size(); }
    std::vector<std::size_t> class_sizes() const;
    void validate() const;
};

enum class ScenarioKind { cim, cic, dirichlet, dataset_concat, variable_dirichlet, dataset_resample, homogeneous_shuffle };

enum class VariableSource { dirichlet, dataset_resample };

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::cim;
    std::uint64_t seed = 0;
    std::size_t n = 0;              // variable-K scenarios only
    std::size_t segments = 0;       // K for variable-K scenarios
    double delta = 0.01;            // class filter for dataset_concat
    const LabeledDataset* table = nullptr;
};

inline constexpr std::size_t kCimLength = 600;
inline constexpr std::size_t kCimDim = 5;
inline constexpr double kCimShift = 2.0;
inline constexpr double kCicCorrelation = 0.7;
inline constexpr std::size_t kDirichletDim = 20;
inline constexpr double kDirichletMaxParam = 0.2;

/// n = 600, d = 5, boundaries {0, 200, 400, 600}; mean 2 on the middle segment.
LabeledSeries gen_cim(std::uint64_t seed);
/// As gen_cim but the middle segment has pairwise correlation 0.7.
LabeledSeries gen_cic(std::uint64_t seed);
/// n = 1000, d = 20, ten change points; Dirichlet segments with parameters U[0, 0.2].
LabeledSeries gen_dirichlet(std::uint64_t seed);

/// Drops classes with fewer than delta * n rows, shuffles class order and rows
/// within each class, and concatenates.
LabeledSeries gen_dataset_concat(const LabeledDataset& table, double delta, std::uint64_t seed);

/// Relative segment lengths 1/(10K) + 0.9 * E_k / sum(E), E_k ~ Exp(1), rounded
/// to sum to n. Residual units go to (or come from) the largest segments first.
std::vector<std::size_t> variable_segment_lengths(std::size_t n, std::size_t segments, std::uint64_t seed);

/// Variable-K series from Dirichlet segments (d = 20) or by resampling a
/// labeled table (consecutive classes differ, standard normal noise added).
/// The table should already be normalized with normalize_within_class_variance.
LabeledSeries gen_variable_k(VariableSource source, std::size_t n, std::size_t segments, std::uint64_t seed,
                             const LabeledDataset* table = nullptr);

/// Rows of the largest class (first such class on ties), uniformly shuffled.
TimeSeriesMatrix gen_homogeneous_shuffle(const LabeledDataset& table, std::uint64_t seed);

/// Scales each column so that the unweighted average of its per-class variances is one.
LabeledDataset normalize_within_class_variance(const LabeledDataset& table);

/// Labels each row of a simulated series by its true segment.
LabeledDataset segments_as_classes(const LabeledSeries& series);

LabeledSeries generate(const ScenarioSpec& spec);

}  // namespace cpd
