#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cpd {

/// Raised for malformed inputs: bad shapes, out-of-range parameters, broken invariants.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a segment leaves no admissible split candidate after the
/// minimum-segment-length guard.
class SegmentTooShort : public InputError {
public:
    using InputError::InputError;
};

/// Row-major n x d matrix of finite observations. Row i is time index i + 1
/// in the half-open boundary convention used everywhere else.
class TimeSeriesMatrix {
public:
    TimeSeriesMatrix() = default;
    TimeSeriesMatrix(std::size_t n, std::size_t d, std::vector<double> data);
    static TimeSeriesMatrix zeros(std::size_t n, std::size_t d);

    std::size_t n() const noexcept { return n_; }
    std::size_t d() const noexcept { return d_; }
    bool empty() const noexcept { return n_ == 0; }

    double operator()(std::size_t row, std::size_t col) const noexcept { return data_[row * d_ + col]; }
    double& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * d_ + col]; }

    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * d_, d_}; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * d_, d_}; }
    std::span<const double> values() const noexcept { return data_; }

    /// Rows (first, last] in boundary convention, copied.
    TimeSeriesMatrix slice(std::size_t first, std::size_t last) const;
    TimeSeriesMatrix select_rows(std::span<const std::size_t> rows) const;

    friend bool operator==(const TimeSeriesMatrix&, const TimeSeriesMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> data_;
};

/// Half-open segment (u, v] of observation counts.
struct SegmentBounds {
    std::size_t u = 0;
    std::size_t v = 0;

    std::size_t length() const noexcept { return v - u; }
    bool contains(std::size_t i) const noexcept { return u < i && i <= v; }
    friend bool operator==(const SegmentBounds&, const SegmentBounds&) = default;
};

void validate(SegmentBounds bounds, std::size_t n);

/// Boundary set {0, a_1, ..., n}, strictly increasing.
class Segmentation {
public:
    explicit Segmentation(std::vector<std::size_t> boundaries);
    static Segmentation trivial(std::size_t n);
    static Segmentation from_lengths(std::span<const std::size_t> lengths);
    /// Builds {0} + sorted change points + {n}; change points must lie strictly inside (0, n).
    static Segmentation from_change_points(std::vector<std::size_t> change_points, std::size_t n);

    std::span<const std::size_t> boundaries() const noexcept { return boundaries_; }
    std::vector<std::size_t> change_points() const;
    std::vector<std::size_t> lengths() const;
    std::size_t n() const noexcept { return boundaries_.back(); }
    std::size_t segment_count() const noexcept { return boundaries_.size() - 1; }
    SegmentBounds segment(std::size_t k) const { return {boundaries_.at(k), boundaries_.at(k + 1)}; }
    std::size_t min_segment_length() const;

    friend bool operator==(const Segmentation&, const Segmentation&) = default;

private:
    std::vector<std::size_t> boundaries_;
};

enum class Method { random_forest, knn, change_in_mean, prior };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

enum class PredictionMode { out_of_bag, in_sample };

/// How per-tree outputs are combined into a class-1 probability.
enum class VoteAggregation {
    leaf_fraction,  // average of the class-1 share in the reached leaf
    majority_vote,  // fraction of trees whose leaf majority is class 1
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 8;  // 0 = unlimited
    std::size_t mtry = 0;       // 0 = floor(sqrt(d)), at least 1
    std::size_t min_leaf = 1;
    std::uint64_t stream_tag = 0;
    std::size_t threads = 1;
    PredictionMode mode = PredictionMode::out_of_bag;
    VoteAggregation aggregation = VoteAggregation::leaf_fraction;

    std::size_t resolved_mtry(std::size_t d) const;
};

struct KnnParams {
    std::size_t max_n = 20000;
    std::size_t k = 0;  // 0 = floor(sqrt(segment length)), at least 1
};

struct MeanShiftParams {
    /// Multiplier c in the stopping threshold c * d * log(n).
    double penalty_scale = 0.0;  // 0 = calibrated default
};

/// ceil(delta * n), the number of observations reserved on each side of a split.
std::size_t guard_length(double delta, std::size_t n) noexcept;

inline constexpr double kDefaultEta = 0.0024787521766663585;  // exp(-6)

struct DetectionConfig {
    double delta = 0.01;
    double eta = kDefaultEta;
    double threshold = 0.02;
    std::size_t permutations = 199;
    std::uint64_t seed = 0;
    Method method = Method::random_forest;
    ForestParams forest{};
    KnnParams knn{};
    MeanShiftParams mean{};
    /// Clamp the prior-scaled ratio into [0, 1] before taking log_eta.
    /// Off by default: the clamp discards the evidence of confident predictions.
    bool clamp_ratio = false;

    void validate() const;
    /// ceil(delta * n), the per-side guard applied to every candidate split.
    std::size_t min_length(std::size_t n) const;
};

}  // namespace cpd
