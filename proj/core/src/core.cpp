#include "cpd/core.hpp"

#include <algorithm>
#include <numeric>

namespace cpd {

TimeSeriesMatrix::TimeSeriesMatrix(std::size_t n, std::size_t d, std::vector<double> data)
    : n_(n), d_(d), data_(std::move(data)) {
    if (n_ == 0 || d_ == 0) {
        throw InputError("time series matrix needs n >= 1 and d >= 1, got " + std::to_string(n_) +
                         " x " + std::to_string(d_));
    }
    if (data_.size() != n_ * d_) {
        throw InputError("time series matrix data has " + std::to_string(data_.size()) +
                         " entries, expected " + std::to_string(n_ * d_));
    }
    for (std::size_t idx = 0; idx < data_.size(); ++idx) {
        if (!std::isfinite(data_[idx])) {
            throw InputError("non-finite value at row " + std::to_string(idx / d_) + ", column " +
                             std::to_string(idx % d_));
        }
    }
}

TimeSeriesMatrix TimeSeriesMatrix::zeros(std::size_t n, std::size_t d) {
    return TimeSeriesMatrix(n, d, std::vector<double>(n * d, 0.0));
}

TimeSeriesMatrix TimeSeriesMatrix::slice(std::size_t first, std::size_t last) const {
    validate({first, last}, n_);
    std::vector<double> out(data_.begin() + static_cast<std::ptrdiff_t>(first * d_),
                            data_.begin() + static_cast<std::ptrdiff_t>(last * d_));
    return TimeSeriesMatrix(last - first, d_, std::move(out));
}

TimeSeriesMatrix TimeSeriesMatrix::select_rows(std::span<const std::size_t> rows) const {
    std::vector<double> out;
    out.reserve(rows.size() * d_);
    for (std::size_t r : rows) {
        if (r >= n_) throw InputError("row index " + std::to_string(r) + " out of range");
        auto src = row(r);
        out.insert(out.end(), src.begin(), src.end());
    }
    return TimeSeriesMatrix(rows.size(), d_, std::move(out));
}

void validate(SegmentBounds bounds, std::size_t n) {
    if (!(bounds.u < bounds.v && bounds.v <= n)) {
        throw InputError("invalid segment (" + std::to_string(bounds.u) + ", " + std::to_string(bounds.v) +
                         "] for n = " + std::to_string(n));
    }
}

Segmentation::Segmentation(std::vector<std::size_t> boundaries) : boundaries_(std::move(boundaries)) {
    if (boundaries_.size() < 2) throw InputError("segmentation needs at least the boundaries 0 and n");
    if (boundaries_.front() != 0) throw InputError("segmentation must start at 0");
    for (std::size_t k = 1; k < boundaries_.size(); ++k) {
        if (boundaries_[k] <= boundaries_[k - 1]) {
            throw InputError("segmentation boundaries must be strictly increasing (position " +
                             std::to_string(k) + ")");
        }
    }
}

Segmentation Segmentation::trivial(std::size_t n) { return Segmentation({0, n}); }

Segmentation Segmentation::from_lengths(std::span<const std::size_t> lengths) {
    std::vector<std::size_t> b{0};
    b.reserve(lengths.size() + 1);
    for (std::size_t len : lengths) b.push_back(b.back() + len);
    return Segmentation(std::move(b));
}

Segmentation Segmentation::from_change_points(std::vector<std::size_t> change_points, std::size_t n) {
    std::sort(change_points.begin(), change_points.end());
    std::vector<std::size_t> b{0};
    b.insert(b.end(), change_points.begin(), change_points.end());
    b.push_back(n);
    return Segmentation(std::move(b));
}

std::vector<std::size_t> Segmentation::change_points() const {
    return {boundaries_.begin() + 1, boundaries_.end() - 1};
}

std::vector<std::size_t> Segmentation::lengths() const {
    std::vector<std::size_t> out(boundaries_.size() - 1);
    for (std::size_t k = 0; k + 1 < boundaries_.size(); ++k) out[k] = boundaries_[k + 1] - boundaries_[k];
    return out;
}

std::size_t Segmentation::min_segment_length() const {
    auto lens = lengths();
    return *std::min_element(lens.begin(), lens.end());
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::random_forest: return "rf";
        case Method::knn: return "knn";
        case Method::change_in_mean: return "mean";
        case Method::prior: return "prior";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "rf" || name == "random_forest") return Method::random_forest;
    if (name == "knn") return Method::knn;
    if (name == "mean" || name == "change_in_mean") return Method::change_in_mean;
    if (name == "prior") return Method::prior;
    throw InputError("unknown method '" + std::string(name) + "' (expected rf, knn or mean)");
}

std::size_t ForestParams::resolved_mtry(std::size_t d) const {
    if (mtry != 0) return std::min(mtry, d);
    auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))));
    return std::clamp<std::size_t>(root, 1, d);
}

void DetectionConfig::validate() const {
    if (!(delta > 0.0 && delta < 0.5)) throw InputError("delta must lie in (0, 0.5)");
    if (!(eta > 0.0 && eta < 1.0)) throw InputError("eta must lie in (0, 1)");
    if (!(threshold > 0.0 && threshold < 1.0)) throw InputError("threshold must lie in (0, 1)");
    if (permutations < 1) throw InputError("permutations must be >= 1");
    if (forest.n_trees < 1) throw InputError("forest needs at least one tree");
    if (forest.min_leaf < 1) throw InputError("min_leaf must be >= 1");
}

std::size_t guard_length(double delta, std::size_t n) noexcept {
    if (delta <= 0.0) return 0;
    // The small offset keeps products such as 0.1 * 100 from rounding up past the integer.
    return static_cast<std::size_t>(std::ceil(delta * static_cast<double>(n) - 1e-9));
}

std::size_t DetectionConfig::min_length(std::size_t n) const { return guard_length(delta, n); }

}  // namespace cpd
