#pragma once

#include <cstddef>
#include <vector>

#include "cpd/classifier.hpp"
#include "cpd/core.hpp"

namespace cpd {

/// Exact pairwise Euclidean distances between all rows, built once per
/// detection run and shared by every segment.
class DistanceCache {
public:
    static DistanceCache build(const TimeSeriesMatrix& X, std::size_t max_n = 20000);

    std::size_t n() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> dist_;
};

inline DistanceCache build_distance_cache(const TimeSeriesMatrix& X, std::size_t max_n = 20000) {
    return DistanceCache::build(X, max_n);
}

/// Leave-one-out k-NN class-1 probabilities within (u, v] for labels
/// 1{i <= split}. k defaults to floor(sqrt(v - u)), at least 1, and is capped
/// at v - u - 1. Neighbors tied at the k-th distance share the remaining
/// votes equally, so identical points predict exactly the class share of the
/// other observations.
std::vector<double> loo_predict(const DistanceCache& cache, SegmentBounds bounds, std::size_t split, std::size_t k = 0);

class KnnClassifier final : public Classifier {
public:
    KnnClassifier(const TimeSeriesMatrix& X, KnnParams params)
        : cache_(DistanceCache::build(X, params.max_n)), k_(params.k) {}

    std::vector<double> predict(SegmentBounds bounds, std::size_t split) override {
        return loo_predict(cache_, bounds, split, k_);
    }
    std::size_t n() const noexcept override { return cache_.n(); }
    std::string_view name() const noexcept override { return "knn"; }

private:
    DistanceCache cache_;
    std::size_t k_;
};

}  // namespace cpd
