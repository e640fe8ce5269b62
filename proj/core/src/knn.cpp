#include "cpd/knn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cpd {

DistanceCache DistanceCache::build(const TimeSeriesMatrix& X, std::size_t max_n) {
    if (X.n() > max_n) {
        throw InputError("k-NN distance cache refuses n = " + std::to_string(X.n()) + " (cap " +
                         std::to_string(max_n) + "); it needs n^2 doubles of memory");
    }
    DistanceCache cache;
    cache.n_ = X.n();
    cache.dist_.assign(X.n() * X.n(), 0.0);
    for (std::size_t i = 0; i < X.n(); ++i) {
        auto xi = X.row(i);
        for (std::size_t j = i + 1; j < X.n(); ++j) {
            auto xj = X.row(j);
            double sq = 0.0;
            for (std::size_t f = 0; f < X.d(); ++f) {
                const double diff = xi[f] - xj[f];
                sq += diff * diff;
            }
            const double dist = std::sqrt(sq);
            cache.dist_[i * cache.n_ + j] = dist;
            cache.dist_[j * cache.n_ + i] = dist;
        }
    }
    return cache;
}

std::vector<double> loo_predict(const DistanceCache& cache, SegmentBounds bounds, std::size_t split, std::size_t k) {
    validate(bounds, cache.n());
    const std::size_t m = bounds.length();
    if (m < 2) throw InputError("leave-one-out k-NN needs at least two observations");
    if (!(bounds.u < split && split < bounds.v)) throw InputError("split leaves one class empty");

    if (k == 0) k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m)))));
    k = std::min(k, m - 1);

    std::vector<double> probs(m);
    std::vector<double> others;
    others.reserve(m - 1);
    for (std::size_t a = 0; a < m; ++a) {
        const std::size_t i = bounds.u + a;  // zero-based row
        others.clear();
        for (std::size_t b = 0; b < m; ++b) {
            if (b != a) others.push_back(cache(i, bounds.u + b));
        }
        std::nth_element(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k - 1), others.end());
        const double kth = others[k - 1];

        double closer = 0.0, closer_class1 = 0.0, tied = 0.0, tied_class1 = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
            if (b == a) continue;
            const double dist = cache(i, bounds.u + b);
            const bool class1 = bounds.u + b + 1 <= split;
            if (dist < kth) {
                closer += 1.0;
                closer_class1 += class1 ? 1.0 : 0.0;
            } else if (dist == kth) {
                tied += 1.0;
                tied_class1 += class1 ? 1.0 : 0.0;
            }
        }
        const double share = (static_cast<double>(k) - closer) / tied;
        probs[a] = std::clamp((closer_class1 + share * tied_class1) / static_cast<double>(k), 0.0, 1.0);
    }
    return probs;
}

}  // namespace cpd
