#include "cpd/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace cpd {

namespace {

void require_same_n(const Segmentation& a, const Segmentation& b) {
    if (a.n() != b.n()) {
        throw InputError("segmentations cover different lengths: " + std::to_string(a.n()) + " vs " +
                         std::to_string(b.n()));
    }
}

double pairs(double x) { return x * (x - 1.0) / 2.0; }

double directed(std::span<const std::size_t> from, std::span<const std::size_t> to) {
    std::size_t worst = 0;
    for (std::size_t x : from) {
        auto it = std::lower_bound(to.begin(), to.end(), x);
        std::size_t best = static_cast<std::size_t>(-1);
        if (it != to.end()) best = *it - x;
        if (it != to.begin()) best = std::min(best, x - *std::prev(it));
        worst = std::max(worst, best);
    }
    return static_cast<double>(worst);
}

}  // namespace

double adjusted_rand_index(const Segmentation& a, const Segmentation& b) {
    require_same_n(a, b);
    const double n = static_cast<double>(a.n());
    if (a.n() < 2) return 1.0;

    // Contingency cells are the overlaps of two interval partitions, found by merging boundaries.
    double sum_cells = 0.0;
    auto ba = a.boundaries();
    auto bb = b.boundaries();
    std::size_t i = 1, j = 1, pos = 0;
    while (i < ba.size() && j < bb.size()) {
        const std::size_t next = std::min(ba[i], bb[j]);
        sum_cells += pairs(static_cast<double>(next - pos));
        pos = next;
        if (ba[i] == next) ++i;
        if (bb[j] == next) ++j;
    }
    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t len : a.lengths()) sum_a += pairs(static_cast<double>(len));
    for (std::size_t len : b.lengths()) sum_b += pairs(static_cast<double>(len));

    const double expected = sum_a * sum_b / pairs(n);
    const double max_index = 0.5 * (sum_a + sum_b);
    const double denom = max_index - expected;
    if (denom == 0.0) return a == b ? 1.0 : 0.0;
    return (sum_cells - expected) / denom;
}

HausdorffDistances hausdorff_distances(const Segmentation& a, const Segmentation& b) {
    require_same_n(a, b);
    const double n = static_cast<double>(a.n());
    HausdorffDistances out;
    out.a_to_b = directed(a.boundaries(), b.boundaries()) / n;
    out.b_to_a = directed(b.boundaries(), a.boundaries()) / n;
    out.max = std::max(out.a_to_b, out.b_to_a);
    return out;
}

MetricReport evaluate(const Segmentation& truth, const Segmentation& estimate) {
    MetricReport report;
    report.ari = adjusted_rand_index(truth, estimate);
    const auto h = hausdorff_distances(truth, estimate);
    report.d_true_to_est = h.a_to_b;
    report.d_est_to_true = h.b_to_a;
    report.hausdorff = h.max;
    report.n_est_changepoints = estimate.segment_count() - 1;
    return report;
}

}  // namespace cpd
