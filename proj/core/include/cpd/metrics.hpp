#pragma once

#include <cstddef>

#include "cpd/core.hpp"

namespace cpd {

struct HausdorffDistances {
    double a_to_b = 0.0;  // (1/n) max_{x in a} min_{y in b} |x - y|
    double b_to_a = 0.0;
    double max = 0.0;
};

struct MetricReport {
    double ari = 0.0;
    double d_true_to_est = 0.0;
    double d_est_to_true = 0.0;
    double hausdorff = 0.0;
    std::size_t n_est_changepoints = 0;
};

/// Hubert-Arabie adjusted Rand index of the two partitions into segments.
/// When both are single-segment the index is 1 if they are identical, else 0.
double adjusted_rand_index(const Segmentation& a, const Segmentation& b);

/// Directed relative distances over the full boundary sets (0 and n included).
HausdorffDistances hausdorff_distances(const Segmentation& a, const Segmentation& b);

MetricReport evaluate(const Segmentation& truth, const Segmentation& estimate);

}  // namespace cpd
