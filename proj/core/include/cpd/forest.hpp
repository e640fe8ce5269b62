#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cpd/classifier.hpp"
#include "cpd/core.hpp"
#include "cpd/rng.hpp"

namespace cpd {

struct TreeNode {
    static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

    std::uint32_t feature = kNone;  // kNone for leaves
    double threshold = 0.0;         // x <= threshold goes left
    std::uint32_t left = kNone;
    std::uint32_t right = kNone;
    std::uint32_t depth = 0;
    std::uint32_t weight_class1 = 0;  // bootstrap weight reaching the node, class 1
    std::uint32_t weight_class2 = 0;
    std::uint8_t vote = 1;  // 1 = class 1, 0 = class 2

    bool is_leaf() const noexcept { return feature == kNone; }
};

/// CART classification tree with Gini splits on bootstrap-weighted samples.
class DecisionTree {
public:
    /// `rows` are global row indices into X, `class1` marks the left class,
    /// `weights` are bootstrap multiplicities (all > 0).
    static DecisionTree fit(const TimeSeriesMatrix& X, std::span<const std::uint32_t> rows,
                            std::span<const std::uint8_t> class1, std::span<const std::uint32_t> weights,
                            const ForestParams& params, RngStream& rng);

    /// 1 if the leaf reached by `x` votes for class 1, else 0.
    std::uint8_t vote(std::span<const double> x) const noexcept;
    /// Bootstrap-weighted class-1 share of the leaf reached by `x`.
    double leaf_fraction(std::span<const double> x) const noexcept;
    std::span<const TreeNode> nodes() const noexcept { return nodes_; }

private:
    const TreeNode& leaf(std::span<const double> x) const noexcept;

    std::vector<TreeNode> nodes_;
};

struct OobPrediction {
    std::vector<double> probs;              // class-1 probability per observation of (u, v]
    std::vector<std::uint32_t> oob_counts;  // trees that left the observation out of their bootstrap
};

/// Per-tree bookkeeping for out-of-bag discipline checks.
struct OobAudit {
    std::vector<std::vector<std::uint32_t>> in_bag_counts;  // [tree][observation]
    std::vector<std::vector<std::uint8_t>> voted;           // [tree][observation]
    std::vector<DecisionTree> trees;
};

/// Fits a forest on rows (u, v] with labels 1{i <= split} and returns the
/// out-of-bag class-1 probability for every observation, aggregated as
/// configured in params. Observations
/// no tree left out get their leave-one-out prior. In in-sample mode every
/// tree votes for every observation.
OobPrediction fit_predict_oob(const TimeSeriesMatrix& X, SegmentBounds bounds, std::size_t split,
                              const ForestParams& params, std::uint64_t seed, OobAudit* audit = nullptr);

class ForestClassifier final : public Classifier {
public:
    ForestClassifier(const TimeSeriesMatrix& X, ForestParams params, std::uint64_t seed)
        : X_(&X), params_(params), seed_(seed) {}

    std::vector<double> predict(SegmentBounds bounds, std::size_t split) override;
    std::size_t n() const noexcept override { return X_->n(); }
    std::string_view name() const noexcept override { return "rf"; }

private:
    const TimeSeriesMatrix* X_;
    ForestParams params_;
    std::uint64_t seed_;
};

}  // namespace cpd
