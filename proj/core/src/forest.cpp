#include "cpd/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <thread>

#include "cpd/likelihood.hpp"

namespace cpd {
namespace {

struct Sample {
    std::uint32_t row;
    std::uint32_t weight;
    std::uint8_t class1;
};

struct SortEntry {
    double x;
    std::uint32_t weight;
    std::uint32_t class1;
};

struct SplitChoice {
    std::uint32_t feature;
    double threshold;
};

class TreeBuilder {
public:
    TreeBuilder(const TimeSeriesMatrix& X, const ForestParams& params, RngStream& rng)
        : X_(X), params_(params), rng_(rng), features_(X.d()) {
        std::iota(features_.begin(), features_.end(), 0u);
        mtry_ = params.resolved_mtry(X.d());
    }

    std::vector<TreeNode> build(std::vector<Sample> samples) {
        samples_ = std::move(samples);
        std::vector<TreeNode> nodes;
        struct Pending {
            std::uint32_t node;
            std::size_t begin;
            std::size_t end;
        };
        std::vector<Pending> stack;
        nodes.push_back(make_node(0, samples_.size(), 0));
        stack.push_back({0, 0, samples_.size()});

        while (!stack.empty()) {
            Pending job = stack.back();
            stack.pop_back();
            TreeNode& node = nodes[job.node];
            if (is_terminal(node)) continue;

            auto choice = find_split(job.begin, job.end);
            if (!choice) continue;

            auto mid_it = std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(job.begin),
                                         samples_.begin() + static_cast<std::ptrdiff_t>(job.end),
                                         [&](const Sample& s) { return X_(s.row, choice->feature) <= choice->threshold; });
            const auto mid = static_cast<std::size_t>(mid_it - samples_.begin());

            const std::uint32_t depth = nodes[job.node].depth + 1;
            const auto left_id = static_cast<std::uint32_t>(nodes.size());
            nodes.push_back(make_node(job.begin, mid, depth));
            const auto right_id = static_cast<std::uint32_t>(nodes.size());
            nodes.push_back(make_node(mid, job.end, depth));

            TreeNode& parent = nodes[job.node];
            parent.feature = choice->feature;
            parent.threshold = choice->threshold;
            parent.left = left_id;
            parent.right = right_id;

            stack.push_back({right_id, mid, job.end});
            stack.push_back({left_id, job.begin, mid});
        }
        return nodes;
    }

private:
    TreeNode make_node(std::size_t begin, std::size_t end, std::uint32_t depth) const {
        TreeNode node;
        node.depth = depth;
        for (std::size_t k = begin; k < end; ++k) {
            (samples_[k].class1 ? node.weight_class1 : node.weight_class2) += samples_[k].weight;
        }
        node.vote = node.weight_class1 >= node.weight_class2 ? 1 : 0;
        return node;
    }

    bool is_terminal(const TreeNode& node) const {
        if (node.weight_class1 == 0 || node.weight_class2 == 0) return true;
        if (params_.max_depth != 0 && node.depth >= params_.max_depth) return true;
        return node.weight_class1 + node.weight_class2 < 2 * params_.min_leaf;
    }

    std::optional<SplitChoice> find_split(std::size_t begin, std::size_t end) {
        const std::size_t count = end - begin;
        buffer_.resize(count);

        std::uint64_t total1 = 0, total2 = 0;
        for (std::size_t k = begin; k < end; ++k) {
            (samples_[k].class1 ? total1 : total2) += samples_[k].weight;
        }

        std::optional<SplitChoice> best;
        double best_score = -1.0;
        std::size_t evaluated = 0;
        const std::size_t d = features_.size();
        for (std::size_t k = 0; k < d && evaluated < mtry_; ++k) {
            const std::size_t pick = k + static_cast<std::size_t>(rng_.uniform_index(d - k));
            std::swap(features_[k], features_[pick]);
            const std::uint32_t f = features_[k];

            for (std::size_t idx = 0; idx < count; ++idx) {
                const Sample& s = samples_[begin + idx];
                buffer_[idx] = {X_(s.row, f), s.weight, s.class1};
            }
            std::sort(buffer_.begin(), buffer_.end(), [](const SortEntry& a, const SortEntry& b) { return a.x < b.x; });
            if (buffer_.front().x == buffer_.back().x) continue;  // constant here; does not count toward mtry
            ++evaluated;

            std::uint64_t left1 = 0, left2 = 0;
            for (std::size_t idx = 0; idx + 1 < count; ++idx) {
                (buffer_[idx].class1 ? left1 : left2) += buffer_[idx].weight;
                if (buffer_[idx].x == buffer_[idx + 1].x) continue;
                const std::uint64_t wl = left1 + left2;
                const std::uint64_t wr = (total1 + total2) - wl;
                if (wl < params_.min_leaf || wr < params_.min_leaf) continue;
                const double right1 = static_cast<double>(total1 - left1);
                const double right2 = static_cast<double>(total2 - left2);
                // Maximizing this is equivalent to minimizing weighted child Gini impurity.
                const double score = (static_cast<double>(left1 * left1 + left2 * left2)) / static_cast<double>(wl) +
                                     (right1 * right1 + right2 * right2) / static_cast<double>(wr);
                if (score > best_score) {
                    best_score = score;
                    const double lo = buffer_[idx].x;
                    const double hi = buffer_[idx + 1].x;
                    double mid = lo + (hi - lo) / 2.0;
                    if (!(mid < hi)) mid = lo;
                    best = SplitChoice{f, mid};
                }
            }
        }
        return best;
    }

    const TimeSeriesMatrix& X_;
    const ForestParams& params_;
    RngStream& rng_;
    std::vector<std::uint32_t> features_;
    std::size_t mtry_ = 1;
    std::vector<Sample> samples_;
    std::vector<SortEntry> buffer_;
};

}  // namespace

DecisionTree DecisionTree::fit(const TimeSeriesMatrix& X, std::span<const std::uint32_t> rows,
                               std::span<const std::uint8_t> class1, std::span<const std::uint32_t> weights,
                               const ForestParams& params, RngStream& rng) {
    if (rows.size() != class1.size() || rows.size() != weights.size()) {
        throw InputError("tree inputs must have matching lengths");
    }
    if (rows.empty()) throw InputError("cannot fit a tree on zero samples");
    std::vector<Sample> samples;
    samples.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (weights[k] == 0) continue;
        samples.push_back({rows[k], weights[k], class1[k]});
    }
    TreeBuilder builder(X, params, rng);
    DecisionTree tree;
    tree.nodes_ = builder.build(std::move(samples));
    return tree;
}

const TreeNode& DecisionTree::leaf(std::span<const double> x) const noexcept {
    std::uint32_t id = 0;
    while (!nodes_[id].is_leaf()) {
        const TreeNode& node = nodes_[id];
        id = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes_[id];
}

std::uint8_t DecisionTree::vote(std::span<const double> x) const noexcept { return leaf(x).vote; }

double DecisionTree::leaf_fraction(std::span<const double> x) const noexcept {
    const TreeNode& node = leaf(x);
    return static_cast<double>(node.weight_class1) / static_cast<double>(node.weight_class1 + node.weight_class2);
}

namespace {

// Per-tree contributions are fixed point with this many fractional bits, so
// sums do not depend on the order in which workers finish.
constexpr double kVoteScale = 4294967296.0;

struct VoteTally {
    std::vector<std::uint64_t> class1;
    std::vector<std::uint32_t> total;
};

void grow_and_vote(const TimeSeriesMatrix& X, SegmentBounds bounds, std::size_t split, const ForestParams& params,
                   std::uint64_t seed, std::size_t tree_index, VoteTally& tally, OobAudit* audit) {
    const std::size_t m = bounds.length();
    RngStream rng = make_rng_stream(
        seed, derive_stream_id({stream_tag::forest_tree, params.stream_tag, bounds.u, bounds.v, split, tree_index}));

    std::vector<std::uint32_t> counts(m, 0);
    for (std::size_t draw = 0; draw < m; ++draw) ++counts[rng.uniform_index(m)];

    std::vector<std::uint32_t> rows;
    std::vector<std::uint8_t> labels;
    std::vector<std::uint32_t> weights;
    rows.reserve(m);
    labels.reserve(m);
    weights.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (counts[k] == 0) continue;
        rows.push_back(static_cast<std::uint32_t>(bounds.u + k));
        labels.push_back(bounds.u + k + 1 <= split ? 1 : 0);
        weights.push_back(counts[k]);
    }

    DecisionTree tree = DecisionTree::fit(X, rows, labels, weights, params, rng);

    const bool in_sample = params.mode == PredictionMode::in_sample;
    std::vector<std::uint8_t> voted;
    if (audit) voted.assign(m, 0);
    for (std::size_t k = 0; k < m; ++k) {
        if (!in_sample && counts[k] != 0) continue;
        const auto x = X.row(bounds.u + k);
        const double share = params.aggregation == VoteAggregation::majority_vote ? tree.vote(x) : tree.leaf_fraction(x);
        tally.class1[k] += static_cast<std::uint64_t>(std::llround(share * kVoteScale));
        ++tally.total[k];
        if (audit) voted[k] = 1;
    }
    if (audit) {
        audit->in_bag_counts[tree_index] = std::move(counts);
        audit->voted[tree_index] = std::move(voted);
        audit->trees[tree_index] = std::move(tree);
    }
}

}  // namespace

OobPrediction fit_predict_oob(const TimeSeriesMatrix& X, SegmentBounds bounds, std::size_t split,
                              const ForestParams& params, std::uint64_t seed, OobAudit* audit) {
    validate(bounds, X.n());
    if (bounds.length() < 2) throw InputError("forest needs a segment with at least two observations");
    if (!(bounds.u < split && split < bounds.v)) throw InputError("split leaves one class empty");
    if (params.n_trees < 1) throw InputError("forest needs at least one tree");

    const std::size_t m = bounds.length();
    if (audit) {
        audit->in_bag_counts.assign(params.n_trees, {});
        audit->voted.assign(params.n_trees, {});
        audit->trees.assign(params.n_trees, {});
    }

    const std::size_t workers = std::clamp<std::size_t>(params.threads, 1, params.n_trees);
    std::vector<VoteTally> tallies(workers, VoteTally{std::vector<std::uint64_t>(m, 0), std::vector<std::uint32_t>(m, 0)});
    if (workers == 1) {
        for (std::size_t t = 0; t < params.n_trees; ++t) grow_and_vote(X, bounds, split, params, seed, t, tallies[0], audit);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < params.n_trees; t += workers) {
                    grow_and_vote(X, bounds, split, params, seed, t, tallies[w], audit);
                }
            });
        }
    }

    OobPrediction out{std::vector<double>(m), std::vector<std::uint32_t>(m, 0)};
    for (std::size_t k = 0; k < m; ++k) {
        std::uint64_t votes = 0;
        for (const auto& tally : tallies) {
            votes += tally.class1[k];
            out.oob_counts[k] += tally.total[k];
        }
        out.probs[k] = out.oob_counts[k] == 0
                           ? oob_prior(bounds.u + k + 1, split, bounds)
                           : static_cast<double>(votes) / kVoteScale / static_cast<double>(out.oob_counts[k]);
    }
    return out;
}

std::vector<double> ForestClassifier::predict(SegmentBounds bounds, std::size_t split) {
    return fit_predict_oob(*X_, bounds, split, params_, seed_).probs;
}

}  // namespace cpd
