#include "cpd/meanshift.hpp"

#include <cmath>
#include <limits>

namespace cpd {

MeanGainEvaluator::MeanGainEvaluator(const TimeSeriesMatrix& X)
    : n_(X.n()), d_(X.d()), prefix_((X.n() + 1) * X.d(), 0.0L) {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t f = 0; f < d_; ++f) {
            prefix_[(i + 1) * d_ + f] = prefix_[i * d_ + f] + static_cast<long double>(X(i, f));
        }
    }
}

double MeanGainEvaluator::gain(SegmentBounds bounds, std::size_t split) const {
    validate(bounds, n_);
    if (!(bounds.u < split && split < bounds.v)) throw InputError("split must lie strictly inside the segment");
    const auto left_len = static_cast<long double>(split - bounds.u);
    const auto right_len = static_cast<long double>(bounds.v - split);
    long double sq = 0.0L;
    for (std::size_t f = 0; f < d_; ++f) {
        const long double left = (prefix_[split * d_ + f] - prefix_[bounds.u * d_ + f]) / left_len;
        const long double right = (prefix_[bounds.v * d_ + f] - prefix_[split * d_ + f]) / right_len;
        sq += (left - right) * (left - right);
    }
    const long double weight = left_len * right_len / (2.0L * static_cast<long double>(bounds.length()));
    return static_cast<double>(weight * sq);
}

GainCurve MeanGainEvaluator::curve(SegmentBounds bounds, CandidateRange range) const {
    GainCurve out;
    out.segment = bounds;
    out.first_split = range.first;
    out.values.reserve(range.size());
    out.max_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t s = range.first; s <= range.last; ++s) {
        const double g = gain(bounds, s);
        out.values.push_back(g);
        if (g > out.max_gain) {
            out.max_gain = g;
            out.argmax = s;
        }
    }
    return out;
}

double mean_gain(const TimeSeriesMatrix& X, SegmentBounds bounds, std::size_t split) {
    return MeanGainEvaluator(X).gain(bounds, split);
}

double mean_shift_threshold(std::size_t n, std::size_t d, double penalty_scale) {
    const double c = penalty_scale > 0.0 ? penalty_scale : kCalibratedMeanPenalty;
    return c * static_cast<double>(d) * std::log(static_cast<double>(n));
}

namespace {

class MeanSegmenter {
public:
    MeanSegmenter(const TimeSeriesMatrix& X, const DetectionConfig& config)
        : evaluator_(X), config_(config), threshold_(mean_shift_threshold(X.n(), X.d(), config.mean.penalty_scale)) {}

    DetectionResult run() {
        visit({0, evaluator_.n()}, 0);
        result_.segmentation = Segmentation::from_change_points(change_points_, evaluator_.n());
        return std::move(result_);
    }

private:
    void visit(SegmentBounds bounds, std::size_t depth) {
        const std::size_t n = evaluator_.n();
        if (static_cast<double>(bounds.length()) < 2.0 * config_.delta * static_cast<double>(n) - 1e-9) return;
        auto range = candidate_range(bounds, config_.min_length(n));
        if (!range) return;

        GainCurve curve = evaluator_.curve(bounds, *range);
        SplitRecord record;
        record.segment = bounds;
        record.depth = depth;
        record.first_guess_split = curve.argmax;
        record.best_split = curve.argmax;
        record.max_gain = curve.max_gain;
        record.gain_threshold = threshold_;
        record.accepted = curve.max_gain > threshold_;
        result_.split_log.push_back(record);

        if (!record.accepted) return;
        change_points_.push_back(curve.argmax);
        visit({bounds.u, curve.argmax}, depth + 1);
        visit({curve.argmax, bounds.v}, depth + 1);
    }

    MeanGainEvaluator evaluator_;
    const DetectionConfig& config_;
    double threshold_;
    DetectionResult result_;
    std::vector<std::size_t> change_points_;
};

}  // namespace

DetectionResult mean_binary_segmentation(const TimeSeriesMatrix& X, const DetectionConfig& config) {
    config.validate();
    return MeanSegmenter(X, config).run();
}

}  // namespace cpd
