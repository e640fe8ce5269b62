#include "cpd/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cpd {

double log_eta(double x, double eta) noexcept { return std::log((1.0 - eta) * x + eta); }

double oob_prior(std::size_t i, std::size_t split, SegmentBounds bounds) {
    if (bounds.length() < 2) throw InputError("leave-one-out prior needs a segment with at least two observations");
    if (!(bounds.u < split && split < bounds.v)) throw InputError("split must lie strictly inside the segment");
    if (!bounds.contains(i)) throw InputError("observation index outside the segment");
    const double left = static_cast<double>(split - bounds.u - (i <= split ? 1 : 0));
    return left / static_cast<double>(bounds.length() - 1);
}

namespace {

double scaled_ratio(double prediction, double prior, bool clamp) noexcept {
    if (prior <= 0.0) return 1.0;
    double r = prediction / prior;
    return clamp ? std::min(r, 1.0) : r;
}

}  // namespace

ObservationLikelihoods likelihoods_from_predictions(std::span<const double> predictions, SegmentBounds bounds,
                                                    std::size_t split, double eta, bool clamp) {
    const std::size_t m = bounds.length();
    if (predictions.size() != m) {
        throw InputError("expected " + std::to_string(m) + " predictions, got " + std::to_string(predictions.size()));
    }
    if (m < 2 || !(bounds.u < split && split < bounds.v)) throw InputError("split must lie strictly inside the segment");

    const double denom = static_cast<double>(m - 1);
    const double prior_left_side = static_cast<double>(split - bounds.u - 1) / denom;
    const double prior_right_side = static_cast<double>(split - bounds.u) / denom;

    ObservationLikelihoods out{std::vector<double>(m), std::vector<double>(m)};
    for (std::size_t k = 0; k < m; ++k) {
        const double p = predictions[k];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InputError("prediction " + std::to_string(p) + " for observation " + std::to_string(bounds.u + k + 1) +
                             " is outside [0, 1]");
        }
        const double prior = (bounds.u + k + 1 <= split) ? prior_left_side : prior_right_side;
        out.left[k] = log_eta(scaled_ratio(p, prior, clamp), eta);
        out.right[k] = log_eta(scaled_ratio(1.0 - p, 1.0 - prior, clamp), eta);
    }
    return out;
}

std::optional<CandidateRange> candidate_range(SegmentBounds bounds, std::size_t min_length) noexcept {
    const std::size_t first = bounds.u + 1 + min_length;
    if (bounds.v < min_length) return std::nullopt;
    const std::size_t last = bounds.v - min_length;
    if (first > last) return std::nullopt;
    return CandidateRange{first, last};
}

namespace {

// Visits G(s) for s in range; G(s) = sum(right) + sum_{i <= s} (left_i - right_i).
template <typename Visit>
void walk_gains(std::span<const double> left, std::span<const double> right, SegmentBounds bounds,
                CandidateRange range, Visit&& visit) {
    double running = 0.0;
    for (double r : right) running += r;
    const std::size_t m = bounds.length();
    std::size_t k = 0;
    for (; k < m && bounds.u + k + 1 < range.first; ++k) running += left[k] - right[k];
    for (std::size_t s = range.first; s <= range.last; ++s, ++k) {
        running += left[k] - right[k];
        visit(s, running);
    }
}

}  // namespace

GainCurve approximate_gain_curve(std::span<const double> left, std::span<const double> right, SegmentBounds bounds,
                                 CandidateRange range) {
    if (left.size() != bounds.length() || right.size() != bounds.length()) {
        throw InputError("likelihood columns must have one entry per observation of the segment");
    }
    GainCurve curve;
    curve.segment = bounds;
    curve.first_split = range.first;
    curve.values.reserve(range.size());
    curve.max_gain = -std::numeric_limits<double>::infinity();
    walk_gains(left, right, bounds, range, [&](std::size_t s, double g) {
        curve.values.push_back(g);
        if (g > curve.max_gain) {
            curve.max_gain = g;
            curve.argmax = s;
        }
    });
    return curve;
}

GainCurve approximate_gain_curve(std::span<const double> left, std::span<const double> right, SegmentBounds bounds,
                                 double delta, std::size_t n) {
    auto range = candidate_range(bounds, guard_length(delta, n));
    if (!range) {
        throw SegmentTooShort("segment (" + std::to_string(bounds.u) + ", " + std::to_string(bounds.v) +
                              "] has no admissible split");
    }
    return approximate_gain_curve(left, right, bounds, *range);
}

double max_approximate_gain(std::span<const double> left, std::span<const double> right, SegmentBounds bounds,
                            CandidateRange range) noexcept {
    double best = -std::numeric_limits<double>::infinity();
    walk_gains(left, right, bounds, range, [&](std::size_t, double g) { best = std::max(best, g); });
    return best;
}

LikelihoodMatrix::LikelihoodMatrix(SegmentBounds bounds, std::vector<std::size_t> guesses)
    : segment_(bounds), guesses_(std::move(guesses)), data_(guesses_.size() * 2 * bounds.length(), 0.0) {}

void LikelihoodMatrix::set_guess(std::size_t j, const ObservationLikelihoods& ell) {
    if (j >= guess_count() || ell.left.size() != rows() || ell.right.size() != rows()) {
        throw InputError("likelihood column shape mismatch");
    }
    std::copy(ell.left.begin(), ell.left.end(), column(j, 0).begin());
    std::copy(ell.right.begin(), ell.right.end(), column(j, 1).begin());
}

JointMaximum joint_argmax(const LikelihoodMatrix& ell, CandidateRange range) {
    std::vector<double> joint(range.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < ell.guess_count(); ++j) {
        walk_gains(ell.column(j, 0), ell.column(j, 1), ell.segment(), range,
                   [&](std::size_t s, double g) { joint[s - range.first] = std::max(joint[s - range.first], g); });
    }
    JointMaximum best{range.first, joint[0]};
    for (std::size_t k = 1; k < joint.size(); ++k) {
        if (joint[k] > best.gain) best = {range.first + k, joint[k]};
    }
    return best;
}

}  // namespace cpd
