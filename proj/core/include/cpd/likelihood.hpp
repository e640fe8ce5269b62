#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cpd/core.hpp"

namespace cpd {

/// log((1 - eta) x + eta): a logarithm bounded below by log(eta).
double log_eta(double x, double eta) noexcept;

/// Leave-one-out class-1 prior of observation i for the split (u, s] | (s, v]:
/// the share of the other v - u - 1 observations that lie left of the split.
double oob_prior(std::size_t i, std::size_t split, SegmentBounds bounds);

/// Per-observation classifier log-likelihood ratios for one split. Index 0
/// corresponds to observation u + 1.
struct ObservationLikelihoods {
    std::vector<double> left;   // class 1, observations (u, s]
    std::vector<double> right;  // class 2, observations (s, v]
};

/// Turns class-1 probabilities into log-likelihood ratios by scaling with the
/// inverse leave-one-out prior. With `clamp` the scaled ratio is capped at 1
/// before log_eta, so every entry lies in [log(eta), 0]. A zero prior carries
/// no information and maps to a ratio of 1.
ObservationLikelihoods likelihoods_from_predictions(std::span<const double> predictions, SegmentBounds bounds,
                                                    std::size_t split, double eta, bool clamp = false);

/// Admissible splits [first, last] once ceil(delta n) observations are
/// reserved on either side: s = u + 1 + m, ..., v - m.
struct CandidateRange {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t size() const noexcept { return last - first + 1; }
};

std::optional<CandidateRange> candidate_range(SegmentBounds bounds, std::size_t min_length) noexcept;

struct GainCurve {
    SegmentBounds segment;
    std::size_t first_split = 0;   // split index of values[0]
    std::vector<double> values;    // values[k] is the gain at first_split + k
    std::size_t argmax = 0;
    double max_gain = 0.0;

    double at(std::size_t split) const { return values.at(split - first_split); }
    std::size_t last_split() const noexcept { return first_split + values.size() - 1; }
};

/// Approximate gain G(s) = sum_{i <= s} left_i + sum_{i > s} right_i over the
/// guarded candidates. Ties in the argmax resolve to the smallest split.
/// Throws SegmentTooShort when no candidate survives the guard.
GainCurve approximate_gain_curve(std::span<const double> left, std::span<const double> right, SegmentBounds bounds,
                                 double delta, std::size_t n);
GainCurve approximate_gain_curve(std::span<const double> left, std::span<const double> right, SegmentBounds bounds,
                                 CandidateRange range);

/// Maximum of the approximate gain over `range`, computed with the same
/// summation order as approximate_gain_curve.
double max_approximate_gain(std::span<const double> left, std::span<const double> right, SegmentBounds bounds,
                            CandidateRange range) noexcept;

/// Log-likelihood ratios of every observation in a segment for each of J
/// classifier fits (one per guessed split).
class LikelihoodMatrix {
public:
    LikelihoodMatrix() = default;
    LikelihoodMatrix(SegmentBounds bounds, std::vector<std::size_t> guesses);

    SegmentBounds segment() const noexcept { return segment_; }
    std::span<const std::size_t> guesses() const noexcept { return guesses_; }
    std::size_t guess_count() const noexcept { return guesses_.size(); }
    std::size_t rows() const noexcept { return segment_.length(); }

    /// k = 0 for the left class, 1 for the right class; i counts from 0.
    double operator()(std::size_t i, std::size_t k, std::size_t j) const noexcept {
        return data_[(j * 2 + k) * rows() + i];
    }
    std::span<const double> column(std::size_t j, std::size_t k) const noexcept {
        return {data_.data() + (j * 2 + k) * rows(), rows()};
    }
    std::span<double> column(std::size_t j, std::size_t k) noexcept {
        return {data_.data() + (j * 2 + k) * rows(), rows()};
    }
    void set_guess(std::size_t j, const ObservationLikelihoods& ell);

private:
    SegmentBounds segment_{};
    std::vector<std::size_t> guesses_;
    std::vector<double> data_;
};

/// Split maximizing max_j G_j(s) over the candidates, smallest split on ties,
/// together with that maximal value.
struct JointMaximum {
    std::size_t split = 0;
    double gain = 0.0;
};
JointMaximum joint_argmax(const LikelihoodMatrix& ell, CandidateRange range);

}  // namespace cpd
