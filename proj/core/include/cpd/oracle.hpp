#pragma once

#include <cstddef>
#include <vector>

#include "cpd/core.hpp"

namespace cpd {

/// Probability vector over a finite support {0, ..., m-1}.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<double> p);

    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t x) const noexcept { return p_[x]; }
    std::span<const double> probabilities() const noexcept { return p_; }

    friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

private:
    std::vector<double> p_;
};

/// Kullback-Leibler divergence KL(p || q); terms with p(x) = 0 contribute 0.
double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Piecewise-stationary population: segment k of truth has distribution segments[k].
class PopulationModel {
public:
    PopulationModel(Segmentation truth, std::vector<DiscreteDistribution> segments);

    const Segmentation& truth() const noexcept { return truth_; }
    std::size_t n() const noexcept { return truth_.n(); }
    std::size_t support_size() const noexcept { return segments_.front().size(); }
    const std::vector<DiscreteDistribution>& segments() const noexcept { return segments_; }
    /// Distribution of observation i, 1 <= i <= n.
    const DiscreteDistribution& at(std::size_t i) const;

private:
    Segmentation truth_;
    std::vector<DiscreteDistribution> segments_;
};

/// (1 / (v - u)) * sum over i in (u, v] of the distribution of observation i.
DiscreteDistribution mixture(const PopulationModel& model, SegmentBounds bounds);

/// Expected classifier gain of alpha over no segmentation for the Bayes classifier:
/// sum_k (a_k - a_{k-1}) KL(P_(a_{k-1}, a_k] || P_(0, n]).
double bayes_expected_gain(const PopulationModel& model, const Segmentation& alpha);

/// Expected gain of splitting (u, v] at s, for s = u, ..., v (zero at both ends).
std::vector<double> bayes_split_gain_curve(const PopulationModel& model, SegmentBounds bounds);

/// Expected approximate gain for s = u, ..., v of the Bayes classifier trained
/// on the split at s0.
std::vector<double> bayes_approximate_gain_curve(const PopulationModel& model, SegmentBounds bounds, std::size_t s0);

}  // namespace cpd
