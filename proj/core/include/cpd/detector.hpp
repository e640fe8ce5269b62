#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "cpd/classifier.hpp"
#include "cpd/core.hpp"
#include "cpd/likelihood.hpp"
#include "cpd/result.hpp"

namespace cpd {

struct TwoStepResult {
    SegmentBounds segment;
    std::size_t s_hat = 0;
    std::size_t s1 = 0;
    std::vector<std::size_t> initial_guesses;  // distinct quartile guesses that were fitted
    LikelihoodMatrix likelihoods;              // first-step ratios, one block per guess
    std::vector<std::vector<double>> first_step_predictions;
    std::vector<GainCurve> first_step_curves;
    double first_step_max_gain = 0.0;
    std::vector<double> refit_predictions;
    ObservationLikelihoods refit_likelihoods;
    GainCurve final_gain_curve;
    std::size_t fits = 0;
};

struct PermutationTestResult {
    double g0 = 0.0;
    std::vector<double> permuted_gains;
    double p_value = 1.0;
};

/// Quartile guesses (floor((3u+v)/4), floor((u+v)/2), floor((u+3v)/4)) kept
/// only if strictly inside (u, v), duplicates removed.
std::vector<std::size_t> initial_guesses(SegmentBounds bounds);

/// Two rounds of classifier fits: one per quartile guess, then one refit at
/// the best approximate-gain split over all guesses.
/// Throws SegmentTooShort when the guarded candidate range or the guess set is empty.
TwoStepResult two_step_search(Classifier& engine, SegmentBounds bounds, const DetectionConfig& config);

/// Permutes the observation rows of the first-step ratios (one shared
/// permutation per round) and compares the maximal approximate gains with
/// the observed one. The permutation stream depends only on (seed, bounds).
PermutationTestResult pseudo_permutation_test(const LikelihoodMatrix& likelihoods, std::size_t n,
                                              const DetectionConfig& config);

/// Recursive binary segmentation driven by the two-step search and the
/// pseudo-permutation test.
DetectionResult binary_segmentation(Classifier& engine, const DetectionConfig& config);

std::unique_ptr<Classifier> make_classifier(const TimeSeriesMatrix& X, const DetectionConfig& config);

/// Runs the configured method on X end to end.
DetectionResult detect(const TimeSeriesMatrix& X, const DetectionConfig& config);

}  // namespace cpd
