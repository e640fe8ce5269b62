#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cpd/core.hpp"

namespace cpd {

/// One segment visited by binary segmentation.
struct SplitRecord {
    SegmentBounds segment;
    std::size_t depth = 0;
    std::vector<std::size_t> initial_guesses;  // empty for the change-in-mean baseline
    std::size_t first_guess_split = 0;         // s^(1); equals best_split for the baseline
    std::size_t best_split = 0;                // proposed change point
    double max_gain = 0.0;                     // G0 for classifier engines, max gain for the baseline
    std::optional<double> p_value;             // classifier engines
    std::optional<double> gain_threshold;      // change-in-mean baseline
    bool accepted = false;
};

struct DetectionResult {
    Segmentation segmentation = Segmentation::trivial(1);
    std::vector<SplitRecord> split_log;  // pre-order: parent, left subtree, right subtree
    std::size_t classifier_fits = 0;
};

}  // namespace cpd
