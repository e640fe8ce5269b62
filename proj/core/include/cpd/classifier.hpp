#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "cpd/core.hpp"

namespace cpd {

/// A gain engine: trains a binary classifier on the labels 1{i <= split}
/// over the observations of one segment and returns, for every observation
/// (u, v], a class-1 probability that was produced without access to that
/// observation's own label (out-of-bag or leave-one-out).
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual std::vector<double> predict(SegmentBounds bounds, std::size_t split) = 0;
    /// Number of observations of the full series the engine was built on.
    virtual std::size_t n() const noexcept = 0;
    virtual std::string_view name() const noexcept = 0;
};

/// No-signal engine: predicts the leave-one-out prior everywhere, so every
/// log-likelihood ratio is zero.
class PriorClassifier final : public Classifier {
public:
    explicit PriorClassifier(std::size_t n) : n_(n) {}

    std::vector<double> predict(SegmentBounds bounds, std::size_t split) override;
    std::size_t n() const noexcept override { return n_; }
    std::string_view name() const noexcept override { return "prior"; }

private:
    std::size_t n_;
};

}  // namespace cpd
