#include "cpd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cpd {

namespace {

/// E_{x ~ p}[log(a(x) / b(x))].
double expected_log_ratio(const DiscreteDistribution& p, const DiscreteDistribution& a, const DiscreteDistribution& b) {
    double total = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] == 0.0) continue;
        if (a[x] == 0.0 || b[x] == 0.0) throw InputError("log ratio undefined: support mismatch");
        total += p[x] * std::log(a[x] / b[x]);
    }
    return total;
}

/// Sum over observations i in (u, s] of their distributions, unnormalized.
std::vector<double> summed(const PopulationModel& model, SegmentBounds bounds) {
    std::vector<double> acc(model.support_size(), 0.0);
    const auto b = model.truth().boundaries();
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        const std::size_t lo = std::max(b[k], bounds.u);
        const std::size_t hi = std::min(b[k + 1], bounds.v);
        if (hi <= lo) continue;
        const auto& dist = model.segments()[k];
        for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += static_cast<double>(hi - lo) * dist[x];
    }
    return acc;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw InputError("distribution needs a non-empty support");
    double total = 0.0;
    for (double x : p_) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("probabilities must be finite and non-negative");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("probabilities must sum to one, got " + std::to_string(total));
}

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.size() != q.size()) throw InputError("distributions have different supports");
    return expected_log_ratio(p, p, q);
}

PopulationModel::PopulationModel(Segmentation truth, std::vector<DiscreteDistribution> segments)
    : truth_(std::move(truth)), segments_(std::move(segments)) {
    if (segments_.size() != truth_.segment_count()) throw InputError("one distribution per segment is required");
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        if (segments_[k].size() != segments_.front().size()) throw InputError("distributions have different supports");
        if (k > 0 && segments_[k] == segments_[k - 1]) throw InputError("adjacent segments must differ");
    }
}

const DiscreteDistribution& PopulationModel::at(std::size_t i) const {
    if (i == 0 || i > n()) throw InputError("observation index out of range");
    const auto b = truth_.boundaries();
    const auto k = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), i) - b.begin()) - 1;
    return segments_[k];
}

DiscreteDistribution mixture(const PopulationModel& model, SegmentBounds bounds) {
    validate(bounds, model.n());
    auto acc = summed(model, bounds);
    const double len = static_cast<double>(bounds.length());
    for (double& x : acc) x /= len;
    // Renormalize away rounding so the invariant check holds.
    const double total = std::accumulate(acc.begin(), acc.end(), 0.0);
    for (double& x : acc) x /= total;
    return DiscreteDistribution(std::move(acc));
}

double bayes_expected_gain(const PopulationModel& model, const Segmentation& alpha) {
    if (alpha.n() != model.n()) throw InputError("segmentation length does not match the model");
    const auto whole = mixture(model, {0, model.n()});
    double total = 0.0;
    for (std::size_t k = 0; k < alpha.segment_count(); ++k) {
        const auto seg = alpha.segment(k);
        total += static_cast<double>(seg.length()) * kl_divergence(mixture(model, seg), whole);
    }
    return total;
}

std::vector<double> bayes_split_gain_curve(const PopulationModel& model, SegmentBounds bounds) {
    validate(bounds, model.n());
    const auto whole = mixture(model, bounds);
    std::vector<double> out(bounds.length() + 1, 0.0);
    for (std::size_t s = bounds.u + 1; s < bounds.v; ++s) {
        const SegmentBounds left{bounds.u, s}, right{s, bounds.v};
        out[s - bounds.u] = static_cast<double>(left.length()) * kl_divergence(mixture(model, left), whole) +
                            static_cast<double>(right.length()) * kl_divergence(mixture(model, right), whole);
    }
    return out;
}

std::vector<double> bayes_approximate_gain_curve(const PopulationModel& model, SegmentBounds bounds, std::size_t s0) {
    validate(bounds, model.n());
    if (!(bounds.u < s0 && s0 < bounds.v)) throw InputError("initial guess must lie strictly inside the segment");
    const auto whole = mixture(model, bounds);
    const auto left = mixture(model, {bounds.u, s0});
    const auto right = mixture(model, {s0, bounds.v});

    // Increment at s is E_s[l1] - E_s[l2]; G(u) = sum of E_i[l2] over (u, v].
    std::vector<double> out(bounds.length() + 1);
    double g = 0.0;
    for (std::size_t i = bounds.u + 1; i <= bounds.v; ++i) g += expected_log_ratio(model.at(i), right, whole);
    out[0] = g;
    for (std::size_t s = bounds.u + 1; s <= bounds.v; ++s) {
        const auto& p = model.at(s);
        g += expected_log_ratio(p, left, whole) - expected_log_ratio(p, right, whole);
        out[s - bounds.u] = g;
    }
    return out;
}

}  // namespace cpd
