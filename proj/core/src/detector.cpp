#include "cpd/detector.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "cpd/forest.hpp"
#include "cpd/knn.hpp"
#include "cpd/meanshift.hpp"
#include "cpd/rng.hpp"

namespace cpd {

std::vector<double> PriorClassifier::predict(SegmentBounds bounds, std::size_t split) {
    validate(bounds, n_);
    std::vector<double> out(bounds.length());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = oob_prior(bounds.u + k + 1, split, bounds);
    return out;
}

namespace {

bool shorter_than_two_guards(SegmentBounds bounds, std::size_t n, double delta) {
    return static_cast<double>(bounds.length()) < 2.0 * delta * static_cast<double>(n) - 1e-9;
}

std::string describe(SegmentBounds b) { return "(" + std::to_string(b.u) + ", " + std::to_string(b.v) + "]"; }

}  // namespace

std::vector<std::size_t> initial_guesses(SegmentBounds bounds) {
    const std::size_t u = bounds.u, v = bounds.v;
    std::vector<std::size_t> guesses;
    for (std::size_t g : {(3 * u + v) / 4, (u + v) / 2, (u + 3 * v) / 4}) {
        if (u < g && g < v && std::find(guesses.begin(), guesses.end(), g) == guesses.end()) guesses.push_back(g);
    }
    return guesses;
}

TwoStepResult two_step_search(Classifier& engine, SegmentBounds bounds, const DetectionConfig& config) {
    const std::size_t n = engine.n();
    validate(bounds, n);
    if (shorter_than_two_guards(bounds, n, config.delta)) {
        throw SegmentTooShort("segment " + describe(bounds) + " is shorter than 2 * delta * n");
    }
    auto range = candidate_range(bounds, config.min_length(n));
    if (!range) throw SegmentTooShort("segment " + describe(bounds) + " has no admissible split");
    auto guesses = initial_guesses(bounds);
    if (guesses.empty()) throw SegmentTooShort("segment " + describe(bounds) + " admits no initial guess");

    TwoStepResult out;
    out.segment = bounds;
    out.initial_guesses = guesses;
    out.likelihoods = LikelihoodMatrix(bounds, guesses);
    for (std::size_t j = 0; j < guesses.size(); ++j) {
        auto preds = engine.predict(bounds, guesses[j]);
        ++out.fits;
        auto ell = likelihoods_from_predictions(preds, bounds, guesses[j], config.eta, config.clamp_ratio);
        out.first_step_curves.push_back(approximate_gain_curve(ell.left, ell.right, bounds, *range));
        out.likelihoods.set_guess(j, ell);
        out.first_step_predictions.push_back(std::move(preds));
    }

    const JointMaximum first = joint_argmax(out.likelihoods, *range);
    out.s1 = first.split;
    out.first_step_max_gain = first.gain;

    out.refit_predictions = engine.predict(bounds, out.s1);
    ++out.fits;
    out.refit_likelihoods =
        likelihoods_from_predictions(out.refit_predictions, bounds, out.s1, config.eta, config.clamp_ratio);
    out.final_gain_curve =
        approximate_gain_curve(out.refit_likelihoods.left, out.refit_likelihoods.right, bounds, *range);
    out.s_hat = out.final_gain_curve.argmax;
    return out;
}

PermutationTestResult pseudo_permutation_test(const LikelihoodMatrix& likelihoods, std::size_t n,
                                              const DetectionConfig& config) {
    const SegmentBounds bounds = likelihoods.segment();
    auto range = candidate_range(bounds, config.min_length(n));
    if (!range) throw SegmentTooShort("segment " + describe(bounds) + " has no admissible split");
    if (likelihoods.guess_count() == 0) throw InputError("permutation test needs at least one guess");

    const std::size_t m = likelihoods.rows();
    const std::size_t guesses = likelihoods.guess_count();

    auto max_gain_over_guesses = [&](auto&& left_of, auto&& right_of) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < guesses; ++j) {
            best = std::max(best, max_approximate_gain(left_of(j), right_of(j), bounds, *range));
        }
        return best;
    };

    PermutationTestResult out;
    out.g0 = max_gain_over_guesses([&](std::size_t j) { return likelihoods.column(j, 0); },
                                   [&](std::size_t j) { return likelihoods.column(j, 1); });

    RngStream rng = make_rng_stream(config.seed, derive_stream_id({stream_tag::permutation, bounds.u, bounds.v}));
    std::vector<std::size_t> sigma(m);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    std::vector<std::vector<double>> permuted(guesses * 2, std::vector<double>(m));

    out.permuted_gains.reserve(config.permutations);
    std::size_t at_least_as_large = 1;  // the observed statistic counts itself
    for (std::size_t l = 0; l < config.permutations; ++l) {
        rng.shuffle(std::span<std::size_t>(sigma));
        for (std::size_t j = 0; j < guesses; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                auto src = likelihoods.column(j, k);
                auto& dst = permuted[j * 2 + k];
                for (std::size_t i = 0; i < m; ++i) dst[i] = src[sigma[i]];
            }
        }
        const double g = max_gain_over_guesses([&](std::size_t j) { return std::span<const double>(permuted[j * 2]); },
                                               [&](std::size_t j) { return std::span<const double>(permuted[j * 2 + 1]); });
        out.permuted_gains.push_back(g);
        if (g >= out.g0) ++at_least_as_large;
    }
    out.p_value = static_cast<double>(at_least_as_large) / static_cast<double>(config.permutations + 1);
    return out;
}

namespace {

class Segmenter {
public:
    Segmenter(Classifier& engine, const DetectionConfig& config) : engine_(engine), config_(config) {}

    DetectionResult run() {
        const std::size_t n = engine_.n();
        visit({0, n}, 0);
        result_.segmentation = Segmentation::from_change_points(change_points_, n);
        return std::move(result_);
    }

private:
    void visit(SegmentBounds bounds, std::size_t depth) {
        const std::size_t n = engine_.n();
        if (shorter_than_two_guards(bounds, n, config_.delta)) return;
        if (!candidate_range(bounds, config_.min_length(n)) || initial_guesses(bounds).empty()) return;

        TwoStepResult search = two_step_search(engine_, bounds, config_);
        result_.classifier_fits += search.fits;
        PermutationTestResult test = pseudo_permutation_test(search.likelihoods, n, config_);

        SplitRecord record;
        record.segment = bounds;
        record.depth = depth;
        record.initial_guesses = search.initial_guesses;
        record.first_guess_split = search.s1;
        record.best_split = search.s_hat;
        record.max_gain = test.g0;
        record.p_value = test.p_value;
        record.accepted = test.p_value <= config_.threshold;
        result_.split_log.push_back(record);

        if (!record.accepted) return;
        change_points_.push_back(search.s_hat);
        visit({bounds.u, search.s_hat}, depth + 1);
        visit({search.s_hat, bounds.v}, depth + 1);
    }

    Classifier& engine_;
    const DetectionConfig& config_;
    DetectionResult result_;
    std::vector<std::size_t> change_points_;
};

}  // namespace

DetectionResult binary_segmentation(Classifier& engine, const DetectionConfig& config) {
    config.validate();
    if (engine.n() == 0) throw InputError("cannot segment an empty series");
    return Segmenter(engine, config).run();
}

std::unique_ptr<Classifier> make_classifier(const TimeSeriesMatrix& X, const DetectionConfig& config) {
    switch (config.method) {
        case Method::random_forest: return std::make_unique<ForestClassifier>(X, config.forest, config.seed);
        case Method::knn: return std::make_unique<KnnClassifier>(X, config.knn);
        case Method::prior: return std::make_unique<PriorClassifier>(X.n());
        case Method::change_in_mean: break;
    }
    throw InputError("method '" + std::string(to_string(config.method)) + "' is not a classifier engine");
}

DetectionResult detect(const TimeSeriesMatrix& X, const DetectionConfig& config) {
    config.validate();
    if (X.empty()) throw InputError("cannot segment an empty series");
    if (config.method == Method::change_in_mean) return mean_binary_segmentation(X, config);
    auto engine = make_classifier(X, config);
    return binary_segmentation(*engine, config);
}

}  // namespace cpd
