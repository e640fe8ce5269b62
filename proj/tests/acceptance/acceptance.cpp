#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cpd/detector.hpp"
#include "cpd/likelihood.hpp"
#include "cpd/meanshift.hpp"
#include "cpd/metrics.hpp"
#include "cpd/oracle.hpp"
#include "cpd/simgen.hpp"
#include "numeric_oracles.hpp"
#include "oracle_models.hpp"

using namespace cpd;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Runs body(i) for i in [0, count) on all hardware threads; results land by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    }
}

struct RunStats {
    double ari = 0.0;
    std::size_t change_points = 0;
    std::size_t visited = 0;
    std::size_t fits = 0;
    double seconds = 0.0;
};

std::vector<RunStats> run_scenario(const std::function<LabeledSeries(std::uint64_t)>& make, Method method,
                                   std::size_t runs, std::uint64_t first_seed, double delta = 0.01) {
    std::vector<RunStats> out(runs);
    parallel_for(runs, [&](std::size_t r) {
        const std::uint64_t seed = first_seed + r;
        const LabeledSeries series = make(seed);
        DetectionConfig config;
        config.method = method;
        config.seed = seed;
        config.delta = delta;
        const auto t0 = Clock::now();
        const DetectionResult result = detect(series.X, config);
        out[r].seconds = seconds_since(t0);
        out[r].ari = adjusted_rand_index(series.truth, result.segmentation);
        out[r].change_points = result.segmentation.change_points().size();
        out[r].visited = result.split_log.size();
        out[r].fits = result.classifier_fits;
    });
    return out;
}

double mean_ari(const std::vector<RunStats>& runs) {
    double s = 0.0;
    for (const auto& r : runs) s += r.ari;
    return s / static_cast<double>(runs.size());
}

double detection_rate(const std::vector<RunStats>& runs) {
    std::size_t hits = 0;
    for (const auto& r : runs) hits += r.change_points > 0;
    return static_cast<double>(hits) / static_cast<double>(runs.size());
}

double total_seconds(const std::vector<RunStats>& runs) {
    double s = 0.0;
    for (const auto& r : runs) s += r.seconds;
    return s;
}

std::vector<RunStats> g_fit_audit;

void note_fits(const std::vector<RunStats>& runs) { g_fit_audit.insert(g_fit_audit.end(), runs.begin(), runs.end()); }

void metrics_table() {
    const auto t0 = Clock::now();
    const Segmentation truth({0, 17, 46, 55, 68, 144, 214});
    struct Row {
        std::vector<std::size_t> b;
        double ari, dh;
    };
    const std::vector<Row> rows{
        {{0, 17, 46, 55, 68, 144, 214}, 1.00, 0.000},    {{0, 15, 45, 55, 68, 142, 214}, 0.95, 0.009},
        {{0, 46, 55, 68, 144, 214}, 0.95, 0.079},        {{0, 17, 46, 55, 144, 214}, 0.89, 0.061},
        {{0, 17, 46, 55, 68, 80, 144, 214}, 0.91, 0.056}, {{0, 17, 46, 55, 68, 100, 144, 214}, 0.83, 0.150},
        {{0, 50, 100, 150, 214}, 0.61, 0.150},           {{0, 214}, 0.00, 0.327},
    };
    double worst = 0.0;
    for (const auto& row : rows) {
        const Segmentation est(row.b);
        worst = std::max(worst, std::abs(adjusted_rand_index(truth, est) - row.ari));
        worst = std::max(worst, std::abs(hausdorff_distances(truth, est).max - row.dh));
    }
    const double secs = seconds_since(t0);
    report(worst <= 0.005 && secs < 1.0, "metrics-table",
           fmt("max deviation %.4f over 8 rows (limit 0.005), %.3f s", worst, secs));
}

void cim_benchmark() {
    auto runs = run_scenario(gen_cim, Method::random_forest, 100, 1);
    note_fits(runs);
    const double ari = mean_ari(runs);
    report(ari >= 0.95, "cim-forest", fmt("mean ARI %.4f over 100 seeds (>= 0.95), %.1f s cpu", ari, total_seconds(runs)));
}

void cic_benchmark() {
    auto rf = run_scenario(gen_cic, Method::random_forest, 100, 1);
    note_fits(rf);
    auto knn = run_scenario(gen_cic, Method::knn, 100, 1);
    note_fits(knn);
    auto mean = run_scenario(gen_cic, Method::change_in_mean, 100, 1);
    const double a = mean_ari(rf), b = mean_ari(knn), c = mean_ari(mean);
    report(a >= 0.80, "cic-forest", fmt("mean ARI %.4f over 100 seeds (>= 0.80)", a));
    report(b <= 0.30, "cic-knn", fmt("mean ARI %.4f over 100 seeds (<= 0.30)", b));
    report(c <= 0.10, "cic-mean", fmt("mean ARI %.4f over 100 seeds (<= 0.10)", c));
}

void dirichlet_benchmark() {
    auto rf = run_scenario(gen_dirichlet, Method::random_forest, 100, 1);
    note_fits(rf);
    auto knn = run_scenario(gen_dirichlet, Method::knn, 100, 1);
    note_fits(knn);
    const double a = mean_ari(rf), b = mean_ari(knn);
    report(a >= 0.95, "dirichlet-forest", fmt("mean ARI %.4f over 100 seeds (>= 0.95)", a));
    report(b >= 0.4 && b <= 0.9, "dirichlet-knn", fmt("mean ARI %.4f over 100 seeds (in [0.4, 0.9])", b));
}

void false_positives() {
    auto homogeneous = [](LabeledSeries (*source)(std::uint64_t)) {
        return [source](std::uint64_t seed) {
            auto X = gen_homogeneous_shuffle(segments_as_classes(source(seed)), seed);
            const std::size_t n = X.n();
            return LabeledSeries{std::move(X), Segmentation::trivial(n)};
        };
    };
    auto cim = run_scenario(homogeneous(gen_cim), Method::random_forest, 200, 1);
    auto dir = run_scenario(homogeneous(gen_dirichlet), Method::random_forest, 200, 1);
    note_fits(cim);
    note_fits(dir);
    const double a = detection_rate(cim), b = detection_rate(dir);
    report(a <= 0.08, "false-positive-cim", fmt("rejection rate %.3f over 200 runs (<= 0.08)", a));
    report(b <= 0.08, "false-positive-dirichlet", fmt("rejection rate %.3f over 200 runs (<= 0.08)", b));
}

void fit_counts() {
    std::size_t bad_fits = 0, bad_visits = 0;
    for (const auto& r : g_fit_audit) {
        bad_fits += r.fits != 4 * r.visited;
        bad_visits += r.visited > 2 * r.change_points + 1;
    }
    report(bad_fits == 0 && bad_visits == 0 && !g_fit_audit.empty(), "fit-count",
           fmt("%zu detections: %zu with fits != 4 * visited, %zu with visited > 2C + 1", g_fit_audit.size(), bad_fits,
               bad_visits));
}

void scaling() {
    const std::size_t K = 20;
    auto median_time = [&](std::size_t n) {
        std::vector<double> times;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto series = gen_variable_k(VariableSource::dirichlet, n, K, seed);
            DetectionConfig config;
            config.seed = seed;
            config.delta = 1.0 / (10.0 * K);
            const auto t0 = Clock::now();
            detect(series.X, config);
            times.push_back(seconds_since(t0));
        }
        std::nth_element(times.begin(), times.begin() + 5, times.end());
        const double upper = times[5];
        std::nth_element(times.begin(), times.begin() + 4, times.begin() + 5);
        return 0.5 * (upper + times[4]);
    };
    const double t2000 = median_time(2000);
    const double t4000 = median_time(4000);
    const double ratio = t4000 / t2000;
    report(ratio <= 3.0, "scaling", fmt("median %.3f s at n=4000 vs %.3f s at n=2000, ratio %.2f (<= 3.0)", t4000, t2000, ratio));
}

void oracle_properties() {
    std::mt19937_64 gen(2024);
    std::size_t ok1 = 0, ok2 = 0, ok3 = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 4 + static_cast<std::size_t>(rep % 5);
        const std::size_t m = 2 + static_cast<std::size_t>(rep % 2);
        const std::size_t changes = 1 + static_cast<std::size_t>(rep % std::min<int>(3, static_cast<int>(n) - 2));
        ok1 += test::check_segmentation_maximizer(test::random_model(n, changes, m, gen)).ok;

        auto model2 = test::random_model(40, 1 + rep % 3, m, gen);
        ok2 += test::check_piecewise_convex(model2, {0, 40}).ok;

        auto model3 = test::random_model(30, 1, m, gen);
        std::uniform_int_distribution<std::size_t> guess(1, 29);
        ok3 += test::check_single_kink(model3, guess(gen)).ok;
    }
    report(ok1 == 100, "oracle-segmentation-maximizer", fmt("%zu/100 random models", ok1));
    report(ok2 == 100, "oracle-piecewise-convex", fmt("%zu/100 random models", ok2));
    report(ok3 == 100, "oracle-single-kink", fmt("%zu/100 random models", ok3));
}

void numerical_identities() {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> unif(-6.0, 2.0);
    std::normal_distribution<double> normal(0.0, 3.0);
    double worst_gain = 0.0, worst_mean = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t m = 10 + static_cast<std::size_t>(rep % 90);
        const std::size_t u = static_cast<std::size_t>(rep % 13);
        const SegmentBounds b{u, u + m};
        std::vector<double> l1(m), l2(m);
        for (std::size_t k = 0; k < m; ++k) {
            l1[k] = unif(gen);
            l2[k] = unif(gen);
        }
        auto curve = approximate_gain_curve(l1, l2, b, 0.0, b.v);
        for (std::size_t s = curve.first_split; s <= curve.last_split(); ++s) {
            const double naive = test::naive_approximate_gain(l1, l2, u, s);
            worst_gain = std::max(worst_gain, std::abs(curve.at(s) - naive) / std::max(1.0, std::abs(naive)));
        }

        const std::size_t d = 1 + static_cast<std::size_t>(rep % 4);
        std::vector<double> data((u + m) * d);
        const double offset = 10.0 * normal(gen);
        for (double& x : data) x = offset + normal(gen);
        const TimeSeriesMatrix X(u + m, d, std::move(data));
        const MeanGainEvaluator eval(X);
        for (std::size_t s = b.u + 1; s < b.v; ++s) {
            const double direct = test::likelihood_difference(X, b, s);
            worst_mean = std::max(worst_mean, std::abs(eval.gain(b, s) - direct) / std::max(1.0, std::abs(direct)));
        }
    }
    report(worst_gain <= 1e-9, "identity-approximate-gain", fmt("max relative error %.3g over 1000 inputs", worst_gain));
    report(worst_mean <= 1e-9, "identity-mean-gain", fmt("max relative error %.3g over 1000 inputs", worst_mean));
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    metrics_table();
    numerical_identities();
    oracle_properties();
    cim_benchmark();
    cic_benchmark();
    dirichlet_benchmark();
    false_positives();
    fit_counts();
    scaling();
    std::printf("%d failing criteria, %.1f s total\n", g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
