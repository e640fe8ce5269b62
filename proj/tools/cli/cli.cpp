#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpd/detector.hpp"
#include "cpd/forest.hpp"
#include "cpd/ingest.hpp"
#include "cpd/meanshift.hpp"
#include "cpd/metrics.hpp"
#include "cpd/simgen.hpp"

#ifndef CPD_TOOL_VERSION
#define CPD_TOOL_VERSION "0.0.0"
#endif

namespace cpd::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input;
    std::string output;
    std::string method = "rf";
    std::optional<double> delta;
    double threshold = 0.02;
    std::size_t permutations = 199;
    double eta = kDefaultEta;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::size_t trees = 100;
    std::size_t max_depth = 8;
    std::size_t mtry = 0;
    std::size_t knn_cap = 20000;
    double mean_penalty = 0.0;
    bool clamp_ratio = false;
    bool majority_vote = false;

    std::string delimiter = ",";
    std::string label_column;
    bool no_normalize = false;
    bool mad_scale = false;

    bool timing = false;

    std::string scenario;
    std::size_t n_sims = 1;

    std::optional<std::size_t> start;
    std::optional<std::size_t> stop;
};

void add_engine_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--method", o.method, "Detection engine: rf, knn, mean or prior")
        ->check(CLI::IsMember({"rf", "knn", "mean", "prior"}))
        ->envname("CPD_METHOD")
        ->capture_default_str();
    cmd.add_option("--delta", o.delta, "Minimum relative segment length")->envname("CPD_DELTA");
    cmd.add_option("--threshold", o.threshold, "Significance threshold of the permutation test")
        ->envname("CPD_THRESHOLD")
        ->capture_default_str();
    cmd.add_option("--permutations", o.permutations, "Number of pseudo-permutations")
        ->envname("CPD_PERMUTATIONS")
        ->capture_default_str();
    cmd.add_option("--eta", o.eta, "Offset of the log_eta transform")->envname("CPD_ETA")->capture_default_str();
    cmd.add_option("--seed", o.seed, "Random seed")->envname("CPD_SEED")->capture_default_str();
    cmd.add_option("--threads", o.threads, "Worker threads for forest training")
        ->envname("CPD_THREADS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--trees", o.trees, "Trees per forest")
        ->envname("CPD_TREES")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--max-depth", o.max_depth, "Maximal tree depth, 0 for unlimited")
        ->envname("CPD_MAX_DEPTH")
        ->capture_default_str();
    cmd.add_option("--mtry", o.mtry, "Features tried per split, 0 for floor(sqrt(d))")
        ->envname("CPD_MTRY")
        ->capture_default_str();
    cmd.add_option("--knn-cap", o.knn_cap, "Largest n for which the kNN distance cache is built")
        ->envname("CPD_KNN_CAP")
        ->capture_default_str();
    cmd.add_option("--mean-penalty", o.mean_penalty, "Penalty multiplier c of the change-in-mean rule, 0 for default")
        ->envname("CPD_MEAN_PENALTY");
    cmd.add_flag("--clamp-ratio", o.clamp_ratio, "Cap prior-scaled ratios at 1 before log_eta")
        ->envname("CPD_CLAMP_RATIO");
    cmd.add_flag("--majority-vote", o.majority_vote, "Aggregate trees by leaf majority instead of leaf fractions")
        ->envname("CPD_MAJORITY_VOTE");
}

void add_input_options(CLI::App& cmd, Options& o) {
    cmd.add_option("--delimiter", o.delimiter, "Field delimiter")->envname("CPD_DELIMITER")->capture_default_str();
    cmd.add_option("--label-column", o.label_column, "Column holding class labels, excluded from features")
        ->envname("CPD_LABEL_COLUMN");
    cmd.add_flag("--no-normalize", o.no_normalize, "Skip robust per-column scaling")->envname("CPD_NO_NORMALIZE");
    cmd.add_flag("--mad-scale", o.mad_scale, "Scale by the MAD of absolute differences instead of their median")
        ->envname("CPD_MAD_SCALE");
}

DetectionConfig make_config(const Options& o, double default_delta = 0.01) {
    DetectionConfig c;
    c.method = parse_method(o.method);
    c.delta = o.delta.value_or(default_delta);
    c.threshold = o.threshold;
    c.permutations = o.permutations;
    c.eta = o.eta;
    c.seed = o.seed;
    c.clamp_ratio = o.clamp_ratio;
    c.forest.n_trees = o.trees;
    c.forest.max_depth = o.max_depth;
    c.forest.mtry = o.mtry;
    c.forest.threads = o.threads;
    c.forest.aggregation = o.majority_vote ? VoteAggregation::majority_vote : VoteAggregation::leaf_fraction;
    c.knn.max_n = o.knn_cap;
    c.mean.penalty_scale = o.mean_penalty;
    try {
        c.validate();
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
    return c;
}

LoadOptions load_options(const Options& o) {
    if (o.delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
    LoadOptions lo;
    lo.delimiter = o.delimiter.front();
    if (!o.label_column.empty()) lo.label_column = o.label_column;
    return lo;
}

NormalizeOptions normalize_options(const Options& o) {
    return {!o.no_normalize, o.mad_scale ? ScaleEstimator::mad_abs_diff : ScaleEstimator::median_abs_diff};
}

EncodedTable load_input(const Options& o) {
    if (o.input.empty()) throw UsageError("--input is required");
    return encode_and_normalize(load_table(o.input, load_options(o)), normalize_options(o));
}

/// Writes to --output when given, else to `out`.
void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.output.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file '" + o.output + "'");
    file << text;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json config_echo(const Options& o, const DetectionConfig& c) {
    json j;
    j["method"] = std::string(to_string(c.method));
    j["delta"] = c.delta;
    j["threshold"] = c.threshold;
    j["permutations"] = c.permutations;
    j["eta"] = c.eta;
    j["seed"] = c.seed;
    j["clamp_ratio"] = c.clamp_ratio;
    j["forest"] = {{"trees", c.forest.n_trees},
                   {"max_depth", c.forest.max_depth},
                   {"mtry", c.forest.mtry},
                   {"min_leaf", c.forest.min_leaf},
                   {"aggregation", c.forest.aggregation == VoteAggregation::majority_vote ? "majority_vote"
                                                                                          : "leaf_fraction"}};
    j["knn"] = {{"cap", c.knn.max_n}};
    j["mean"] = {{"penalty_scale", c.mean.penalty_scale > 0.0 ? c.mean.penalty_scale : kCalibratedMeanPenalty}};
    j["normalize"] = !o.no_normalize;
    j["scale_estimator"] = o.mad_scale ? "mad_abs_diff" : "median_abs_diff";
    return j;
}

json split_record_json(const SplitRecord& r) {
    json j;
    j["segment"] = {r.segment.u, r.segment.v};
    j["depth"] = r.depth;
    j["initial_guesses"] = r.initial_guesses;
    j["first_guess_split"] = r.first_guess_split;
    j["best_split"] = r.best_split;
    j["max_gain"] = r.max_gain;
    j["p_value"] = optional_number(r.p_value);
    j["gain_threshold"] = optional_number(r.gain_threshold);
    j["accepted"] = r.accepted;
    return j;
}

int cmd_detect(const Options& o, std::ostream& out) {
    const DetectionConfig config = make_config(o);
    const auto t0 = Clock::now();
    const EncodedTable table = load_input(o);
    const auto t1 = Clock::now();
    const DetectionResult result = detect(table.X, config);
    const auto t2 = Clock::now();

    json doc;
    doc["version"] = kSchemaVersion;
    doc["tool"] = {{"name", "cpd"}, {"version", CPD_TOOL_VERSION}};
    doc["config"] = config_echo(o, config);
    doc["input"] = {{"path", o.input},
                    {"n", table.X.n()},
                    {"d", table.X.d()},
                    {"features", table.feature_names},
                    {"zero_scale_columns", table.zero_scale_columns}};
    const auto b = result.segmentation.boundaries();
    doc["boundaries"] = std::vector<std::size_t>(b.begin(), b.end());
    doc["change_points"] = result.segmentation.change_points();
    json log = json::array();
    for (const auto& r : result.split_log) log.push_back(split_record_json(r));
    doc["split_log"] = std::move(log);
    doc["classifier_fits"] = result.classifier_fits;
    if (o.timing) {
        doc["timings"] = {{"load_seconds", std::chrono::duration<double>(t1 - t0).count()},
                          {"detect_seconds", std::chrono::duration<double>(t2 - t1).count()}};
    }
    emit(o, out, doc.dump(2) + "\n");
    return kSuccess;
}

struct Scenario {
    std::function<LabeledSeries(std::uint64_t)> make;
    double default_delta = 0.01;
};

LabeledSeries synthetic(const std::string& name, std::uint64_t seed) {
    if (name == "cim") return gen_cim(seed);
    if (name == "cic") return gen_cic(seed);
    if (name == "dirichlet") return gen_dirichlet(seed);
    throw UsageError("unknown synthetic scenario '" + name + "'");
}

bool is_synthetic(const std::string& name) { return name == "cim" || name == "cic" || name == "dirichlet"; }

std::size_t parse_count(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const auto value = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
        throw UsageError("invalid " + what + " '" + text + "'");
    }
}

Scenario parse_scenario(const std::string& spec, const Options& o, const std::optional<double>& delta) {
    if (is_synthetic(spec)) return {[spec](std::uint64_t s) { return synthetic(spec, s); }};

    auto labeled_table = [&](const std::string& path) {
        if (o.label_column.empty()) throw UsageError("dataset scenarios need --label-column");
        auto raw = load_table(path, load_options(o));
        return std::make_shared<LabeledDataset>(encode_and_normalize(raw, normalize_options(o)).labeled());
    };

    if (spec.starts_with("dataset:")) {
        auto table = labeled_table(spec.substr(8));
        const double filter = delta.value_or(0.01);
        return {[table, filter](std::uint64_t s) { return gen_dataset_concat(*table, filter, s); }};
    }
    if (spec.starts_with("variable:")) {
        // variable:<dirichlet|path>:<n>:<K>
        const std::string rest = spec.substr(9);
        const auto k_pos = rest.rfind(':');
        const auto n_pos = k_pos == std::string::npos ? std::string::npos : rest.rfind(':', k_pos - 1);
        if (n_pos == std::string::npos) throw UsageError("expected variable:<dirichlet|path>:<n>:<K>");
        const std::string source = rest.substr(0, n_pos);
        const std::size_t n = parse_count(rest.substr(n_pos + 1, k_pos - n_pos - 1), "n");
        const std::size_t k = parse_count(rest.substr(k_pos + 1), "K");
        if (k == 0 || n < 20 * k) throw UsageError("variable scenarios need K >= 1 and n >= 20 K");
        const double default_delta = 1.0 / (10.0 * static_cast<double>(k));
        if (source == "dirichlet") {
            return {[n, k](std::uint64_t s) { return gen_variable_k(VariableSource::dirichlet, n, k, s); },
                    default_delta};
        }
        auto table = std::make_shared<LabeledDataset>(normalize_within_class_variance(*labeled_table(source)));
        return {[table, n, k](std::uint64_t s) {
                    return gen_variable_k(VariableSource::dataset_resample, n, k, s, table.get());
                },
                default_delta};
    }
    if (spec.starts_with("fp:")) {
        const std::string source = spec.substr(3);
        if (is_synthetic(source)) {
            return {[source](std::uint64_t s) {
                auto X = gen_homogeneous_shuffle(segments_as_classes(synthetic(source, s)), s);
                const std::size_t n = X.n();
                return LabeledSeries{std::move(X), Segmentation::trivial(n)};
            }};
        }
        auto table = labeled_table(source);
        return {[table](std::uint64_t s) {
            auto X = gen_homogeneous_shuffle(*table, s);
            const std::size_t n = X.n();
            return LabeledSeries{std::move(X), Segmentation::trivial(n)};
        }};
    }
    throw UsageError("unknown scenario '" + spec + "'");
}

std::string format_number(double x) {
    std::ostringstream s;
    s << std::setprecision(10) << x;
    return s.str();
}

int cmd_benchmark(const Options& o, std::ostream& out) {
    if (o.scenario.empty()) throw UsageError("--scenario is required");
    if (o.n_sims < 1) throw UsageError("--n-sims must be at least 1");
    const Scenario scenario = parse_scenario(o.scenario, o, o.delta);
    DetectionConfig config = make_config(o, scenario.default_delta);

    std::ostringstream csv;
    csv << "scenario,method,replicate,seed,n,d,ari,d_true_to_est,d_est_to_true,hausdorff,"
           "n_true_changepoints,n_est_changepoints,detection_rate,classifier_fits,seconds\n";
    double sum_ari = 0, sum_ab = 0, sum_ba = 0, sum_h = 0, sum_true = 0, sum_est = 0, sum_det = 0, sum_fits = 0,
           sum_sec = 0;
    for (std::size_t r = 0; r < o.n_sims; ++r) {
        const std::uint64_t seed = o.seed + r;
        const LabeledSeries series = scenario.make(seed);
        config.seed = seed;
        const auto t0 = Clock::now();
        const DetectionResult result = detect(series.X, config);
        const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        const MetricReport m = evaluate(series.truth, result.segmentation);
        const std::size_t n_true = series.truth.segment_count() - 1;
        const double detected = m.n_est_changepoints > 0 ? 1.0 : 0.0;
        csv << o.scenario << ',' << o.method << ',' << r << ',' << seed << ',' << series.X.n() << ','
            << series.X.d() << ',' << format_number(m.ari) << ',' << format_number(m.d_true_to_est) << ','
            << format_number(m.d_est_to_true) << ',' << format_number(m.hausdorff) << ',' << n_true << ','
            << m.n_est_changepoints << ',' << detected << ',' << result.classifier_fits << ','
            << format_number(seconds) << '\n';
        sum_ari += m.ari;
        sum_ab += m.d_true_to_est;
        sum_ba += m.d_est_to_true;
        sum_h += m.hausdorff;
        sum_true += static_cast<double>(n_true);
        sum_est += static_cast<double>(m.n_est_changepoints);
        sum_det += detected;
        sum_fits += static_cast<double>(result.classifier_fits);
        sum_sec += seconds;
    }
    if (o.n_sims > 1) {
        const double k = static_cast<double>(o.n_sims);
        csv << o.scenario << ',' << o.method << ",mean,,,," << format_number(sum_ari / k) << ','
            << format_number(sum_ab / k) << ',' << format_number(sum_ba / k) << ',' << format_number(sum_h / k) << ','
            << format_number(sum_true / k) << ',' << format_number(sum_est / k) << ',' << format_number(sum_det / k)
            << ',' << format_number(sum_fits / k) << ',' << format_number(sum_sec / k) << '\n';
    }
    emit(o, out, csv.str());
    return kSuccess;
}

int cmd_gain_curve(const Options& o, std::ostream& out) {
    if (o.input.empty() == o.scenario.empty()) throw UsageError("give exactly one of --input and --scenario");
    TimeSeriesMatrix X;
    double default_delta = 0.01;
    if (!o.input.empty()) {
        X = load_input(o).X;
    } else {
        const Scenario scenario = parse_scenario(o.scenario, o, o.delta);
        default_delta = scenario.default_delta;
        X = scenario.make(o.seed).X;
    }
    const DetectionConfig config = make_config(o, default_delta);
    if (config.method == Method::change_in_mean) throw UsageError("gain-curve needs a classifier engine");

    const SegmentBounds bounds{o.start.value_or(0), o.stop.value_or(X.n())};
    if (!(bounds.u < bounds.v && bounds.v <= X.n())) {
        throw UsageError("segment bounds must satisfy 0 <= start < stop <= n = " + std::to_string(X.n()));
    }
    auto engine = make_classifier(X, config);
    TwoStepResult search;
    try {
        search = two_step_search(*engine, bounds, config);
    } catch (const SegmentTooShort& e) {
        throw UsageError(e.what());
    }

    std::ostringstream csv;
    csv << "stage,guess_id,guess,t,gain,prob,l_left,l_right\n";
    auto block = [&](const char* stage, std::size_t id, std::size_t guess, const GainCurve& curve,
                     const std::vector<double>& probs, std::span<const double> left, std::span<const double> right) {
        for (std::size_t t = bounds.u + 1; t <= bounds.v; ++t) {
            const std::size_t k = t - bounds.u - 1;
            csv << stage << ',' << id << ',' << guess << ',' << t << ',';
            if (t >= curve.first_split && t <= curve.last_split()) csv << format_number(curve.at(t));
            csv << ',' << format_number(probs[k]) << ',' << format_number(left[k]) << ',' << format_number(right[k])
                << '\n';
        }
    };
    for (std::size_t j = 0; j < search.initial_guesses.size(); ++j) {
        block("first", j, search.initial_guesses[j], search.first_step_curves[j], search.first_step_predictions[j],
              search.likelihoods.column(j, 0), search.likelihoods.column(j, 1));
    }
    block("second", search.initial_guesses.size(), search.s1, search.final_gain_curve, search.refit_predictions,
          search.refit_likelihoods.left, search.refit_likelihoods.right);
    emit(o, out, csv.str());
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Offline multivariate change point detection with classifiers", "cpd"};
    app.set_version_flag("--version", CPD_TOOL_VERSION);
    app.set_config("--config", "", "TOML or INI file with option values");
    app.require_subcommand(1);

    Options o;
    auto* detect_cmd = app.add_subcommand("detect", "Detect change points in a delimited data file");
    detect_cmd->add_option("--input", o.input, "Input file (header row required)")->envname("CPD_INPUT");
    detect_cmd->add_option("--output", o.output, "Write the result document here instead of stdout")
        ->envname("CPD_OUTPUT");
    detect_cmd->add_flag("--timing", o.timing, "Include wall-clock timings in the document");
    add_engine_options(*detect_cmd, o);
    add_input_options(*detect_cmd, o);

    auto* bench_cmd = app.add_subcommand("benchmark", "Run seeded replicates of a simulation scenario");
    bench_cmd->add_option("--scenario", o.scenario,
                          "cim, cic, dirichlet, dataset:<path>, variable:<dirichlet|path>:<n>:<K>, fp:<source>")
        ->envname("CPD_SCENARIO");
    bench_cmd->add_option("--n-sims", o.n_sims, "Number of replicates")->envname("CPD_N_SIMS")->capture_default_str();
    bench_cmd->add_option("--output", o.output, "Write the table here instead of stdout")->envname("CPD_OUTPUT");
    add_engine_options(*bench_cmd, o);
    add_input_options(*bench_cmd, o);

    auto* curve_cmd = app.add_subcommand("gain-curve", "Dump two-step search gain curves for one segment");
    curve_cmd->add_option("--input", o.input, "Input file (header row required)")->envname("CPD_INPUT");
    curve_cmd->add_option("--scenario", o.scenario, "Simulate the input instead (uses --seed)")
        ->envname("CPD_SCENARIO");
    curve_cmd->add_option("--start", o.start, "Segment start u (exclusive)");
    curve_cmd->add_option("--stop", o.stop, "Segment end v (inclusive)");
    curve_cmd->add_option("--output", o.output, "Write the curves here instead of stdout")->envname("CPD_OUTPUT");
    add_engine_options(*curve_cmd, o);
    add_input_options(*curve_cmd, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::CallForVersion&) {
        out << CPD_TOOL_VERSION << '\n';
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (detect_cmd->parsed()) return cmd_detect(o, out);
        if (bench_cmd->parsed()) return cmd_benchmark(o, out);
        return cmd_gain_curve(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace cpd::cli
