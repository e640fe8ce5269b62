#include "cpd/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cpd/rng.hpp"

namespace cpd {

namespace {

enum : std::uint64_t {
    tag_cim = 1,
    tag_cic,
    tag_dirichlet,
    tag_concat,
    tag_lengths,
    tag_variable,
    tag_homogeneous,
};

RngStream simulation_stream(std::uint64_t seed, std::uint64_t tag) {
    return make_rng_stream(seed, derive_stream_id({stream_tag::simulation, tag}));
}

const std::vector<std::size_t>& dirichlet_boundaries() {
    static const std::vector<std::size_t> b{0, 100, 130, 220, 320, 370, 520, 620, 740, 790, 870, 1000};
    return b;
}

void fill_standard_normal(TimeSeriesMatrix& X, std::size_t first, std::size_t last, RngStream& rng) {
    for (std::size_t i = first; i < last; ++i)
        for (double& x : X.row(i)) x = rng.normal();
}

std::vector<double> dirichlet_parameters(std::size_t d, RngStream& rng) {
    std::vector<double> alpha(d);
    for (double& a : alpha) {
        do {
            a = kDirichletMaxParam * rng.uniform();
        } while (a == 0.0);
    }
    return alpha;
}

void fill_dirichlet_row(std::span<double> row, const std::vector<double>& alpha, RngStream& rng) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < row.size(); ++f) {
        row[f] = rng.log_gamma_variate(alpha[f]);
        top = std::max(top, row[f]);
    }
    double total = 0.0;
    for (double& x : row) {
        x = std::exp(x - top);
        total += x;
    }
    for (double& x : row) x /= total;
}

LabeledSeries dirichlet_series(const std::vector<std::size_t>& boundaries, RngStream& rng) {
    const std::size_t n = boundaries.back();
    LabeledSeries out{TimeSeriesMatrix::zeros(n, kDirichletDim), Segmentation(boundaries)};
    for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
        const auto alpha = dirichlet_parameters(kDirichletDim, rng);
        for (std::size_t i = boundaries[k]; i < boundaries[k + 1]; ++i) fill_dirichlet_row(out.X.row(i), alpha, rng);
    }
    return out;
}

std::vector<std::vector<std::size_t>> rows_by_class(const LabeledDataset& table) {
    std::vector<std::vector<std::size_t>> rows(table.class_count());
    for (std::size_t i = 0; i < table.labels.size(); ++i) rows[table.labels[i]].push_back(i);
    return rows;
}

}  // namespace

std::vector<std::size_t> LabeledDataset::class_sizes() const {
    std::vector<std::size_t> sizes(class_count(), 0);
    for (std::size_t label : labels) ++sizes.at(label);
    return sizes;
}

void LabeledDataset::validate() const {
    if (labels.size() != X.n()) throw InputError("label count does not match the number of rows");
    for (std::size_t label : labels) {
        if (label >= class_names.size()) throw InputError("label index out of range");
    }
}

LabeledSeries gen_cim(std::uint64_t seed) {
    RngStream rng = simulation_stream(seed, tag_cim);
    LabeledSeries out{TimeSeriesMatrix::zeros(kCimLength, kCimDim), Segmentation({0, 200, 400, 600})};
    fill_standard_normal(out.X, 0, kCimLength, rng);
    for (std::size_t i = 200; i < 400; ++i)
        for (double& x : out.X.row(i)) x += kCimShift;
    return out;
}

LabeledSeries gen_cic(std::uint64_t seed) {
    RngStream rng = simulation_stream(seed, tag_cic);
    LabeledSeries out{TimeSeriesMatrix::zeros(kCimLength, kCimDim), Segmentation({0, 200, 400, 600})};
    fill_standard_normal(out.X, 0, kCimLength, rng);

    // Symmetric square root of (1 - rho) I + rho 11^T: a I + b 11^T.
    const double d = static_cast<double>(kCimDim);
    const double a = std::sqrt(1.0 - kCicCorrelation);
    const double b = (std::sqrt(1.0 + (d - 1.0) * kCicCorrelation) - a) / d;
    for (std::size_t i = 200; i < 400; ++i) {
        auto row = out.X.row(i);
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        for (double& x : row) x = a * x + b * total;
    }
    return out;
}

LabeledSeries gen_dirichlet(std::uint64_t seed) {
    RngStream rng = simulation_stream(seed, tag_dirichlet);
    return dirichlet_series(dirichlet_boundaries(), rng);
}

LabeledSeries gen_dataset_concat(const LabeledDataset& table, double delta, std::uint64_t seed) {
    table.validate();
    const double min_rows = delta * static_cast<double>(table.X.n());
    auto rows = rows_by_class(table);
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < rows.size(); ++c) {
        if (!rows[c].empty() && static_cast<double>(rows[c].size()) >= min_rows) kept.push_back(c);
    }
    if (kept.size() < 2) throw InputError("fewer than two classes have at least delta * n rows");

    RngStream rng = simulation_stream(seed, tag_concat);
    rng.shuffle(std::span<std::size_t>(kept));
    std::vector<std::size_t> order;
    std::vector<std::size_t> boundaries{0};
    for (std::size_t c : kept) {
        auto& members = rows[c];
        rng.shuffle(std::span<std::size_t>(members));
        order.insert(order.end(), members.begin(), members.end());
        boundaries.push_back(order.size());
    }
    return {table.X.select_rows(order), Segmentation(std::move(boundaries))};
}

std::vector<std::size_t> variable_segment_lengths(std::size_t n, std::size_t segments, std::uint64_t seed) {
    if (segments == 0) throw InputError("number of segments must be positive");
    if (n < 20 * segments) throw InputError("n must be at least 20 times the number of segments");

    RngStream rng = simulation_stream(seed, tag_lengths);
    std::vector<double> draws(segments);
    for (double& e : draws) e = rng.exponential();
    const double total = std::accumulate(draws.begin(), draws.end(), 0.0);
    const double k = static_cast<double>(segments);

    std::vector<std::size_t> lengths(segments);
    long long sum = 0;
    for (std::size_t j = 0; j < segments; ++j) {
        const double rel = 1.0 / (10.0 * k) + 0.9 * draws[j] / total;
        lengths[j] = static_cast<std::size_t>(std::llround(static_cast<double>(n) * rel));
        sum += static_cast<long long>(lengths[j]);
    }

    long long residual = static_cast<long long>(n) - sum;
    std::vector<std::size_t> by_size(segments);
    std::iota(by_size.begin(), by_size.end(), std::size_t{0});
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](std::size_t a, std::size_t b) { return lengths[a] > lengths[b]; });
    for (std::size_t j = 0; residual != 0; ++j) {
        auto& len = lengths[by_size[j % segments]];
        if (residual > 0) {
            ++len;
            --residual;
        } else {
            --len;
            ++residual;
        }
    }
    return lengths;
}

LabeledSeries gen_variable_k(VariableSource source, std::size_t n, std::size_t segments, std::uint64_t seed,
                             const LabeledDataset* table) {
    const auto lengths = variable_segment_lengths(n, segments, seed);
    std::vector<std::size_t> boundaries{0};
    for (std::size_t len : lengths) boundaries.push_back(boundaries.back() + len);

    RngStream rng = simulation_stream(seed, tag_variable);
    if (source == VariableSource::dirichlet) return dirichlet_series(boundaries, rng);

    if (table == nullptr) throw InputError("dataset resampling needs a labeled table");
    table->validate();
    const auto rows = rows_by_class(*table);
    std::vector<std::size_t> available;
    for (std::size_t c = 0; c < rows.size(); ++c)
        if (!rows[c].empty()) available.push_back(c);
    if (available.size() < 2) throw InputError("dataset resampling needs at least two non-empty classes");

    const std::size_t d = table->X.d();
    LabeledSeries out{TimeSeriesMatrix::zeros(n, d), Segmentation(boundaries)};
    std::size_t previous = static_cast<std::size_t>(-1);
    for (std::size_t k = 0; k < segments; ++k) {
        std::size_t cls;
        do {
            cls = available[rng.uniform_index(available.size())];
        } while (cls == previous);
        previous = cls;
        const auto& members = rows[cls];
        for (std::size_t i = boundaries[k]; i < boundaries[k + 1]; ++i) {
            auto src = table->X.row(members[rng.uniform_index(members.size())]);
            auto dst = out.X.row(i);
            for (std::size_t f = 0; f < d; ++f) dst[f] = src[f] + rng.normal();
        }
    }
    return out;
}

TimeSeriesMatrix gen_homogeneous_shuffle(const LabeledDataset& table, std::uint64_t seed) {
    table.validate();
    auto rows = rows_by_class(table);
    std::size_t largest = 0;
    for (std::size_t c = 1; c < rows.size(); ++c)
        if (rows[c].size() > rows[largest].size()) largest = c;
    auto& members = rows.at(largest);
    if (members.empty()) throw InputError("table has no rows");
    RngStream rng = simulation_stream(seed, tag_homogeneous);
    rng.shuffle(std::span<std::size_t>(members));
    return table.X.select_rows(members);
}

LabeledDataset normalize_within_class_variance(const LabeledDataset& table) {
    table.validate();
    const auto rows = rows_by_class(table);
    LabeledDataset out = table;
    for (std::size_t f = 0; f < table.X.d(); ++f) {
        double variance_sum = 0.0;
        std::size_t counted = 0;
        for (const auto& members : rows) {
            if (members.size() < 2) continue;
            double mean = 0.0;
            for (std::size_t i : members) mean += table.X(i, f);
            mean /= static_cast<double>(members.size());
            double ss = 0.0;
            for (std::size_t i : members) ss += (table.X(i, f) - mean) * (table.X(i, f) - mean);
            variance_sum += ss / static_cast<double>(members.size() - 1);
            ++counted;
        }
        if (counted == 0) continue;
        const double scale = std::sqrt(variance_sum / static_cast<double>(counted));
        if (scale == 0.0) continue;
        for (std::size_t i = 0; i < out.X.n(); ++i) out.X(i, f) /= scale;
    }
    return out;
}

LabeledDataset segments_as_classes(const LabeledSeries& series) {
    LabeledDataset out;
    out.X = series.X;
    out.labels.resize(series.X.n());
    for (std::size_t k = 0; k < series.truth.segment_count(); ++k) {
        const auto seg = series.truth.segment(k);
        out.class_names.push_back("segment" + std::to_string(k + 1));
        for (std::size_t i = seg.u; i < seg.v; ++i) out.labels[i] = k;
    }
    return out;
}

LabeledSeries generate(const ScenarioSpec& spec) {
    auto need_table = [&]() -> const LabeledDataset& {
        if (spec.table == nullptr) throw InputError("scenario needs a labeled table");
        return *spec.table;
    };
    switch (spec.kind) {
        case ScenarioKind::cim: return gen_cim(spec.seed);
        case ScenarioKind::cic: return gen_cic(spec.seed);
        case ScenarioKind::dirichlet: return gen_dirichlet(spec.seed);
        case ScenarioKind::dataset_concat: return gen_dataset_concat(need_table(), spec.delta, spec.seed);
        case ScenarioKind::variable_dirichlet:
            return gen_variable_k(VariableSource::dirichlet, spec.n, spec.segments, spec.seed);
        case ScenarioKind::dataset_resample:
            return gen_variable_k(VariableSource::dataset_resample, spec.n, spec.segments, spec.seed, &need_table());
        case ScenarioKind::homogeneous_shuffle: {
            auto X = gen_homogeneous_shuffle(need_table(), spec.seed);
            const std::size_t n = X.n();
            return {std::move(X), Segmentation::trivial(n)};
        }
    }
    throw InputError("unknown scenario kind");
}

}  // namespace cpd
