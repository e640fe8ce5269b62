#include "cpd/c_api.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "cpd/detector.hpp"

struct cpd_result {
    std::vector<std::size_t> boundaries;
    std::vector<cpd::SplitRecord> splits;
    std::size_t fits = 0;
};

namespace {

void write_error(char* error, std::size_t size, const std::string& message) {
    if (error == nullptr || size == 0) return;
    const std::size_t len = std::min(size - 1, message.size());
    std::memcpy(error, message.data(), len);
    error[len] = '\0';
}

cpd::Method to_method(int method) {
    switch (method) {
        case CPD_METHOD_RANDOM_FOREST: return cpd::Method::random_forest;
        case CPD_METHOD_KNN: return cpd::Method::knn;
        case CPD_METHOD_CHANGE_IN_MEAN: return cpd::Method::change_in_mean;
        case CPD_METHOD_PRIOR: return cpd::Method::prior;
        default: throw cpd::InputError("unknown method code " + std::to_string(method));
    }
}

cpd::DetectionConfig to_config(const cpd_options& o) {
    cpd::DetectionConfig config;
    config.method = to_method(o.method);
    config.delta = o.delta;
    config.eta = o.eta;
    config.threshold = o.threshold;
    config.permutations = o.permutations;
    config.seed = o.seed;
    config.forest.n_trees = o.n_trees;
    config.forest.max_depth = o.max_depth;
    config.forest.mtry = o.mtry;
    config.forest.threads = o.threads;
    config.knn.max_n = o.knn_cap;
    return config;
}

}  // namespace

extern "C" {

void cpd_default_options(cpd_options* options) {
    if (options == nullptr) return;
    const cpd::DetectionConfig config;
    options->method = CPD_METHOD_RANDOM_FOREST;
    options->delta = config.delta;
    options->eta = config.eta;
    options->threshold = config.threshold;
    options->permutations = config.permutations;
    options->seed = config.seed;
    options->n_trees = config.forest.n_trees;
    options->max_depth = config.forest.max_depth;
    options->mtry = config.forest.mtry;
    options->threads = config.forest.threads;
    options->knn_cap = config.knn.max_n;
}

int cpd_detect(const double* data, size_t n, size_t d, const cpd_options* options, cpd_result** result,
               char* error, size_t error_size) {
    if (result == nullptr) {
        write_error(error, error_size, "result pointer is null");
        return CPD_INVALID_ARGUMENT;
    }
    *result = nullptr;
    if (data == nullptr || n == 0 || d == 0) {
        write_error(error, error_size, "input must be a non-empty n x d matrix");
        return CPD_INVALID_ARGUMENT;
    }
    try {
        cpd_options defaults;
        cpd_default_options(&defaults);
        const cpd::DetectionConfig config = to_config(options ? *options : defaults);
        cpd::TimeSeriesMatrix X(n, d, std::vector<double>(data, data + n * d));
        auto detected = cpd::detect(X, config);
        auto* out = new cpd_result;
        auto b = detected.segmentation.boundaries();
        out->boundaries.assign(b.begin(), b.end());
        out->splits = std::move(detected.split_log);
        out->fits = detected.classifier_fits;
        *result = out;
        write_error(error, error_size, "");
        return CPD_OK;
    } catch (const cpd::InputError& e) {
        write_error(error, error_size, e.what());
        return CPD_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        write_error(error, error_size, "out of memory");
        return CPD_OUT_OF_MEMORY;
    } catch (const std::exception& e) {
        write_error(error, error_size, e.what());
        return CPD_RUNTIME_ERROR;
    } catch (...) {
        write_error(error, error_size, "unknown error");
        return CPD_RUNTIME_ERROR;
    }
}

size_t cpd_result_boundary_count(const cpd_result* result) { return result ? result->boundaries.size() : 0; }

const size_t* cpd_result_boundaries(const cpd_result* result) {
    return result ? result->boundaries.data() : nullptr;
}

size_t cpd_result_split_count(const cpd_result* result) { return result ? result->splits.size() : 0; }

int cpd_result_split(const cpd_result* result, size_t index, cpd_split* out) {
    if (result == nullptr || out == nullptr || index >= result->splits.size()) return CPD_INVALID_ARGUMENT;
    const auto& r = result->splits[index];
    out->u = r.segment.u;
    out->v = r.segment.v;
    out->depth = r.depth;
    out->first_guess_split = r.first_guess_split;
    out->best_split = r.best_split;
    out->max_gain = r.max_gain;
    out->has_p_value = r.p_value.has_value();
    out->p_value = r.p_value.value_or(0.0);
    out->has_gain_threshold = r.gain_threshold.has_value();
    out->gain_threshold = r.gain_threshold.value_or(0.0);
    out->accepted = r.accepted ? 1 : 0;
    return CPD_OK;
}

size_t cpd_result_classifier_fits(const cpd_result* result) { return result ? result->fits : 0; }

void cpd_result_free(cpd_result* result) { delete result; }

const char* cpd_version(void) { return CPD_VERSION_STRING; }

}  // extern "C"
