#ifndef CPD_C_API_H
#define CPD_C_API_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum cpd_status {
    CPD_OK = 0,
    CPD_INVALID_ARGUMENT = 1,
    CPD_RUNTIME_ERROR = 2,
    CPD_OUT_OF_MEMORY = 3
};

enum cpd_method {
    CPD_METHOD_RANDOM_FOREST = 0,
    CPD_METHOD_KNN = 1,
    CPD_METHOD_CHANGE_IN_MEAN = 2,
    CPD_METHOD_PRIOR = 3
};

typedef struct cpd_options {
    int method;
    double delta;
    double eta;
    double threshold;
    size_t permutations;
    uint64_t seed;
    size_t n_trees;
    size_t max_depth;
    size_t mtry;
    size_t threads;
    size_t knn_cap;
} cpd_options;

typedef struct cpd_split {
    size_t u;
    size_t v;
    size_t depth;
    size_t first_guess_split;
    size_t best_split;
    double max_gain;
    double p_value;        /* valid when has_p_value != 0 */
    int has_p_value;
    double gain_threshold; /* valid when has_gain_threshold != 0 */
    int has_gain_threshold;
    int accepted;
} cpd_split;

typedef struct cpd_result cpd_result;

void cpd_default_options(cpd_options* options);

/* Runs detection on a row-major n x d buffer. On failure *result is NULL and a
   message is written to error (truncated to error_size, always terminated). */
int cpd_detect(const double* data, size_t n, size_t d, const cpd_options* options, cpd_result** result,
               char* error, size_t error_size);

size_t cpd_result_boundary_count(const cpd_result* result);
const size_t* cpd_result_boundaries(const cpd_result* result);
size_t cpd_result_split_count(const cpd_result* result);
int cpd_result_split(const cpd_result* result, size_t index, cpd_split* out);
size_t cpd_result_classifier_fits(const cpd_result* result);
void cpd_result_free(cpd_result* result);

const char* cpd_version(void);

#ifdef __cplusplus
}
#endif

#endif
