#pragma once

#include <random>
#include <vector>

#include "cpd/core.hpp"

namespace test {

inline cpd::TimeSeriesMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<double> data(n * d);
    for (double& x : data) x = normal(gen);
    return {n, d, std::move(data)};
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> out(n);
    for (double& x : out) x = u(gen);
    return out;
}

inline cpd::TimeSeriesMatrix column(std::vector<double> values) {
    const std::size_t n = values.size();
    return {n, 1, std::move(values)};
}

}  // namespace test
