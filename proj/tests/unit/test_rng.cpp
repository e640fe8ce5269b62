#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpd/rng.hpp"

using namespace cpd;

TEST_SUITE("rng") {
    TEST_CASE("philox known-answer vectors") {
        auto zero = detail::philox4x32_10({0, 0, 0, 0}, {0, 0});
        CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
        auto ones = detail::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff});
        CHECK(ones == std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
        auto pi = detail::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
        CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
    }

    TEST_CASE("same seed and stream give identical draws") {
        auto a = make_rng_stream(7, 0);
        auto b = make_rng_stream(7, 0);
        for (int i = 0; i < 100; ++i) CHECK(a() == b());
    }

    TEST_CASE("streams and seeds separate") {
        auto base = make_rng_stream(7, 0);
        auto other_stream = make_rng_stream(7, 1);
        auto other_seed = make_rng_stream(8, 0);
        int same_stream = 0, same_seed = 0;
        for (int i = 0; i < 100; ++i) {
            const auto x = base();
            same_stream += x == other_stream();
            same_seed += x == other_seed();
        }
        CHECK(same_stream == 0);
        CHECK(same_seed == 0);
    }

    TEST_CASE("derived stream ids depend on every part and its order") {
        CHECK(derive_stream_id({1, 2, 3}) == derive_stream_id({1, 2, 3}));
        CHECK(derive_stream_id({1, 2, 3}) != derive_stream_id({3, 2, 1}));
        CHECK(derive_stream_id({1, 2}) != derive_stream_id({1, 2, 0}));
    }

    TEST_CASE("uniform draws lie in [0, 1) with the right moments") {
        auto rng = make_rng_stream(1, 2);
        double sum = 0, sumsq = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double u = rng.uniform();
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
            sum += u;
            sumsq += u * u;
        }
        CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
        CHECK(sumsq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.01));
    }

    TEST_CASE("uniform_index is in range and roughly flat") {
        auto rng = make_rng_stream(3, 4);
        std::vector<int> counts(7, 0);
        const int n = 70000;
        for (int i = 0; i < n; ++i) {
            const auto k = rng.uniform_index(7);
            REQUIRE(k < 7);
            ++counts[k];
        }
        for (int c : counts) CHECK(std::abs(c - n / 7) < 400);
        CHECK(rng.uniform_index(1) == 0);
    }

    TEST_CASE("normal, exponential and gamma moments") {
        auto rng = make_rng_stream(5, 6);
        const int n = 200000;
        double s = 0, ss = 0, e = 0, g = 0, gs = 0;
        for (int i = 0; i < n; ++i) {
            const double z = rng.normal();
            s += z;
            ss += z * z;
            e += rng.exponential();
        }
        CHECK(std::abs(s / n) < 0.01);
        CHECK(ss / n == doctest::Approx(1.0).epsilon(0.01));
        CHECK(e / n == doctest::Approx(1.0).epsilon(0.01));
        for (double shape : {0.05, 0.5, 1.0, 3.5}) {
            g = gs = 0;
            for (int i = 0; i < n; ++i) {
                const double x = rng.gamma(shape);
                REQUIRE(x >= 0.0);
                g += x;
                gs += x * x;
            }
            CHECK(g / n == doctest::Approx(shape).epsilon(0.03));
            CHECK(gs / n - (g / n) * (g / n) == doctest::Approx(shape).epsilon(0.06));
        }
    }

    TEST_CASE("log gamma variate stays finite for tiny shapes") {
        auto rng = make_rng_stream(9, 9);
        for (int i = 0; i < 10000; ++i) {
            const double lg = rng.log_gamma_variate(1e-3);
            REQUIRE(std::isfinite(lg));
        }
    }

    TEST_CASE("shuffle is a permutation and reproducible") {
        std::vector<int> a(50), b(50);
        std::iota(a.begin(), a.end(), 0);
        std::iota(b.begin(), b.end(), 0);
        auto r1 = make_rng_stream(1, 1);
        auto r2 = make_rng_stream(1, 1);
        r1.shuffle(std::span<int>(a));
        r2.shuffle(std::span<int>(b));
        CHECK(a == b);
        auto sorted = a;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
        CHECK_FALSE(std::is_sorted(a.begin(), a.end()));
    }

    TEST_CASE("shuffle positions are uniform") {
        auto rng = make_rng_stream(2, 3);
        std::vector<std::vector<int>> hits(4, std::vector<int>(4, 0));
        const int reps = 40000;
        for (int r = 0; r < reps; ++r) {
            std::array<int, 4> v{0, 1, 2, 3};
            rng.shuffle(std::span<int>(v));
            for (int p = 0; p < 4; ++p) ++hits[v[p]][p];
        }
        for (auto& row : hits)
            for (int h : row) CHECK(std::abs(h - reps / 4) < 400);
    }
}
