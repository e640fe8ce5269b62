#include <doctest.h>

#include "cpd/core.hpp"
#include "helpers.hpp"

using namespace cpd;

TEST_SUITE("core") {
    TEST_CASE("matrix shape and finiteness are enforced") {
        CHECK_THROWS_AS(TimeSeriesMatrix(0, 1, {}), InputError);
        CHECK_THROWS_AS(TimeSeriesMatrix(2, 0, {}), InputError);
        CHECK_THROWS_AS(TimeSeriesMatrix(2, 2, {1, 2, 3}), InputError);
        CHECK_THROWS_AS(TimeSeriesMatrix(1, 2, {1, std::nan("")}), InputError);
        CHECK_THROWS_AS(TimeSeriesMatrix(1, 1, {HUGE_VAL}), InputError);

        TimeSeriesMatrix X(3, 2, {1, 2, 3, 4, 5, 6});
        CHECK(X.n() == 3);
        CHECK(X.d() == 2);
        CHECK(X(2, 1) == 6);
        CHECK(X.row(1)[0] == 3);
    }

    TEST_CASE("slice uses half-open boundary convention") {
        TimeSeriesMatrix X(4, 1, {10, 20, 30, 40});
        auto s = X.slice(1, 3);
        REQUIRE(s.n() == 2);
        CHECK(s(0, 0) == 20);
        CHECK(s(1, 0) == 30);
        std::vector<std::size_t> rows{3, 0};
        auto picked = X.select_rows(rows);
        CHECK(picked(0, 0) == 40);
        CHECK(picked(1, 0) == 10);
    }

    TEST_CASE("segmentation invariants") {
        CHECK_THROWS_AS(Segmentation({}), InputError);
        CHECK_THROWS_AS(Segmentation({1, 5}), InputError);
        CHECK_THROWS_AS(Segmentation({0, 3, 3, 5}), InputError);
        CHECK_THROWS_AS(Segmentation({0}), InputError);

        Segmentation s({0, 3, 7, 10});
        CHECK(s.n() == 10);
        CHECK(s.segment_count() == 3);
        CHECK(s.change_points() == std::vector<std::size_t>{3, 7});
        CHECK(s.lengths() == std::vector<std::size_t>{3, 4, 3});
        CHECK(s.min_segment_length() == 3);
        CHECK(s.segment(1) == SegmentBounds{3, 7});
        CHECK(Segmentation::trivial(5).boundaries().size() == 2);
    }

    TEST_CASE("segmentation round-trips through lengths") {
        std::mt19937_64 gen(11);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<std::size_t> b{0};
            const int k = 1 + static_cast<int>(gen() % 8);
            for (int j = 0; j < k; ++j) b.push_back(b.back() + 1 + gen() % 20);
            Segmentation s(b);
            auto lengths = s.lengths();
            CHECK(Segmentation::from_lengths(lengths) == s);
            CHECK(Segmentation::from_change_points(s.change_points(), s.n()) == s);
        }
    }

    TEST_CASE("from_change_points sorts and validates") {
        auto s = Segmentation::from_change_points({7, 3}, 10);
        CHECK(s == Segmentation({0, 3, 7, 10}));
        CHECK_THROWS_AS(Segmentation::from_change_points({0}, 10), InputError);
        CHECK_THROWS_AS(Segmentation::from_change_points({10}, 10), InputError);
        CHECK_THROWS_AS(Segmentation::from_change_points({4, 4}, 10), InputError);
    }

    TEST_CASE("segment bounds validation") {
        CHECK_NOTHROW(validate(SegmentBounds{0, 5}, 5));
        CHECK_THROWS_AS(validate(SegmentBounds{3, 3}, 5), InputError);
        CHECK_THROWS_AS(validate(SegmentBounds{0, 6}, 5), InputError);
        CHECK(SegmentBounds{2, 5}.contains(3));
        CHECK_FALSE(SegmentBounds{2, 5}.contains(2));
        CHECK(SegmentBounds{2, 5}.contains(5));
    }

    TEST_CASE("config defaults and validation") {
        DetectionConfig c;
        CHECK(c.delta == 0.01);
        CHECK(c.threshold == 0.02);
        CHECK(c.permutations == 199);
        CHECK(c.eta == doctest::Approx(std::exp(-6.0)).epsilon(1e-15));
        CHECK(c.forest.n_trees == 100);
        CHECK(c.forest.max_depth == 8);
        CHECK_NOTHROW(c.validate());

        for (double bad : {0.0, 0.5, -0.1}) {
            DetectionConfig d;
            d.delta = bad;
            CHECK_THROWS_AS(d.validate(), InputError);
        }
        DetectionConfig e;
        e.eta = 1.0;
        CHECK_THROWS_AS(e.validate(), InputError);
        DetectionConfig p;
        p.permutations = 0;
        CHECK_THROWS_AS(p.validate(), InputError);
    }

    TEST_CASE("guard length is ceil(delta n) without float creep") {
        CHECK(guard_length(0.1, 100) == 10);
        CHECK(guard_length(0.01, 600) == 6);
        CHECK(guard_length(0.01, 1000) == 10);
        CHECK(guard_length(0.015, 1000) == 15);
        CHECK(guard_length(0.011, 100) == 2);
        CHECK(guard_length(0.0, 100) == 0);
    }

    TEST_CASE("mtry resolves to floor(sqrt(d)) with bounds") {
        ForestParams p;
        CHECK(p.resolved_mtry(1) == 1);
        CHECK(p.resolved_mtry(5) == 2);
        CHECK(p.resolved_mtry(20) == 4);
        p.mtry = 50;
        CHECK(p.resolved_mtry(3) == 3);
    }

    TEST_CASE("method names") {
        CHECK(parse_method("rf") == Method::random_forest);
        CHECK(parse_method("knn") == Method::knn);
        CHECK(parse_method("mean") == Method::change_in_mean);
        CHECK(to_string(Method::knn) == "knn");
        CHECK_THROWS_AS(parse_method("svm"), InputError);
    }
}
