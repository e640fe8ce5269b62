#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cpd/detector.hpp"
#include "cpd/ingest.hpp"
#include "cpd/simgen.hpp"

using namespace cpd;

namespace {

RawTable parse(const std::string& text, const LoadOptions& options = {}) {
    std::istringstream in(text);
    return parse_table(in, options, "mem.csv");
}

std::string error_of(const std::string& text, const LoadOptions& options = {}) {
    try {
        parse(text, options);
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("ingest") {
    TEST_CASE("numeric table") {
        auto t = parse("a,b\n1,2\n3,4.5\n-1e3,0\n");
        CHECK(t.column_count() == 2);
        CHECK(t.row_count() == 3);
        CHECK(t.kinds == std::vector<ColumnKind>{ColumnKind::numeric, ColumnKind::numeric});
        CHECK_FALSE(t.label_column());
    }

    TEST_CASE("categorical inference and overrides") {
        auto t = parse("color,x\nred,1\nblue,2\nred,3\n");
        CHECK(t.kinds[0] == ColumnKind::categorical);
        CHECK(t.kinds[1] == ColumnKind::numeric);
        LoadOptions opts;
        opts.kind_overrides["x"] = ColumnKind::categorical;
        CHECK(parse("color,x\nred,1\nblue,2\n", opts).kinds[1] == ColumnKind::categorical);
        LoadOptions labeled;
        labeled.label_column = "color";
        auto l = parse("color,x\nred,1\nblue,2\n", labeled);
        CHECK(l.label_column() == 0);
    }

    TEST_CASE("delimiter and whitespace") {
        LoadOptions opts;
        opts.delimiter = ';';
        auto t = parse("a ; b\n 1 ; 2 \n\n3;4\n", opts);
        CHECK(t.names == std::vector<std::string>{"a", "b"});
        CHECK(t.row_count() == 2);
    }

    TEST_CASE("ragged rows name the row") {
        const auto msg = error_of("a,b\n1,2\n3\n");
        CHECK(msg.find("data row 2") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
    }

    TEST_CASE("bad numbers name row and column") {
        LoadOptions opts;
        opts.kind_overrides["b"] = ColumnKind::numeric;
        const auto msg = error_of("a,b\n1,2\n3,x\n", opts);
        CHECK(msg.find("data row 2") != std::string::npos);
        CHECK(msg.find("'b'") != std::string::npos);
        CHECK(error_of("a\n1\ninf\n").find("non-finite") != std::string::npos);
        CHECK_FALSE(error_of("").empty());
        CHECK_FALSE(error_of("a,b\n").empty());
        LoadOptions missing;
        missing.label_column = "y";
        CHECK_FALSE(error_of("a,b\n1,2\n", missing).empty());
    }

    TEST_CASE("missing file names the path") {
        try {
            load_table("/nonexistent/data.csv");
            FAIL("expected an error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("/nonexistent/data.csv") != std::string::npos);
        }
    }

    TEST_CASE("file round trip") {
        const std::string path = std::string(CPD_TEST_TMPDIR) + "/ingest_roundtrip.csv";
        {
            std::ofstream out(path);
            out << "x,y\n1,2\n3,4\n";
        }
        auto t = load_table(path);
        CHECK(t.row_count() == 2);
        CHECK(t.rows[1][1] == "4");
    }

    TEST_CASE("robust scale") {
        const std::vector<double> col{1, 2, 4, 7, 11};
        CHECK(robust_scale(col) == doctest::Approx(2.5));
        // |diffs| = (1, 2, 3, 4), median 2.5, absolute deviations (1.5, 0.5, 0.5, 1.5)
        CHECK(robust_scale(col, ScaleEstimator::mad_abs_diff) == doctest::Approx(1.0));
        const std::vector<double> flat{3, 3, 3};
        CHECK(robust_scale(flat) == 0.0);
    }

    TEST_CASE("encoding and normalization") {
        auto t = parse("c,x,k\nred,1,a\nblue,2,b\ngreen,4,a\nred,7,b\nblue,11,a\n");
        auto enc = encode_and_normalize(t);
        CHECK(enc.X.d() == 6);
        CHECK(enc.feature_names ==
              std::vector<std::string>{"c=red", "c=blue", "c=green", "x", "k=a", "k=b"});
        CHECK(enc.X(0, 3) == doctest::Approx(1.0 / 2.5));
        CHECK(enc.X(4, 3) == doctest::Approx(11.0 / 2.5));
        CHECK(enc.scales[3] == doctest::Approx(2.5));

        NormalizeOptions raw;
        raw.normalize = false;
        auto plain = encode_and_normalize(t, raw);
        for (std::size_t i = 0; i < 5; ++i) {
            double ones = 0.0;
            for (std::size_t f = 0; f < 3; ++f) {
                CHECK((plain.X(i, f) == 0.0 || plain.X(i, f) == 1.0));
                ones += plain.X(i, f);
            }
            CHECK(ones == 1.0);
        }
    }

    TEST_CASE("constant columns pass through") {
        auto t = parse("a,b\n5,1\n5,2\n5,4\n");
        auto enc = encode_and_normalize(t);
        CHECK(enc.zero_scale_columns == std::vector<std::size_t>{0});
        CHECK(enc.X(1, 0) == 5.0);
        CHECK(enc.scales[0] == 1.0);
    }

    TEST_CASE("labels") {
        LoadOptions opts;
        opts.label_column = "y";
        auto t = parse("x,y\n1,a\n2,b\n3,a\n", opts);
        auto enc = encode_and_normalize(t);
        CHECK(enc.X.d() == 1);
        CHECK(enc.labels == std::vector<std::size_t>{0, 1, 0});
        CHECK(enc.class_names == std::vector<std::string>{"a", "b"});
        auto ds = enc.labeled();
        CHECK(ds.class_sizes() == std::vector<std::size_t>{2, 1});
        CHECK_THROWS_AS(encode_and_normalize(parse("x\n1\n")).labeled(), InputError);
    }

    TEST_CASE("normalization is idempotent up to rescaling") {
        auto X = gen_cim(2).X;
        std::vector<double> scales;
        auto once = robust_normalize(X, ScaleEstimator::median_abs_diff, nullptr, &scales);
        for (std::size_t f = 0; f < once.d(); ++f) {
            std::vector<double> col(once.n());
            for (std::size_t i = 0; i < once.n(); ++i) col[i] = once(i, f);
            CHECK(robust_scale(col) == doctest::Approx(1.0));
        }
        auto twice = robust_normalize(once);
        for (std::size_t i = 0; i < once.n(); ++i)
            for (std::size_t f = 0; f < once.d(); ++f) CHECK(twice(i, f) == doctest::Approx(once(i, f)));
    }

    TEST_CASE("forest detection ignores normalization") {
        auto series = gen_cim(4);
        TimeSeriesMatrix scaled = series.X;
        for (std::size_t i = 0; i < scaled.n(); ++i)
            for (std::size_t f = 0; f < scaled.d(); ++f) scaled(i, f) *= 0.25 * static_cast<double>(f + 1);
        DetectionConfig config;
        config.seed = 4;
        auto a = detect(series.X, config);
        auto b = detect(robust_normalize(series.X), config);
        auto c = detect(scaled, config);
        CHECK(a.segmentation == b.segmentation);
        CHECK(a.segmentation == c.segmentation);
        REQUIRE(a.split_log.size() == b.split_log.size());
        for (std::size_t k = 0; k < a.split_log.size(); ++k) CHECK(a.split_log[k].p_value == b.split_log[k].p_value);
    }
}
