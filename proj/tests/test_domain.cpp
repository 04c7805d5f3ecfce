#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "driftlearn/domain.hpp"
#include "driftlearn/oracle_io.hpp"
#include "driftlearn/rng.hpp"

using namespace driftlearn;

namespace {

std::vector<double> ladder(std::size_t n, double start = 1.0) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i);
    return v;
}

SignSchema tri_schema() {
    return SignSchema({{"a", ladder(5), 0.5}, {"b", ladder(5), 1.0}, {"c", ladder(6), 0.0}});
}

}  // namespace

TEST_CASE("schema validation") {
    CHECK_NOTHROW(tri_schema());
    CHECK_THROWS_AS(SignSchema({}), SchemaError);
    CHECK_THROWS_AS(SignSchema({{"a", {}, 0.0}}), SchemaError);
    CHECK_THROWS_AS(SignSchema({{"a", {2.0, 1.0}, 0.0}}), SchemaError);
    CHECK_THROWS_AS(SignSchema({{"a", {1.0, 1.0}, 0.0}}), SchemaError);
    CHECK_THROWS_AS(SignSchema({{"a", {1.0}, -0.1}}), SchemaError);
    CHECK_THROWS_AS(SignSchema({{"a", {1.0}, 0.0}, {"a", {1.0}, 0.0}}), SchemaError);
}

TEST_CASE("valued space cardinality") {
    CHECK(valued_space_cardinality(tri_schema()) == 150);
    CHECK(valued_space_cardinality(SignSchema({{"only", {7.0}, 0.0}})) == 1);
    CHECK(valued_space_cardinality(SignSchema({{"a", ladder(2), 0},
                                               {"b", ladder(3), 0},
                                               {"c", ladder(4), 0},
                                               {"d", ladder(5), 0}})) == 120);

    SECTION("overflow is an error, not a wrap") {
        std::vector<SignDef> signs;
        for (int i = 0; i < 10; ++i)
            signs.push_back({"s" + std::to_string(i), ladder(100), 0.0});
        CHECK_THROWS_AS(valued_space_cardinality(SignSchema(signs)), OverflowError);
        // The log route stays finite well past 64 bits.
        CHECK(log_valued_space_cardinality(SignSchema(signs)) ==
              Catch::Approx(10.0 * std::log(100.0)));
    }

    SECTION("appending a sign multiplies the cardinality") {
        auto rng = make_rng(41);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<SignDef> signs;
            const auto count = 1 + uniform_below(rng, 4);
            for (std::uint64_t i = 0; i < count; ++i)
                signs.push_back({"s" + std::to_string(i),
                                 ladder(1 + uniform_below(rng, 6)), 0.0});
            const auto base = valued_space_cardinality(SignSchema(signs));
            const auto k = 1 + uniform_below(rng, 7);
            signs.push_back({"extra", ladder(k), 0.0});
            CHECK(valued_space_cardinality(SignSchema(signs)) == base * k);
        }
    }
}

TEST_CASE("oracle construction") {
    const auto schema = tri_schema();
    CHECK_THROWS_AS(Oracle(schema, {}), ParameterError);
    CHECK_THROWS_AS(Oracle(schema, {{{1.0, 2.0}, Label::positive}}), DimensionError);
    const Oracle ok(schema, {{{1, 2, 3}, Label::positive}}, "unit", 7);
    CHECK(ok.size() == 1);
    CHECK(ok.provenance() == "unit");
    CHECK(ok.collected_at() == 7);
}

TEST_CASE("validate_oracle findings") {
    const auto schema = tri_schema();

    SECTION("clean oracle") {
        const Oracle oracle(schema, {{{1, 2, 3}, Label::positive},
                                     {{2, 3, 4}, Label::negative}});
        const auto report = validate_oracle(oracle);
        CHECK(report.clean());
        CHECK(report.inconsistency_rate == 0.0);
    }

    SECTION("conflicting duplicate tuples are both contradicted") {
        const Oracle oracle(schema, {{{1, 2, 3}, Label::positive},
                                     {{1, 2, 3}, Label::negative}});
        const auto report = validate_oracle(oracle);
        CHECK(report.violations.empty());
        CHECK(report.inconsistent_records == 2);
        CHECK(report.inconsistency_rate == 1.0);
    }

    SECTION("inadmissible value reported") {
        const Oracle oracle(schema, {{{7, 2, 3}, Label::positive}});
        const auto report = validate_oracle(oracle);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].record_index == 0);
        CHECK(report.violations[0].sign_index == 0);
        CHECK(report.violations[0].value == 7.0);
    }

    SECTION("rate is permutation-invariant and within [0, 1]") {
        auto rng = make_rng(99);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<Observation> records;
            const auto n = 2 + uniform_below(rng, 12);
            for (std::uint64_t i = 0; i < n; ++i) {
                Observation obs;
                for (int s = 0; s < 3; ++s)
                    obs.values.push_back(1.0 + static_cast<double>(uniform_below(rng, 3)));
                obs.label = uniform_unit(rng) < 0.5 ? Label::positive : Label::negative;
                records.push_back(obs);
            }
            const Oracle oracle(schema, records);
            const auto before = validate_oracle(oracle);
            CHECK(before.inconsistency_rate >= 0.0);
            CHECK(before.inconsistency_rate <= 1.0);

            auto shuffled = records;
            shuffle_in_place(shuffled, rng);
            const auto after = validate_oracle(Oracle(schema, shuffled));
            CHECK(after.inconsistent_records == before.inconsistent_records);
            CHECK(after.inconsistency_rate == before.inconsistency_rate);
            CHECK(after.violations.size() == before.violations.size());
        }
    }
}

TEST_CASE("normalizer maps admissible range onto [0, 1]") {
    const auto schema = tri_schema();
    const auto norm = Normalizer::from_schema(schema);
    const auto x = norm.apply(std::vector<double>{1, 5, 3});
    CHECK(x[0] == 0.0);
    CHECK(x[1] == 1.0);
    CHECK(x[2] == Catch::Approx(0.4));
    CHECK_THROWS_AS(norm.apply(std::vector<double>{1, 2}), DimensionError);

    const SignSchema degenerate({{"fixed", {3.0}, 0.0}});
    CHECK(Normalizer::from_schema(degenerate).apply(std::vector<double>{3.0})[0] == 0.0);
}

TEST_CASE("oracle file round trip") {
    const auto schema = SignSchema({{"a", {0.5, 1.25, 2.0}, 0.25}, {"b", ladder(4), 1.0}});
    const Oracle oracle(schema, {{{0.5, 2}, Label::positive},
                                 {{1.25, 4}, Label::negative},
                                 {{2.0, 1}, Label::positive}});
    const auto text = format_oracle(oracle);
    const auto parsed = parse_oracle(text);
    REQUIRE(parsed.size() == oracle.size());
    CHECK(parsed.schema().size() == 2);
    CHECK(parsed.schema().sign(0).sigma == 0.25);
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        CHECK(parsed.records()[i].values == oracle.records()[i].values);
        CHECK(parsed.records()[i].label == oracle.records()[i].label);
    }
    CHECK(format_oracle(parsed) == text);
}

TEST_CASE("oracle file errors") {
    CHECK_THROWS_AS(parse_oracle(""), IoError);
    CHECK_THROWS_AS(parse_oracle("a:0:1,2\n"), IoError);            // no records
    CHECK_THROWS_AS(parse_oracle("a:0:1,2\n1,2,+\n"), IoError);     // width mismatch
    CHECK_THROWS_AS(parse_oracle("a:0:1,2\n1,x\n"), IoError);       // bad label token
    CHECK_THROWS_AS(parse_oracle("a;b\n"), IoError);                // broken header field
}
