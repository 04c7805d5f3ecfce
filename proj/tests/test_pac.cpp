#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "driftlearn/pac.hpp"
#include "driftlearn/rng.hpp"

using namespace driftlearn;

TEST_CASE("min_sample_size reproduces the published grid") {
    CHECK(min_sample_size(5.0, 0.1, 0.1) == 400);
    CHECK(min_sample_size(5.0, 0.3, 0.3) == 39);
    // (5 + ln 10) / 0.02 = 365.129..., ceiling 366.
    CHECK(min_sample_size(5.0, 0.1, 0.2) == 366);
    CHECK(min_sample_size(5.0, 0.2, 0.2) == 92);
}

TEST_CASE("min_sample_size domain errors") {
    CHECK_THROWS_AS(min_sample_size(5.0, 0.0, 0.1), UnboundedError);
    CHECK_THROWS_AS(min_sample_size(5.0, 1.0, 0.1), ParameterError);
    CHECK_THROWS_AS(min_sample_size(5.0, 0.1, 0.0), ParameterError);
    CHECK_THROWS_AS(min_sample_size(-1.0, 0.1, 0.1), ParameterError);
    // delta >= 2 is tolerated exactly while the numerator stays nonnegative.
    CHECK_NOTHROW(min_sample_size(5.0, 0.1, 2.0));
    CHECK_THROWS_AS(min_sample_size(0.0, 0.1, 2.5), ParameterError);
}

TEST_CASE("min_sample_size monotonicity") {
    auto rng = make_rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const double L = uniform_range(rng, 0.0, 12.0);
        const double e1 = uniform_range(rng, 0.01, 0.98);
        const double e2 = uniform_range(rng, e1, 0.99);
        const double d1 = uniform_range(rng, 0.01, 1.8);
        const double d2 = uniform_range(rng, d1, 1.9);
        CHECK(min_sample_size(L, e2, d1) <= min_sample_size(L, e1, d1));
        CHECK(min_sample_size(L, e1, d2) <= min_sample_size(L, e1, d1));
        CHECK(min_sample_size(L, e1, d1) <= min_sample_size(L + 1.0, e1, d1));
    }
}

TEST_CASE("achievable_epsilon") {
    CHECK(achievable_epsilon(100, 5.0, 0.1) == Catch::Approx(0.1999466463028824).epsilon(1e-12));
    CHECK(achievable_epsilon(400, 5.0, 0.1) == Catch::Approx(0.0999733231514412).epsilon(1e-12));
    // Numerator approaching zero from above: a vanishing epsilon demand.
    const double boundary = achievable_epsilon(1, 0.0, 2.0 - 1e-9);
    CHECK(boundary > 0.0);
    CHECK(boundary < 1e-4);
    CHECK_THROWS_AS(achievable_epsilon(0, 5.0, 0.1), ParameterError);
    CHECK_THROWS_AS(achievable_epsilon(10, 0.0, 2.0), ParameterError);  // numerator 0
}

TEST_CASE("achievable_epsilon round trip") {
    auto rng = make_rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const double L = uniform_range(rng, 0.0, 10.0);
        const double d = uniform_range(rng, 0.05, 1.5);
        const auto n = 1 + uniform_below(rng, 5000);
        const double eps = achievable_epsilon(n, L, d);
        if (!(eps < 1.0)) continue;  // tiny n can demand eps >= 1
        const auto back = min_sample_size(L, eps, d);
        // Feeding the achieved epsilon back gives n up to the ceiling step.
        CHECK(back <= n);
        CHECK(back + 1 >= n);
    }
}

TEST_CASE("achievable_delta") {
    const auto d = achievable_delta(400, 5.0, 0.1);
    CHECK(d.value == Catch::Approx(0.09957413673572789).epsilon(1e-12));
    CHECK_FALSE(d.vacuous);
    CHECK_FALSE(d.underflow);

    CHECK_THROWS_AS(achievable_delta(0, 5.0, 0.1), ParameterError);

    const auto tiny = achievable_delta(1000000, 5.0, 0.1);
    CHECK(tiny.value == 0.0);
    CHECK(tiny.underflow);

    const auto loose = achievable_delta(1, 5.0, 0.1);  // 2 e^{4.98}, clamped
    CHECK(loose.vacuous);
    CHECK(loose.value == 2.0);
}

TEST_CASE("bound_table") {
    SECTION("3x3 grid matches the formula's multiset") {
        const auto table = bound_table({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, 5.0);
        std::multiset<std::uint64_t> got;
        for (const auto& row : table.entries) got.insert(row.begin(), row.end());
        const std::multiset<std::uint64_t> expected{400, 366, 345, 100, 92, 87, 45, 41, 39};
        CHECK(got == expected);
    }

    SECTION("single cell") {
        const auto table = bound_table({0.1}, {0.1}, 5.0);
        REQUIRE(table.entries.size() == 1);
        REQUIRE(table.entries[0].size() == 1);
        CHECK(table.entries[0][0] == 400);
    }

    SECTION("degenerate log cardinality") {
        const auto table = bound_table({0.5}, {1.0}, 0.0);
        CHECK(table.entries[0][0] == 2);  // ln 2 / 0.5 = 1.386..., ceiling 2
    }

    SECTION("entries weakly decrease along both axes") {
        const auto table = bound_table({0.1, 0.2, 0.3, 0.5}, {0.1, 0.3, 0.7, 1.2}, 5.0);
        for (std::size_t r = 0; r < table.entries.size(); ++r) {
            for (std::size_t c = 1; c < table.entries[r].size(); ++c)
                CHECK(table.entries[r][c] <= table.entries[r][c - 1]);
            if (r > 0)
                for (std::size_t c = 0; c < table.entries[r].size(); ++c)
                    CHECK(table.entries[r][c] <= table.entries[r - 1][c]);
        }
    }

    SECTION("empty axes rejected") {
        CHECK_THROWS_AS(bound_table({}, {0.1}, 5.0), ParameterError);
        CHECK_THROWS_AS(bound_table({0.1}, {}, 5.0), ParameterError);
    }
}

TEST_CASE("schema convenience path") {
    // Three signs with 5, 5, 6 values: ln 150 = 5.0106..., slightly above the
    // worked ln|V| = 5, so the strictest cell moves from 400 to 401.
    const SignSchema schema({{"a", {1, 2, 3, 4, 5}, 0.0},
                             {"b", {1, 2, 3, 4, 5}, 0.0},
                             {"c", {1, 2, 3, 4, 5, 6}, 0.0}});
    CHECK(min_sample_size(schema, 0.1, 0.1) == 401);
}
