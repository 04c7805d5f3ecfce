#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "driftlearn/domain.hpp"
#include "driftlearn/errors.hpp"

namespace driftlearn {

// Sample-complexity planning for the finite-hypothesis-space bound
//
//     N >= (ln|V| + ln(2/delta)) / (2 epsilon^2)
//
// epsilon: maximum acceptable disagreement probability between the empirical
// classifier and the best available classifier. delta: maximum risk of
// drawing a sample that yields a classifier worse than epsilon.

struct PlanningQuery {
    double log_cardinality = 0.0;  // ln|V|, dimensionless
    double epsilon = 0.0;          // in (0, 1)
    double delta = 0.0;            // in (0, 2); values >= 2 make the bound vacuous
};

namespace detail {

inline double bound_numerator(const PlanningQuery& q) {
    if (!(q.epsilon > 0.0))
        throw UnboundedError("epsilon must be > 0; epsilon = 0 demands an unbounded sample");
    if (!(q.epsilon < 1.0) || !std::isfinite(q.epsilon))
        throw ParameterError("epsilon must lie in (0, 1)");
    if (!(q.delta > 0.0) || !std::isfinite(q.delta))
        throw ParameterError("delta must be > 0");
    if (!(q.log_cardinality >= 0.0) || !std::isfinite(q.log_cardinality))
        throw ParameterError("log cardinality must be >= 0");
    const double numer = q.log_cardinality + std::log(2.0 / q.delta);
    // delta >= 2 turns ln(2/delta) nonpositive; accept only while the
    // numerator stays nonnegative.
    if (numer < 0.0)
        throw ParameterError("delta too large: the bound numerator is negative");
    return numer;
}

}  // namespace detail

// Smallest integer N satisfying the bound; ceiling is the only sound
// integerization of a lower bound.
inline std::uint64_t min_sample_size(const PlanningQuery& q) {
    const double numer = detail::bound_numerator(q);
    const double raw = numer / (2.0 * q.epsilon * q.epsilon);
    const double ceiled = std::ceil(raw);
    return ceiled < 1.0 ? 1 : static_cast<std::uint64_t>(ceiled);
}

inline std::uint64_t min_sample_size(double log_cardinality, double epsilon, double delta) {
    return min_sample_size(PlanningQuery{log_cardinality, epsilon, delta});
}

// Convenience path: chain a schema through its log-cardinality.
inline std::uint64_t min_sample_size(const SignSchema& schema, double epsilon, double delta) {
    return min_sample_size(log_valued_space_cardinality(schema), epsilon, delta);
}

// Algebraic inverse: best epsilon achievable with n samples.
inline double achievable_epsilon(std::uint64_t n, double log_cardinality, double delta) {
    if (n < 1) throw ParameterError("sample size must be >= 1");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be > 0");
    if (!(log_cardinality >= 0.0) || !std::isfinite(log_cardinality))
        throw ParameterError("log cardinality must be >= 0");
    const double numer = log_cardinality + std::log(2.0 / delta);
    if (!(numer > 0.0))
        throw ParameterError("log cardinality + ln(2/delta) must be positive");
    return std::sqrt(numer / (2.0 * static_cast<double>(n)));
}

// Algebraic inverse: best delta achievable with n samples.
struct DeltaBound {
    double value = 0.0;
    bool vacuous = false;    // raw delta >= 2: any sample meets the bound
    bool underflow = false;  // raw delta underflowed to zero
};

inline DeltaBound achievable_delta(std::uint64_t n, double log_cardinality, double epsilon) {
    if (n < 1) throw ParameterError("sample size must be >= 1");
    if (!(epsilon > 0.0) || !(epsilon < 1.0) || !std::isfinite(epsilon))
        throw ParameterError("epsilon must lie in (0, 1)");
    if (!(log_cardinality >= 0.0) || !std::isfinite(log_cardinality))
        throw ParameterError("log cardinality must be >= 0");
    const double raw =
        2.0 * std::exp(log_cardinality - 2.0 * static_cast<double>(n) * epsilon * epsilon);
    DeltaBound out;
    if (raw >= 2.0) {
        out.value = 2.0;
        out.vacuous = true;
    } else if (raw == 0.0) {
        out.value = 0.0;
        out.underflow = true;
    } else {
        out.value = raw;
    }
    return out;
}

struct BoundTable {
    std::vector<double> epsilons;  // column axis
    std::vector<double> deltas;    // row axis
    std::vector<std::vector<std::uint64_t>> entries;  // entries[row][col]
};

inline BoundTable bound_table(std::vector<double> epsilons, std::vector<double> deltas,
                              double log_cardinality) {
    if (epsilons.empty() || deltas.empty())
        throw ParameterError("bound table axes must be nonempty");
    BoundTable table;
    table.epsilons = std::move(epsilons);
    table.deltas = std::move(deltas);
    table.entries.reserve(table.deltas.size());
    for (double d : table.deltas) {
        std::vector<std::uint64_t> row;
        row.reserve(table.epsilons.size());
        for (double e : table.epsilons) row.push_back(min_sample_size(log_cardinality, e, d));
        table.entries.push_back(std::move(row));
    }
    return table;
}

}  // namespace driftlearn
