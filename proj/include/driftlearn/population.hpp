#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftlearn/domain.hpp"
#include "driftlearn/errors.hpp"
#include "driftlearn/kernel.hpp"
#include "driftlearn/rng.hpp"

namespace driftlearn {

// Synthetic drifting reference population with a known latent concept: the
// concept is the best available classifier by construction, since labels
// contradict it only with probability noise_rate < 0.5.

struct LatentConcept {
    TrainedClassifier classifier;

    Label classify(std::span<const double> raw) const {
        return predict(classifier, raw).label;
    }
};

// Linear rule on normalized values: positive iff w . x_norm >= threshold.
// Expressed as a linear-kernel machine so it shares the predict path.
inline LatentConcept make_threshold_concept(const SignSchema& schema,
                                            std::vector<double> weights, double threshold) {
    if (weights.size() != schema.size())
        throw DimensionError("threshold concept needs one weight per sign");
    LatentConcept concept;
    concept.classifier.kernel = KernelSpec::linear();
    concept.classifier.normalizer = Normalizer::from_schema(schema);
    concept.classifier.support_points.push_back(std::move(weights));
    concept.classifier.coefficients.push_back(1.0);
    concept.classifier.bias = -threshold;
    return concept;
}

namespace detail {

template <typename Fn>
void for_each_tuple(const SignSchema& schema, Fn&& fn) {
    std::vector<std::size_t> idx(schema.size(), 0);
    std::vector<double> tuple(schema.size());
    for (;;) {
        for (std::size_t s = 0; s < schema.size(); ++s)
            tuple[s] = schema.sign(s).values[idx[s]];
        fn(tuple);
        std::size_t s = schema.size();
        while (s-- > 0) {
            if (++idx[s] < schema.sign(s).values.size()) break;
            idx[s] = 0;
            if (s == 0) return;
        }
    }
}

}  // namespace detail

// Positive share of the concept over the valued-signs space: exact when the
// space is small, Monte Carlo otherwise.
inline double concept_positive_share(const SignSchema& schema, const LatentConcept& concept,
                                     std::uint64_t seed = 0) {
    const double log_card = log_valued_space_cardinality(schema);
    constexpr std::uint64_t kExactLimit = 65536;
    if (log_card <= std::log(static_cast<double>(kExactLimit))) {
        std::uint64_t positive = 0, total = 0;
        detail::for_each_tuple(schema, [&](const std::vector<double>& tuple) {
            ++total;
            if (concept.classify(tuple) == Label::positive) ++positive;
        });
        return static_cast<double>(positive) / static_cast<double>(total);
    }
    auto rng = make_rng(sub_seed(seed, "concept-share"));
    constexpr std::size_t kSamples = 8192;
    std::size_t positive = 0;
    std::vector<double> tuple(schema.size());
    for (std::size_t i = 0; i < kSamples; ++i) {
        for (std::size_t s = 0; s < schema.size(); ++s) {
            const auto& vals = schema.sign(s).values;
            tuple[s] = vals[static_cast<std::size_t>(uniform_below(rng, vals.size()))];
        }
        if (concept.classify(tuple) == Label::positive) ++positive;
    }
    return static_cast<double>(positive) / static_cast<double>(kSamples);
}

struct ConceptParams {
    std::size_t support_count = 6;
    double scale = 0.5;      // gaussian width in normalized units
    double coeff_min = 0.5;  // |coefficient| range
    double coeff_max = 1.5;
    double balance_lo = 0.3;  // accepted positive-share window
    double balance_hi = 0.7;
    std::size_t max_tries = 200;
};

// Random gaussian-kernel concept, rejection-sampled until its class balance
// falls inside the accepted window. Avoids degenerate one-class populations.
inline LatentConcept sample_gaussian_concept(const SignSchema& schema, std::uint64_t seed,
                                             const ConceptParams& params = {}) {
    for (std::size_t attempt = 0; attempt < params.max_tries; ++attempt) {
        auto rng = make_rng(sub_seed(seed, "concept-draw", attempt));
        LatentConcept concept;
        concept.classifier.kernel = KernelSpec::gaussian(params.scale);
        concept.classifier.normalizer = Normalizer::from_schema(schema);
        for (std::size_t i = 0; i < params.support_count; ++i) {
            std::vector<double> point(schema.size());
            for (std::size_t s = 0; s < schema.size(); ++s) {
                const auto& vals = schema.sign(s).values;
                const double raw = vals[static_cast<std::size_t>(uniform_below(rng, vals.size()))];
                point[s] = concept.classifier.normalizer.ranges[s] > 0.0
                               ? (raw - concept.classifier.normalizer.mins[s]) /
                                     concept.classifier.normalizer.ranges[s]
                               : 0.0;
            }
            concept.classifier.support_points.push_back(std::move(point));
            const double magnitude = uniform_range(rng, params.coeff_min, params.coeff_max);
            concept.classifier.coefficients.push_back(uniform_unit(rng) < 0.5 ? magnitude
                                                                              : -magnitude);
        }
        concept.classifier.bias = uniform_range(rng, -0.5, 0.5);
        const double share = concept_positive_share(schema, concept, sub_seed(seed, "share", attempt));
        if (share >= params.balance_lo && share <= params.balance_hi) return concept;
    }
    throw NumericError("could not sample a balanced concept; widen the balance window");
}

struct PopulationConfig {
    SignSchema schema;
    std::size_t size0 = 0;
    std::uint32_t birth_death_scale = 0;  // max members added/removed per tick
    std::uint32_t max_step = 0;           // max per-sign index change per tick
    double noise_rate = 0.0;              // label flip probability, < 0.5
    LatentConcept concept;
    std::uint64_t seed = 0;

    void validate() const {
        if (schema.empty()) throw SchemaError("population config needs a schema");
        if (!(noise_rate >= 0.0) || !(noise_rate < 0.5))
            throw ParameterError("noise_rate must lie in [0, 0.5)");
    }
};

struct Member {
    std::uint64_t id = 0;
    std::vector<std::uint32_t> value_indices;  // index into each sign's value set
    Label noisy_label = Label::negative;       // what an oracle would record
    Label concept_label = Label::negative;     // ground truth
};

struct PopulationState {
    std::int64_t tick = 0;
    std::uint64_t next_id = 0;
    std::vector<Member> members;
};

inline std::vector<double> member_values(const SignSchema& schema, const Member& m) {
    std::vector<double> values(schema.size());
    for (std::size_t s = 0; s < schema.size(); ++s)
        values[s] = schema.sign(s).values[m.value_indices[s]];
    return values;
}

namespace detail {

inline Member spawn_member(const PopulationConfig& config, std::uint64_t id, Rng& rng) {
    Member m;
    m.id = id;
    m.value_indices.resize(config.schema.size());
    for (std::size_t s = 0; s < config.schema.size(); ++s) {
        const auto n = config.schema.sign(s).values.size();
        m.value_indices[s] = static_cast<std::uint32_t>(uniform_below(rng, n));
    }
    m.concept_label = config.concept.classify(member_values(config.schema, m));
    const bool flip = uniform_unit(rng) < config.noise_rate;
    m.noisy_label = flip ? opposite(m.concept_label) : m.concept_label;
    return m;
}

}  // namespace detail

inline PopulationState init_population(const PopulationConfig& config) {
    config.validate();
    PopulationState state;
    auto rng = make_rng(sub_seed(config.seed, "population-init"));
    state.members.reserve(config.size0);
    for (std::size_t i = 0; i < config.size0; ++i)
        state.members.push_back(detail::spawn_member(config, state.next_id++, rng));
    return state;
}

// One tick of drift: every sign of every member moves by at most max_step
// index positions; up to birth_death_scale members leave and up to
// birth_death_scale arrive. Noise flips are redrawn only for members whose
// tuple actually changed, so label noise is stable for static members.
inline PopulationState step_population(const PopulationState& state,
                                       const PopulationConfig& config) {
    config.validate();
    PopulationState next = state;
    auto rng = make_rng(sub_seed(config.seed, "population-step",
                                 static_cast<std::uint64_t>(state.tick)));

    for (auto& m : next.members) {
        bool changed = false;
        for (std::size_t s = 0; s < config.schema.size(); ++s) {
            const auto n = static_cast<std::int64_t>(config.schema.sign(s).values.size());
            const std::int64_t step =
                uniform_int(rng, -static_cast<std::int64_t>(config.max_step),
                            static_cast<std::int64_t>(config.max_step));
            std::int64_t idx = static_cast<std::int64_t>(m.value_indices[s]) + step;
            if (idx < 0) idx = 0;
            if (idx >= n) idx = n - 1;
            if (idx != static_cast<std::int64_t>(m.value_indices[s])) {
                m.value_indices[s] = static_cast<std::uint32_t>(idx);
                changed = true;
            }
        }
        if (changed) {
            m.concept_label = config.concept.classify(member_values(config.schema, m));
            const bool flip = uniform_unit(rng) < config.noise_rate;
            m.noisy_label = flip ? opposite(m.concept_label) : m.concept_label;
        }
    }

    std::uint64_t departures = uniform_below(rng, config.birth_death_scale + 1ULL);
    while (departures-- > 0 && !next.members.empty()) {
        const auto victim =
            static_cast<std::size_t>(uniform_below(rng, next.members.size()));
        next.members[victim] = std::move(next.members.back());
        next.members.pop_back();
    }

    const std::uint64_t arrivals = uniform_below(rng, config.birth_death_scale + 1ULL);
    for (std::uint64_t i = 0; i < arrivals; ++i)
        next.members.push_back(detail::spawn_member(config, next.next_id++, rng));

    ++next.tick;
    return next;
}

// Uniform sample of n members' (tuple, noisy label) pairs, without
// replacement; collected_at records the population tick.
inline Oracle sample_oracle(const PopulationConfig& config, const PopulationState& state,
                            std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ParameterError("oracle sample size must be >= 1");
    if (n > state.members.size())
        throw ParameterError("cannot sample " + std::to_string(n) + " members from " +
                             std::to_string(state.members.size()));
    auto rng = make_rng(seed);
    std::vector<std::size_t> idx(state.members.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<Observation> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, idx.size() - i));
        std::swap(idx[i], idx[j]);
        const auto& m = state.members[idx[i]];
        records.push_back({member_values(config.schema, m), m.noisy_label});
    }
    return Oracle(config.schema, std::move(records), "population-sim", state.tick);
}

// Fraction of members where the classifier disagrees with the latent concept
// (not with the noisy labels).
inline double disagreement(const SignSchema& schema, const TrainedClassifier& clf,
                           const PopulationState& state) {
    if (state.members.empty()) throw ParameterError("population is empty");
    std::size_t wrong = 0;
    for (const auto& m : state.members) {
        if (predict(clf, member_values(schema, m)).label != m.concept_label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(state.members.size());
}

// Fraction of members where the classifier disagrees with the recorded
// (noisy) labels; floors at noise_rate for any classifier.
inline double noisy_error(const SignSchema& schema, const TrainedClassifier& clf,
                          const PopulationState& state) {
    if (state.members.empty()) throw ParameterError("population is empty");
    std::size_t wrong = 0;
    for (const auto& m : state.members) {
        if (predict(clf, member_values(schema, m)).label != m.noisy_label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(state.members.size());
}

}  // namespace driftlearn
