#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "driftlearn/domain.hpp"
#include "driftlearn/errors.hpp"
#include "driftlearn/kernel.hpp"
#include "driftlearn/parallel.hpp"
#include "driftlearn/rng.hpp"

namespace driftlearn {

// Between the time an oracle is collected and the time it is used, every
// observed sign value may have drifted. Each value v is widened to the
// interval [v - 2*sigma, v + 2*sigma], clamped to the sign's admissible
// range, with both endpoints snapped onto admissible values.

struct DriftInterval {
    double low = 0.0;
    double high = 0.0;
    double center = 0.0;  // the observed value
};

namespace detail {

// Nearest admissible value; equidistant ties resolve toward `center` so a
// zero-width interval stays exactly on the observed value.
inline double snap_to_admissible(double x, std::span<const double> admissible, double center) {
    const auto it = std::lower_bound(admissible.begin(), admissible.end(), x);
    if (it == admissible.begin()) return admissible.front();
    if (it == admissible.end()) return admissible.back();
    const double above = *it;
    const double below = *(it - 1);
    const double d_above = above - x;
    const double d_below = x - below;
    if (d_above < d_below) return above;
    if (d_below < d_above) return below;
    return std::abs(above - center) < std::abs(below - center) ? above : below;
}

}  // namespace detail

inline DriftInterval sign_interval(double value, double sigma,
                                   std::span<const double> admissible) {
    if (admissible.empty()) throw SchemaError("sign interval over an empty admissible set");
    if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
    if (!std::binary_search(admissible.begin(), admissible.end(), value))
        throw ParameterError("observed value is not admissible");
    double lo = value - 2.0 * sigma;
    double hi = value + 2.0 * sigma;
    lo = std::max(lo, admissible.front());
    hi = std::min(hi, admissible.back());
    return {detail::snap_to_admissible(lo, admissible, value),
            detail::snap_to_admissible(hi, admissible, value), value};
}

// One possible world: record `record_index` of the oracle replaced by a
// corner of its drift box. Bit (|S|-1-s) of `corner` picks the high endpoint
// for sign s, so ascending corner values enumerate bit vectors
// (b_0, ..., b_{|S|-1}) lexicographically.
struct WorldIndex {
    std::size_t record_index = 0;
    std::uint64_t corner = 0;

    friend bool operator==(const WorldIndex&, const WorldIndex&) = default;
};

inline bool corner_high(const WorldIndex& w, std::size_t sign, std::size_t num_signs) {
    return (w.corner >> (num_signs - 1 - sign)) & 1ULL;
}

inline constexpr std::uint64_t kDefaultWorldBudget = 65536;

// |W| = |P| * 2^|S|, overflow-checked.
inline std::uint64_t world_count(const Oracle& oracle) {
    const std::size_t k = oracle.schema().size();
    if (k >= 64) throw OverflowError("2^|S| exceeds 64 bits");
    std::uint64_t total = 0;
    if (__builtin_mul_overflow(static_cast<std::uint64_t>(oracle.size()),
                               std::uint64_t{1} << k, &total))
        throw OverflowError("world count exceeds 64 bits");
    return total;
}

inline std::vector<double> perturbed_record_values(const Oracle& oracle, const WorldIndex& w) {
    const auto& schema = oracle.schema();
    const auto& rec = oracle.records().at(w.record_index);
    std::vector<double> values(schema.size());
    for (std::size_t s = 0; s < schema.size(); ++s) {
        const auto& def = schema.sign(s);
        const auto iv = sign_interval(rec.values[s], def.sigma, def.values);
        values[s] = corner_high(w, s, schema.size()) ? iv.high : iv.low;
    }
    return values;
}

// The world's oracle: record `w.record_index` perturbed, everything else
// field-exact, labels unchanged.
inline Oracle materialize_world(const Oracle& oracle, const WorldIndex& w) {
    const std::size_t k = oracle.schema().size();
    if (w.record_index >= oracle.size() || w.corner >= (std::uint64_t{1} << k))
        throw ParameterError("world index out of range");
    auto records = oracle.records();
    records[w.record_index].values = perturbed_record_values(oracle, w);
    return Oracle(oracle.schema(), std::move(records), oracle.provenance(),
                  oracle.collected_at());
}

namespace detail {

inline WorldIndex world_from_ordinal(std::uint64_t ordinal, std::size_t num_signs) {
    const std::uint64_t corners = std::uint64_t{1} << num_signs;
    return {static_cast<std::size_t>(ordinal / corners), ordinal % corners};
}

}  // namespace detail

// All worlds in lexicographic (record_index, corner) order.
inline std::vector<WorldIndex> all_world_indices(const Oracle& oracle,
                                                 std::uint64_t budget = kDefaultWorldBudget) {
    const std::uint64_t total = world_count(oracle);
    if (total > budget)
        throw BudgetError("world count " + std::to_string(total) + " exceeds budget " +
                          std::to_string(budget) + "; draw a subset with sample_worlds");
    std::vector<WorldIndex> out;
    out.reserve(total);
    for (std::uint64_t ord = 0; ord < total; ++ord)
        out.push_back(detail::world_from_ordinal(ord, oracle.schema().size()));
    return out;
}

inline std::vector<std::pair<WorldIndex, Oracle>> enumerate_worlds(
    const Oracle& oracle, std::uint64_t budget = kDefaultWorldBudget) {
    std::vector<std::pair<WorldIndex, Oracle>> out;
    for (const auto& w : all_world_indices(oracle, budget))
        out.emplace_back(w, materialize_world(oracle, w));
    return out;
}

// k distinct worlds drawn uniformly without replacement (Floyd's algorithm),
// returned in enumeration order; deterministic per seed.
inline std::vector<WorldIndex> sample_world_indices(const Oracle& oracle, std::uint64_t k,
                                                    std::uint64_t seed) {
    const std::uint64_t total = world_count(oracle);
    if (k < 1) throw ParameterError("sample size must be >= 1");
    if (k > total)
        throw ParameterError("cannot sample " + std::to_string(k) + " worlds from " +
                             std::to_string(total));
    auto rng = make_rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k) * 2);
    for (std::uint64_t j = total - k; j < total; ++j) {
        const std::uint64_t t = uniform_below(rng, j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> ordinals(chosen.begin(), chosen.end());
    std::sort(ordinals.begin(), ordinals.end());
    std::vector<WorldIndex> out;
    out.reserve(ordinals.size());
    for (const auto ord : ordinals)
        out.push_back(detail::world_from_ordinal(ord, oracle.schema().size()));
    return out;
}

inline std::vector<std::pair<WorldIndex, Oracle>> sample_worlds(const Oracle& oracle,
                                                                std::uint64_t k,
                                                                std::uint64_t seed) {
    std::vector<std::pair<WorldIndex, Oracle>> out;
    for (const auto& w : sample_world_indices(oracle, k, seed))
        out.emplace_back(w, materialize_world(oracle, w));
    return out;
}

// Seed for one world's training run, derived from the master seed and the
// training-set content. Worlds whose records coincide (all sigma zero, or
// saturated intervals) train bit-identically.
inline std::uint64_t training_content_seed(std::uint64_t master_seed,
                                           const std::vector<Observation>& records) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto mixin = [&h](std::uint64_t word) {
        h ^= word;
        h *= 0x100000001b3ULL;
    };
    for (const auto& rec : records) {
        for (const double v : rec.values) mixin(std::bit_cast<std::uint64_t>(v));
        mixin(rec.label == Label::positive ? 1u : 0u);
    }
    return mix64(master_seed ^ h);
}

struct EnsembleOptions {
    double reg = 0.01;
    std::size_t epochs = 50;
    std::uint64_t seed = 0;
    std::uint64_t budget = kDefaultWorldBudget;
    bool allow_sampling = false;  // beyond the budget, sampling must be explicit
    std::size_t jobs = 1;
};

struct WorldEnsemble {
    std::vector<WorldIndex> worlds;  // enumeration order
    std::vector<TrainedClassifier> classifiers;
    bool sampled = false;
};

inline WorldEnsemble train_ensemble(const Oracle& oracle, const KernelSpec& spec,
                                    const EnsembleOptions& opt) {
    WorldEnsemble ensemble;
    const std::uint64_t total = world_count(oracle);
    if (total <= opt.budget) {
        ensemble.worlds = all_world_indices(oracle, opt.budget);
    } else if (opt.allow_sampling) {
        ensemble.worlds =
            sample_world_indices(oracle, opt.budget, sub_seed(opt.seed, "world-sample"));
        ensemble.sampled = true;
    } else {
        throw BudgetError("world count " + std::to_string(total) + " exceeds budget " +
                          std::to_string(opt.budget) +
                          "; enable sampling to train on a subset");
    }
    ensemble.classifiers.resize(ensemble.worlds.size());
    parallel_for(ensemble.worlds.size(), opt.jobs, [&](std::size_t i) {
        const Oracle world = materialize_world(oracle, ensemble.worlds[i]);
        ensemble.classifiers[i] = train_classifier(
            world, spec, opt.reg, opt.epochs, training_content_seed(opt.seed, world.records()));
    });
    return ensemble;
}

enum class FusionStrategy : std::uint8_t { cautious, asymmetric, voting };

inline const char* strategy_name(FusionStrategy s) {
    switch (s) {
        case FusionStrategy::cautious: return "cautious";
        case FusionStrategy::asymmetric: return "asymmetric";
        case FusionStrategy::voting: return "voting";
    }
    return "?";
}

inline FusionStrategy parse_strategy(const std::string& name) {
    if (name == "cautious") return FusionStrategy::cautious;
    if (name == "asymmetric") return FusionStrategy::asymmetric;
    if (name == "voting") return FusionStrategy::voting;
    throw ConfigError("unknown strategy '" + name + "'");
}

enum class DecisionOutcome : std::uint8_t { negative, positive, abstain };

struct EnsembleDecision {
    DecisionOutcome label = DecisionOutcome::abstain;
    double confidence = 0.0;
    std::size_t count_pos = 0;
    std::size_t count_neg = 0;
    FusionStrategy strategy = FusionStrategy::cautious;
    std::size_t worlds_evaluated = 0;
};

// cautious:   unanimous label or abstain (confidence = majority share)
// asymmetric: the alarm label wins if any world raises it
// voting:     majority label, confidence = winning proportion; ties abstain
inline EnsembleDecision fuse(std::span<const Label> predictions, FusionStrategy strategy,
                             Label alarm = Label::positive) {
    if (predictions.empty()) throw ParameterError("cannot fuse an empty prediction list");
    EnsembleDecision d;
    d.strategy = strategy;
    d.worlds_evaluated = predictions.size();
    for (const Label l : predictions) (l == Label::positive ? d.count_pos : d.count_neg)++;

    const std::size_t total = predictions.size();
    const std::size_t majority = std::max(d.count_pos, d.count_neg);
    const auto outcome_of = [](Label l) {
        return l == Label::positive ? DecisionOutcome::positive : DecisionOutcome::negative;
    };

    switch (strategy) {
        case FusionStrategy::cautious:
            if (d.count_pos == total || d.count_neg == total) {
                d.label = outcome_of(d.count_pos == total ? Label::positive : Label::negative);
                d.confidence = 1.0;
            } else {
                d.label = DecisionOutcome::abstain;
                d.confidence = static_cast<double>(majority) / static_cast<double>(total);
            }
            break;
        case FusionStrategy::asymmetric: {
            const std::size_t alarms = alarm == Label::positive ? d.count_pos : d.count_neg;
            const Label chosen = alarms > 0 ? alarm : opposite(alarm);
            d.label = outcome_of(chosen);
            const std::size_t support = chosen == Label::positive ? d.count_pos : d.count_neg;
            d.confidence = static_cast<double>(support) / static_cast<double>(total);
            break;
        }
        case FusionStrategy::voting:
            if (d.count_pos == d.count_neg) {
                d.label = DecisionOutcome::abstain;
                d.confidence = 0.5;
            } else {
                d.label = outcome_of(d.count_pos > d.count_neg ? Label::positive
                                                               : Label::negative);
                d.confidence = static_cast<double>(majority) / static_cast<double>(total);
            }
            break;
    }
    return d;
}

// Evaluates every world classifier on one query. World classifiers share all
// support points with the base oracle except the perturbed record, so the
// base kernel column is computed once per query; per-world decision values
// then follow the exact accumulation order of decision_value().
class EnsemblePredictor {
public:
    EnsemblePredictor(const Oracle& base, const WorldEnsemble& ensemble)
        : ensemble_(&ensemble), num_signs_(base.schema().size()) {
        normalizer_ = Normalizer::from_schema(base.schema());
        base_points_ = detail::normalize_tuples(base.schema(), base.records());
        perturbed_points_.reserve(ensemble.worlds.size());
        for (const auto& w : ensemble.worlds)
            perturbed_points_.push_back(normalizer_.apply(perturbed_record_values(base, w)));
    }

    std::vector<Label> predict_worlds(std::span<const double> raw) const {
        const auto x = normalizer_.apply(raw);
        const std::size_t m = base_points_.size();
        std::vector<double> base_k(m);

        std::vector<Label> labels(ensemble_->worlds.size());
        bool base_k_ready = false;
        for (std::size_t wi = 0; wi < ensemble_->worlds.size(); ++wi) {
            const auto& clf = ensemble_->classifiers[wi];
            if (clf.support_points.empty()) {  // constant classifier
                labels[wi] = clf.bias > 0.0 ? Label::positive : Label::negative;
                continue;
            }
            if (!base_k_ready) {
                for (std::size_t j = 0; j < m; ++j)
                    base_k[j] = kernel_eval(clf.kernel, base_points_[j], x);
                base_k_ready = true;
            }
            const std::size_t pi = ensemble_->worlds[wi].record_index;
            const double pert_k = kernel_eval(clf.kernel, perturbed_points_[wi], x);
            double v = clf.bias;
            for (std::size_t j = 0; j < m; ++j)
                v += clf.coefficients[j] * (j == pi ? pert_k : base_k[j]);
            labels[wi] = v > 0.0 ? Label::positive : Label::negative;
        }
        return labels;
    }

    EnsembleDecision decide(std::span<const double> raw, FusionStrategy strategy,
                            Label alarm = Label::positive) const {
        const auto labels = predict_worlds(raw);
        return fuse(labels, strategy, alarm);
    }

private:
    const WorldEnsemble* ensemble_;
    std::size_t num_signs_;
    Normalizer normalizer_;
    std::vector<std::vector<double>> base_points_;
    std::vector<std::vector<double>> perturbed_points_;  // one per world
};

}  // namespace driftlearn
