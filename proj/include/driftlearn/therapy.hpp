#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftlearn/domain.hpp"
#include "driftlearn/drift.hpp"
#include "driftlearn/errors.hpp"
#include "driftlearn/kernel.hpp"
#include "driftlearn/oracle_io.hpp"
#include "driftlearn/textio.hpp"

namespace driftlearn {

// A candidate therapy plan and its historical results. Effectiveness is
// normalized to [0, 1]. Decision points inside a plan are opaque text.
struct TherapyPlan {
    std::string id;
    std::string description;
    std::vector<EffectivenessSample> outcomes;
};

struct RankedPlan {
    std::string id;
    double predicted = 0.0;
};

struct PlanRanking {
    std::vector<RankedPlan> entries;       // descending predicted effectiveness
    std::vector<std::string> excluded;     // unrankable plans (no outcomes)
    bool tie = false;                      // two entries within 1e-12
};

namespace detail {

inline void validate_plan(const SignSchema& schema, const TherapyPlan& plan) {
    for (const auto& o : plan.outcomes) {
        if (o.values.size() != schema.size())
            throw DimensionError("plan '" + plan.id + "' outcome tuple has wrong length");
        if (!(o.effectiveness >= 0.0) || !(o.effectiveness <= 1.0))
            throw ParameterError("plan '" + plan.id + "' effectiveness outside [0, 1]");
    }
}

inline void sort_ranking(std::vector<RankedPlan>& entries) {
    std::sort(entries.begin(), entries.end(), [](const RankedPlan& a, const RankedPlan& b) {
        if (a.predicted != b.predicted) return a.predicted > b.predicted;
        return a.id < b.id;
    });
}

}  // namespace detail

// Each plan's regressor predicts effectiveness at the patient's tuple; plans
// are sorted descending, ties broken by id and flagged.
inline PlanRanking rank_plans(const SignSchema& schema, const std::vector<TherapyPlan>& plans,
                              std::span<const double> patient, const KernelSpec& spec,
                              double reg) {
    if (plans.empty()) throw ParameterError("no therapy plans given");
    if (patient.size() != schema.size())
        throw DimensionError("patient tuple has wrong length");
    PlanRanking ranking;
    for (const auto& plan : plans) {
        if (plan.id.empty()) throw ParameterError("therapy plans need nonempty ids");
        if (plan.outcomes.empty()) {
            ranking.excluded.push_back(plan.id);
            continue;
        }
        detail::validate_plan(schema, plan);
        const auto model = train_regressor(schema, plan.outcomes, spec, reg);
        ranking.entries.push_back({plan.id, predict_value(model, patient)});
    }
    if (ranking.entries.empty()) throw ParameterError("no rankable therapy plans");
    detail::sort_ranking(ranking.entries);
    for (std::size_t i = 1; i < ranking.entries.size(); ++i) {
        if (std::abs(ranking.entries[i - 1].predicted - ranking.entries[i].predicted) <= 1e-12)
            ranking.tie = true;
    }
    return ranking;
}

enum class AdviceStatus : std::uint8_t { unanimous, abstain };

struct TherapyAdvice {
    PlanRanking ranking;  // ranking on the unperturbed outcomes
    AdviceStatus status = AdviceStatus::abstain;
    std::size_t worlds_evaluated = 0;
    bool sampled = false;
    // Per-world top plan counts, keyed by plan id; counts sum to
    // worlds_evaluated.
    std::vector<std::pair<std::string, std::size_t>> top_histogram;
};

struct AdviseOptions {
    double reg = 0.01;
    std::uint64_t seed = 0;
    std::uint64_t budget = kDefaultWorldBudget;
    bool allow_sampling = false;
    // Selecting the wrong therapy plan is symmetrically harmful, so only the
    // cautious strategy is accepted here.
    FusionStrategy strategy = FusionStrategy::cautious;
};

// Possible worlds for therapy advice perturb the plans' historical outcome
// tuples, one outcome record per world, mirroring the diagnosis-side oracle
// perturbation: |W| = (total outcomes) * 2^|S|.
inline TherapyAdvice advise(const SignSchema& schema, const std::vector<TherapyPlan>& plans,
                            std::span<const double> patient, const KernelSpec& spec,
                            const AdviseOptions& opt) {
    if (opt.strategy != FusionStrategy::cautious)
        throw ConfigError(std::string("therapy advice rejects the ") +
                          strategy_name(opt.strategy) + " strategy; only cautious is sound");

    TherapyAdvice advice;
    advice.ranking = rank_plans(schema, plans, patient, spec, opt.reg);

    // Rankable plans with their flattened outcome offsets.
    struct Entry {
        const TherapyPlan* plan;
        std::size_t outcome_index;
    };
    std::vector<Entry> flat;
    std::vector<const TherapyPlan*> rankable;
    for (const auto& plan : plans) {
        if (plan.outcomes.empty()) continue;
        rankable.push_back(&plan);
        for (std::size_t j = 0; j < plan.outcomes.size(); ++j) flat.push_back({&plan, j});
    }

    const std::size_t k = schema.size();
    if (k >= 64) throw OverflowError("2^|S| exceeds 64 bits");
    const std::uint64_t corners = std::uint64_t{1} << k;
    std::uint64_t total = 0;
    if (__builtin_mul_overflow(static_cast<std::uint64_t>(flat.size()), corners, &total))
        throw OverflowError("world count exceeds 64 bits");

    std::vector<std::uint64_t> ordinals;
    if (total <= opt.budget) {
        ordinals.resize(total);
        for (std::uint64_t i = 0; i < total; ++i) ordinals[i] = i;
    } else if (opt.allow_sampling) {
        auto rng = make_rng(sub_seed(opt.seed, "therapy-world-sample"));
        std::unordered_set<std::uint64_t> chosen;
        for (std::uint64_t j = total - opt.budget; j < total; ++j) {
            const std::uint64_t t = uniform_below(rng, j + 1);
            if (!chosen.insert(t).second) chosen.insert(j);
        }
        ordinals.assign(chosen.begin(), chosen.end());
        std::sort(ordinals.begin(), ordinals.end());
        advice.sampled = true;
    } else {
        throw BudgetError("therapy world count " + std::to_string(total) + " exceeds budget " +
                          std::to_string(opt.budget) + "; enable sampling to evaluate a subset");
    }

    // Base predictions per rankable plan, then re-predict only the plan whose
    // outcome record the world perturbs.
    std::map<const TherapyPlan*, double> base_pred;
    for (const auto& e : advice.ranking.entries) {
        for (const auto* p : rankable)
            if (p->id == e.id) base_pred[p] = e.predicted;
    }

    const auto top_of = [&](const TherapyPlan* changed, double changed_pred) {
        const TherapyPlan* best = nullptr;
        double best_pred = 0.0;
        for (const auto* p : rankable) {
            const double pred = p == changed ? changed_pred : base_pred[p];
            if (!best || pred > best_pred || (pred == best_pred && p->id < best->id)) {
                best = p;
                best_pred = pred;
            }
        }
        return best;
    };

    std::map<std::string, std::size_t> histogram;
    for (const std::uint64_t ord : ordinals) {
        const auto& entry = flat[static_cast<std::size_t>(ord / corners)];
        const std::uint64_t corner = ord % corners;

        auto outcomes = entry.plan->outcomes;
        auto& tuple = outcomes[entry.outcome_index].values;
        for (std::size_t s = 0; s < k; ++s) {
            const auto& def = schema.sign(s);
            const auto iv = sign_interval(tuple[s], def.sigma, def.values);
            tuple[s] = ((corner >> (k - 1 - s)) & 1ULL) ? iv.high : iv.low;
        }
        const auto model = train_regressor(schema, outcomes, spec, opt.reg);
        const double pred = predict_value(model, patient);
        ++histogram[top_of(entry.plan, pred)->id];
    }

    advice.worlds_evaluated = ordinals.size();
    advice.top_histogram.assign(histogram.begin(), histogram.end());
    advice.status = histogram.size() == 1 ? AdviceStatus::unanimous : AdviceStatus::abstain;
    return advice;
}

// Plan file format: the oracle schema header on line 1, then per plan a
// "plan <id>" line, an optional "desc <text>" line, and one outcome per line
// "v1,...,vk,effectiveness".
inline std::string format_plans(const SignSchema& schema,
                                const std::vector<TherapyPlan>& plans) {
    std::string out = format_schema_header(schema);
    out += '\n';
    for (const auto& plan : plans) {
        out += "plan " + plan.id + '\n';
        if (!plan.description.empty()) out += "desc " + plan.description + '\n';
        for (const auto& o : plan.outcomes) {
            for (double v : o.values) {
                out += fmt_g17(v);
                out += ',';
            }
            out += fmt_g17(o.effectiveness);
            out += '\n';
        }
    }
    return out;
}

struct PlanFile {
    SignSchema schema;
    std::vector<TherapyPlan> plans;
};

inline PlanFile parse_plans(const std::string& text) {
    PlanFile file;
    bool have_schema = false;
    std::size_t line_no = 0;
    for (const auto& raw_line : textio::split(text, '\n')) {
        ++line_no;
        const std::string line = textio::trim(raw_line);
        if (line.empty()) continue;
        const std::string ctx = "plans line " + std::to_string(line_no);
        if (!have_schema) {
            file.schema = parse_schema_header(line);
            have_schema = true;
            continue;
        }
        if (line.rfind("plan ", 0) == 0) {
            file.plans.push_back({textio::trim(line.substr(5)), "", {}});
            continue;
        }
        if (file.plans.empty()) throw IoError(ctx + ": outcome before any 'plan' line");
        if (line.rfind("desc ", 0) == 0) {
            file.plans.back().description = textio::trim(line.substr(5));
            continue;
        }
        const auto fields = textio::split(line, ',');
        if (fields.size() != file.schema.size() + 1)
            throw IoError(ctx + ": expected " + std::to_string(file.schema.size()) +
                          " values plus effectiveness");
        EffectivenessSample sample;
        for (std::size_t i = 0; i < file.schema.size(); ++i)
            sample.values.push_back(textio::parse_double(fields[i], ctx));
        sample.effectiveness = textio::parse_double(fields.back(), ctx);
        if (!(sample.effectiveness >= 0.0) || !(sample.effectiveness <= 1.0))
            throw IoError(ctx + ": effectiveness outside [0, 1]");
        file.plans.back().outcomes.push_back(std::move(sample));
    }
    if (!have_schema) throw IoError("plan file has no schema header");
    if (file.plans.empty()) throw IoError("plan file has no plans");
    return file;
}

inline PlanFile read_plans_file(const std::string& path) {
    return parse_plans(textio::read_file(path));
}

inline void write_plans_file(const SignSchema& schema, const std::vector<TherapyPlan>& plans,
                             const std::string& path) {
    textio::write_file(path, format_plans(schema, plans));
}

}  // namespace driftlearn
