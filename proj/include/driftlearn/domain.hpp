#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftlearn/errors.hpp"

namespace driftlearn {

// Binary diagnosis. positive = confirmed disease, negative = refuted.
enum class Label : std::uint8_t { negative = 0, positive = 1 };

inline Label opposite(Label l) {
    return l == Label::positive ? Label::negative : Label::positive;
}

inline char label_token(Label l) { return l == Label::positive ? '+' : '-'; }

// One observable sign: a finite ordered set of admissible numeric codes plus
// a drift scale sigma in the same units as the codes. Categorical signs are
// coded onto an ordered value line; the mapping is documentation, not data.
struct SignDef {
    std::string name;
    std::vector<double> values;  // distinct, ascending
    double sigma = 0.0;
};

class SignSchema {
public:
    SignSchema() = default;

    explicit SignSchema(std::vector<SignDef> signs) : signs_(std::move(signs)) {
        if (signs_.empty()) throw SchemaError("schema must contain at least one sign");
        for (const auto& s : signs_) {
            if (s.name.empty()) throw SchemaError("sign names must be nonempty");
            if (s.values.empty())
                throw SchemaError("sign '" + s.name + "' has no admissible values");
            for (double v : s.values) {
                if (!std::isfinite(v))
                    throw SchemaError("sign '" + s.name + "' has a non-finite value");
            }
            if (!std::is_sorted(s.values.begin(), s.values.end()))
                throw SchemaError("sign '" + s.name + "' values must be ascending");
            if (std::adjacent_find(s.values.begin(), s.values.end()) != s.values.end())
                throw SchemaError("sign '" + s.name + "' values must be distinct");
            if (!std::isfinite(s.sigma) || s.sigma < 0.0)
                throw SchemaError("sign '" + s.name + "' sigma must be >= 0");
        }
        for (std::size_t i = 0; i < signs_.size(); ++i) {
            for (std::size_t j = i + 1; j < signs_.size(); ++j) {
                if (signs_[i].name == signs_[j].name)
                    throw SchemaError("duplicate sign name '" + signs_[i].name + "'");
            }
        }
    }

    const std::vector<SignDef>& signs() const noexcept { return signs_; }
    const SignDef& sign(std::size_t i) const { return signs_.at(i); }
    std::size_t size() const noexcept { return signs_.size(); }
    bool empty() const noexcept { return signs_.empty(); }

    bool is_admissible(std::size_t sign_index, double value) const {
        const auto& vals = signs_.at(sign_index).values;
        return std::binary_search(vals.begin(), vals.end(), value);
    }

    // Index of `value` within the sign's admissible set, or npos.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t value_index(std::size_t sign_index, double value) const {
        const auto& vals = signs_.at(sign_index).values;
        const auto it = std::lower_bound(vals.begin(), vals.end(), value);
        if (it == vals.end() || *it != value) return npos;
        return static_cast<std::size_t>(it - vals.begin());
    }

private:
    std::vector<SignDef> signs_;
};

// |V| = prod n_s. Overflow is an error, never a wrapped value.
inline std::uint64_t valued_space_cardinality(const SignSchema& schema) {
    if (schema.empty()) throw SchemaError("cannot size the valued space of an empty schema");
    std::uint64_t card = 1;
    for (const auto& s : schema.signs()) {
        const auto n = static_cast<std::uint64_t>(s.values.size());
        if (__builtin_mul_overflow(card, n, &card))
            throw OverflowError("valued-signs space cardinality exceeds 64 bits");
    }
    return card;
}

// ln|V| = sum ln n_s; safe for spaces far beyond 64-bit cardinality.
inline double log_valued_space_cardinality(const SignSchema& schema) {
    if (schema.empty()) throw SchemaError("cannot size the valued space of an empty schema");
    double acc = 0.0;
    for (const auto& s : schema.signs()) acc += std::log(static_cast<double>(s.values.size()));
    return acc;
}

struct Observation {
    std::vector<double> values;  // one per schema sign
    Label label = Label::negative;
};

// A labelled sample drawn from a reference population. Duplicate sign tuples
// with conflicting labels are permitted: oracles may be partially
// inconsistent, and validate_oracle measures how much.
class Oracle {
public:
    Oracle(SignSchema schema, std::vector<Observation> records,
           std::string provenance = "", std::int64_t collected_at = 0)
        : schema_(std::move(schema)),
          records_(std::move(records)),
          provenance_(std::move(provenance)),
          collected_at_(collected_at) {
        if (schema_.empty()) throw SchemaError("oracle requires a nonempty schema");
        if (records_.empty()) throw ParameterError("oracle must contain at least one record");
        for (const auto& r : records_) {
            if (r.values.size() != schema_.size())
                throw DimensionError("record has " + std::to_string(r.values.size()) +
                                     " values, schema has " + std::to_string(schema_.size()));
        }
    }

    const SignSchema& schema() const noexcept { return schema_; }
    const std::vector<Observation>& records() const noexcept { return records_; }
    const std::string& provenance() const noexcept { return provenance_; }
    std::int64_t collected_at() const noexcept { return collected_at_; }
    std::size_t size() const noexcept { return records_.size(); }

private:
    SignSchema schema_;
    std::vector<Observation> records_;
    std::string provenance_;
    std::int64_t collected_at_;
};

struct AdmissibilityViolation {
    std::size_t record_index = 0;
    std::size_t sign_index = 0;
    double value = 0.0;
};

struct ValidationReport {
    std::vector<AdmissibilityViolation> violations;
    std::size_t inconsistent_records = 0;
    // Fraction of records whose sign tuple appears elsewhere with the
    // opposite label. Always in [0, 1].
    double inconsistency_rate = 0.0;

    bool clean() const noexcept { return violations.empty() && inconsistent_records == 0; }
};

inline ValidationReport validate_oracle(const Oracle& oracle) {
    ValidationReport report;
    const auto& schema = oracle.schema();
    for (std::size_t i = 0; i < oracle.records().size(); ++i) {
        const auto& rec = oracle.records()[i];
        for (std::size_t s = 0; s < schema.size(); ++s) {
            if (!schema.is_admissible(s, rec.values[s]))
                report.violations.push_back({i, s, rec.values[s]});
        }
    }

    std::map<std::vector<double>, std::pair<std::size_t, std::size_t>> groups;
    for (const auto& rec : oracle.records()) {
        auto& g = groups[rec.values];
        if (rec.label == Label::positive) ++g.first;
        else ++g.second;
    }
    for (const auto& rec : oracle.records()) {
        const auto& g = groups[rec.values];
        if (g.first > 0 && g.second > 0) ++report.inconsistent_records;
    }
    report.inconsistency_rate =
        static_cast<double>(report.inconsistent_records) / static_cast<double>(oracle.size());
    return report;
}

// Affine per-sign map onto [0, 1] over the admissible range. Kernel scales
// would otherwise depend on the arbitrary numeric coding of signs.
// Single-valued signs map to 0.
struct Normalizer {
    std::vector<double> mins;
    std::vector<double> ranges;

    static Normalizer from_schema(const SignSchema& schema) {
        Normalizer n;
        n.mins.reserve(schema.size());
        n.ranges.reserve(schema.size());
        for (const auto& s : schema.signs()) {
            n.mins.push_back(s.values.front());
            n.ranges.push_back(s.values.back() - s.values.front());
        }
        return n;
    }

    std::size_t size() const noexcept { return mins.size(); }

    std::vector<double> apply(std::span<const double> raw) const {
        if (raw.size() != mins.size())
            throw DimensionError("tuple has " + std::to_string(raw.size()) +
                                 " values, normalizer expects " + std::to_string(mins.size()));
        std::vector<double> out(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i)
            out[i] = ranges[i] > 0.0 ? (raw[i] - mins[i]) / ranges[i] : 0.0;
        return out;
    }
};

}  // namespace driftlearn
