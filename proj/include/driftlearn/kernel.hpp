#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftlearn/domain.hpp"
#include "driftlearn/errors.hpp"
#include "driftlearn/rng.hpp"
#include "driftlearn/textio.hpp"

namespace driftlearn {

enum class KernelFamily : std::uint8_t { linear, polynomial, gaussian, sigmoid };

inline const char* family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::linear: return "linear";
        case KernelFamily::polynomial: return "polynomial";
        case KernelFamily::gaussian: return "gaussian";
        case KernelFamily::sigmoid: return "sigmoid";
    }
    return "?";
}

// Kernel family plus its parameters. Parameters exist exactly where the
// family requires them; constructed through the named factories.
class KernelSpec {
public:
    static KernelSpec linear() { return KernelSpec(KernelFamily::linear); }

    static KernelSpec polynomial(int degree, double offset) {
        if (degree < 1) throw ParameterError("polynomial degree must be >= 1");
        if (!std::isfinite(offset)) throw ParameterError("polynomial offset must be finite");
        KernelSpec k(KernelFamily::polynomial);
        k.degree_ = degree;
        k.offset_ = offset;
        return k;
    }

    static KernelSpec gaussian(double scale) {
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw ParameterError("gaussian scale must be > 0");
        KernelSpec k(KernelFamily::gaussian);
        k.scale_ = scale;
        return k;
    }

    static KernelSpec sigmoid(double scale, double offset) {
        if (!std::isfinite(scale) || !std::isfinite(offset))
            throw ParameterError("sigmoid parameters must be finite");
        KernelSpec k(KernelFamily::sigmoid);
        k.scale_ = scale;
        k.offset_ = offset;
        return k;
    }

    KernelFamily family() const noexcept { return family_; }
    int degree() const { return require(degree_, "degree"); }
    double offset() const { return require(offset_, "offset"); }
    double scale() const { return require(scale_, "scale"); }

    std::string to_string() const {
        switch (family_) {
            case KernelFamily::linear: return "linear";
            case KernelFamily::polynomial:
                return "polynomial degree=" + std::to_string(*degree_) +
                       " offset=" + fmt_g17(*offset_);
            case KernelFamily::gaussian: return "gaussian scale=" + fmt_g17(*scale_);
            case KernelFamily::sigmoid:
                return "sigmoid scale=" + fmt_g17(*scale_) + " offset=" + fmt_g17(*offset_);
        }
        return "?";
    }

    // Accepts both the serialized form above and the compact CLI form
    // "gaussian:0.25", "polynomial:3:1", "sigmoid:1:0", "linear".
    static KernelSpec parse(const std::string& text);

private:
    explicit KernelSpec(KernelFamily f) : family_(f) {}

    template <typename T>
    static T require(const std::optional<T>& v, const char* what) {
        if (!v) throw ParameterError(std::string("kernel has no ") + what);
        return *v;
    }

    KernelFamily family_;
    std::optional<int> degree_;
    std::optional<double> offset_;
    std::optional<double> scale_;
};

namespace detail {

inline double dot(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

// Integer power by repeated multiplication keeps results deterministic
// across libm implementations.
inline double int_pow(double base, int exponent) {
    double acc = 1.0;
    for (int i = 0; i < exponent; ++i) acc *= base;
    return acc;
}

}  // namespace detail

// Symmetric in x and y, bit-exactly: every route below commutes at the
// floating-point level.
inline double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                          std::span<const double> y) {
    if (x.size() != y.size())
        throw DimensionError("kernel arguments have lengths " + std::to_string(x.size()) +
                             " and " + std::to_string(y.size()));
    switch (spec.family()) {
        case KernelFamily::linear:
            return detail::dot(x, y);
        case KernelFamily::polynomial:
            return detail::int_pow(detail::dot(x, y) + spec.offset(), spec.degree());
        case KernelFamily::gaussian: {
            const double s = spec.scale();
            return std::exp(-detail::squared_distance(x, y) / (2.0 * s * s));
        }
        case KernelFamily::sigmoid:
            return std::tanh(spec.scale() * detail::dot(x, y) + spec.offset());
    }
    throw ParameterError("unknown kernel family");
}

inline KernelSpec KernelSpec::parse(const std::string& text) {
    auto fields = textio::split(textio::trim(text), ':');
    std::string name;
    std::vector<double> args;
    if (fields.size() > 1 || text.find(' ') == std::string::npos) {
        name = textio::trim(fields[0]);
        for (std::size_t i = 1; i < fields.size(); ++i)
            args.push_back(textio::parse_double(fields[i], "kernel parameter"));
    } else {
        // serialized form: "family key=value ..."
        auto words = textio::split(textio::trim(text), ' ');
        name = words[0];
        for (std::size_t i = 1; i < words.size(); ++i) {
            const auto kv = textio::split(words[i], '=');
            if (kv.size() != 2) throw IoError("bad kernel parameter '" + words[i] + "'");
            args.push_back(textio::parse_double(kv[1], "kernel parameter"));
        }
    }
    if (name == "linear") {
        if (!args.empty()) throw ParameterError("linear kernel takes no parameters");
        return linear();
    }
    if (name == "polynomial" || name == "poly") {
        if (args.size() != 2) throw ParameterError("polynomial kernel needs degree and offset");
        return polynomial(static_cast<int>(args[0]), args[1]);
    }
    if (name == "gaussian") {
        if (args.size() != 1) throw ParameterError("gaussian kernel needs a scale");
        return gaussian(args[0]);
    }
    if (name == "sigmoid") {
        if (args.size() != 2) throw ParameterError("sigmoid kernel needs scale and offset");
        return sigmoid(args[0], args[1]);
    }
    throw ParameterError("unknown kernel family '" + name + "'");
}

// Shared shape of trained kernel machines: decision value is
// bias + sum_j coefficients[j] * K(support_points[j], normalize(x)).
struct KernelModel {
    KernelSpec kernel = KernelSpec::gaussian(0.25);
    Normalizer normalizer;
    std::vector<std::vector<double>> support_points;  // normalized tuples
    std::vector<double> coefficients;
    double bias = 0.0;
    std::uint64_t training_seed = 0;
};

inline double decision_value(const KernelModel& model, std::span<const double> raw) {
    const auto x = model.normalizer.apply(raw);
    double v = model.bias;
    for (std::size_t j = 0; j < model.support_points.size(); ++j)
        v += model.coefficients[j] * kernel_eval(model.kernel, model.support_points[j], x);
    return v;
}

struct TrainedClassifier : KernelModel {
    double training_error = 0.0;
    bool constant_warning = false;  // trained on a single-class oracle
};

struct TrainedRegressor : KernelModel {};

struct Prediction {
    Label label = Label::negative;
    double margin = 0.0;
};

// Ties (decision value exactly 0) predict negative: a tie must not raise
// an alarm on its own; the fusion layer handles caution explicitly.
inline Prediction predict(const TrainedClassifier& clf, std::span<const double> raw) {
    const double v = decision_value(clf, raw);
    if (!std::isfinite(v)) throw NumericError("non-finite decision value");
    return {v > 0.0 ? Label::positive : Label::negative, v};
}

namespace detail {

// Cholesky solve for a symmetric positive definite system (row-major).
// Throws NumericError when a pivot is not strictly positive.
inline std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > 0.0)) throw NumericError("matrix is not positive definite");
        const double ljj = std::sqrt(diag);
        a[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / ljj;
        }
    }
    // L z = b
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
        b[i] = v / a[i * n + i];
    }
    // L^T x = z
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) v -= a[k * n + ii] * b[k];
        b[ii] = v / a[ii * n + ii];
    }
    return b;
}

inline std::vector<std::vector<double>> normalize_tuples(const SignSchema& schema,
                                                         const std::vector<Observation>& records) {
    const auto norm = Normalizer::from_schema(schema);
    std::vector<std::vector<double>> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(norm.apply(r.values));
    return out;
}

inline std::vector<double> gram_matrix(const KernelSpec& spec,
                                       const std::vector<std::vector<double>>& points) {
    const std::size_t m = points.size();
    std::vector<double> g(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernel_eval(spec, points[i], points[j]);
            if (!std::isfinite(v)) throw NumericError("non-finite kernel value in Gram matrix");
            g[i * m + j] = v;
            g[j * m + i] = v;
        }
    }
    return g;
}

}  // namespace detail

// Regularized hinge-loss minimization by stochastic subgradient steps in the
// kernel dual, with a fixed epoch budget and 1/(reg*t) step sizes. The bias
// is carried as a +1 kernel augmentation, so the final bias equals the sum of
// the dual coefficients. Deterministic given (record order, seed).
inline TrainedClassifier train_classifier(const Oracle& oracle, const KernelSpec& spec,
                                          double reg, std::size_t epochs, std::uint64_t seed) {
    if (!(reg > 0.0) || !std::isfinite(reg)) throw ParameterError("reg must be > 0");
    if (epochs < 1) throw ParameterError("epochs must be >= 1");

    const std::size_t m = oracle.size();
    TrainedClassifier clf;
    clf.kernel = spec;
    clf.normalizer = Normalizer::from_schema(oracle.schema());
    clf.training_seed = seed;

    std::vector<double> y(m);
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < m; ++i) {
        const bool pos = oracle.records()[i].label == Label::positive;
        y[i] = pos ? 1.0 : -1.0;
        (pos ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg) {
        // Single-class oracle: constant classifier, flagged.
        clf.bias = any_pos ? 1.0 : -1.0;
        clf.training_error = 0.0;
        clf.constant_warning = true;
        return clf;
    }

    const auto points = detail::normalize_tuples(oracle.schema(), oracle.records());
    const auto gram = detail::gram_matrix(spec, points);

    std::vector<double> alpha(m, 0.0);
    double alpha_sum = 0.0;  // running bias term of the +1 augmentation

    auto rng = make_rng(seed);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffle_in_place(order, rng);
        for (const std::size_t i : order) {
            ++t;
            const double* row = gram.data() + i * m;
            double g = alpha_sum;
            for (std::size_t j = 0; j < m; ++j) g += alpha[j] * row[j];

            const double shrink = 1.0 - 1.0 / static_cast<double>(t);
            for (std::size_t j = 0; j < m; ++j) alpha[j] *= shrink;
            alpha_sum *= shrink;

            if (y[i] * g < 1.0) {
                const double step = y[i] / (reg * static_cast<double>(t));
                alpha[i] += step;
                alpha_sum += step;
            }
        }
    }

    clf.support_points = points;
    clf.coefficients = std::move(alpha);
    clf.bias = std::accumulate(clf.coefficients.begin(), clf.coefficients.end(), 0.0);

    // Training error evaluated exactly as predict() would see it.
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double v = clf.bias;
        for (std::size_t j = 0; j < m; ++j) v += clf.coefficients[j] * gram[i * m + j];
        const Label lab = v > 0.0 ? Label::positive : Label::negative;
        if (lab != oracle.records()[i].label) ++wrong;
    }
    clf.training_error = static_cast<double>(wrong) / static_cast<double>(m);
    return clf;
}

struct EffectivenessSample {
    std::vector<double> values;
    double effectiveness = 0.0;
};

// Kernel ridge: coefficients solve (Gram + reg I) alpha = targets.
inline TrainedRegressor train_regressor(const SignSchema& schema,
                                        std::span<const EffectivenessSample> samples,
                                        const KernelSpec& spec, double reg) {
    if (samples.empty()) throw ParameterError("regressor needs at least one sample");
    if (!(reg >= 0.0) || !std::isfinite(reg)) throw ParameterError("reg must be >= 0");

    TrainedRegressor model;
    model.kernel = spec;
    model.normalizer = Normalizer::from_schema(schema);

    const std::size_t m = samples.size();
    std::vector<double> targets(m);
    model.support_points.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(samples[i].effectiveness))
            throw ParameterError("effectiveness values must be finite");
        targets[i] = samples[i].effectiveness;
        model.support_points.push_back(model.normalizer.apply(samples[i].values));
    }

    auto a = detail::gram_matrix(spec, model.support_points);
    for (std::size_t i = 0; i < m; ++i) a[i * m + i] += reg;
    model.coefficients = detail::solve_spd(std::move(a), std::move(targets));
    model.bias = 0.0;
    return model;
}

inline double predict_value(const TrainedRegressor& model, std::span<const double> raw) {
    const double v = decision_value(model, raw);
    if (!std::isfinite(v)) throw NumericError("non-finite regression value");
    return v;
}

}  // namespace driftlearn
