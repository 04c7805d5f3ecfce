#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "driftlearn/kernel.hpp"
#include "driftlearn/model_io.hpp"
#include "driftlearn/rng.hpp"

using namespace driftlearn;

namespace {

SignSchema unit_square() {
    return SignSchema({{"x", {0.0, 1.0}, 0.0}, {"y", {0.0, 1.0}, 0.0}});
}

Oracle xor_oracle() {
    return Oracle(unit_square(), {{{0, 1}, Label::positive},
                                  {{1, 0}, Label::positive},
                                  {{0, 0}, Label::negative},
                                  {{1, 1}, Label::negative}});
}

std::vector<double> random_tuple(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = uniform_range(rng, -2.0, 2.0);
    return v;
}

// Test-side Cholesky-with-jitter PSD check, independent of the library path.
bool cholesky_with_jitter(std::vector<double> a, std::size_t n, double jitter) {
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += jitter;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > 0.0)) return false;
        const double l = std::sqrt(diag);
        a[j * n + j] = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / l;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("kernel_eval families") {
    const std::vector<double> ones{1.0, 1.0};
    CHECK(kernel_eval(KernelSpec::gaussian(0.7), ones, ones) == 1.0);
    CHECK(kernel_eval(KernelSpec::linear(), std::vector<double>{1, 0},
                      std::vector<double>{0, 1}) == 0.0);
    CHECK(kernel_eval(KernelSpec::polynomial(2, 1.0), ones, ones) == 9.0);  // (2 + 1)^2
    CHECK(kernel_eval(KernelSpec::sigmoid(1.0, 0.0), ones, ones) ==
          Catch::Approx(std::tanh(2.0)));
    CHECK_THROWS_AS(kernel_eval(KernelSpec::linear(), ones, std::vector<double>{1.0}),
                    DimensionError);
}

TEST_CASE("kernel spec validation and parsing") {
    CHECK_THROWS_AS(KernelSpec::gaussian(0.0), ParameterError);
    CHECK_THROWS_AS(KernelSpec::polynomial(0, 1.0), ParameterError);
    CHECK_THROWS_AS(KernelSpec::linear().scale(), ParameterError);

    CHECK(KernelSpec::parse("gaussian:0.25").to_string() == "gaussian scale=0.25");
    CHECK(KernelSpec::parse("linear").family() == KernelFamily::linear);
    CHECK(KernelSpec::parse("polynomial:3:1").degree() == 3);
    CHECK(KernelSpec::parse("sigmoid:2:0.5").offset() == 0.5);
    CHECK_THROWS_AS(KernelSpec::parse("fourier:1"), ParameterError);

    // Serialized form parses back to itself.
    for (const auto& spec : {KernelSpec::linear(), KernelSpec::gaussian(0.25),
                             KernelSpec::polynomial(3, 1.0), KernelSpec::sigmoid(1.5, -0.5)}) {
        CHECK(KernelSpec::parse(spec.to_string()).to_string() == spec.to_string());
    }
}

TEST_CASE("kernel symmetry is exact") {
    auto rng = make_rng(23);
    const std::vector<KernelSpec> specs{KernelSpec::linear(), KernelSpec::gaussian(0.4),
                                        KernelSpec::polynomial(3, 0.5),
                                        KernelSpec::sigmoid(0.8, 0.1)};
    for (int trial = 0; trial < 200; ++trial) {
        const auto dim = 1 + uniform_below(rng, 6);
        const auto x = random_tuple(rng, dim);
        const auto y = random_tuple(rng, dim);
        for (const auto& spec : specs)
            CHECK(kernel_eval(spec, x, y) == kernel_eval(spec, y, x));
    }
}

TEST_CASE("gaussian gram matrices are positive semidefinite") {
    auto rng = make_rng(31);
    const auto spec = KernelSpec::gaussian(0.3);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 10;
        std::vector<std::vector<double>> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(random_tuple(rng, 3));
        std::vector<double> gram(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                gram[i * n + j] = kernel_eval(spec, pts[i], pts[j]);
        CHECK(cholesky_with_jitter(gram, n, 1e-8));
    }
}

TEST_CASE("train_classifier separable pair") {
    const SignSchema schema({{"x", {0.0, 1.0}, 0.0}});
    const Oracle oracle(schema, {{{0.0}, Label::negative}, {{1.0}, Label::positive}});
    const auto clf = train_classifier(oracle, KernelSpec::linear(), 0.01, 100, 3);
    CHECK(clf.training_error == 0.0);
    CHECK_FALSE(clf.constant_warning);
    CHECK(predict(clf, std::vector<double>{0.0}).label == Label::negative);
    CHECK(predict(clf, std::vector<double>{1.0}).label == Label::positive);
}

TEST_CASE("train_classifier fits xor with a gaussian kernel") {
    const auto oracle = xor_oracle();
    const auto clf = train_classifier(oracle, KernelSpec::gaussian(0.5), 0.01, 400, 11);
    CHECK(clf.training_error == 0.0);
    // Exhaustive check over the four corners.
    for (const auto& rec : oracle.records())
        CHECK(predict(clf, rec.values).label == rec.label);
    CHECK(predict(clf, std::vector<double>{1.0, 0.0}).label == Label::positive);
}

TEST_CASE("train_classifier on a fully inconsistent oracle") {
    const SignSchema schema({{"x", {0.0, 1.0}, 0.0}});
    const Oracle oracle(schema, {{{1.0}, Label::positive}, {{1.0}, Label::negative}});
    const auto clf = train_classifier(oracle, KernelSpec::gaussian(0.5), 0.01, 50, 5);
    CHECK(clf.training_error >= 0.5);
}

TEST_CASE("train_classifier single-class oracle yields a flagged constant") {
    const SignSchema schema({{"x", {0.0, 1.0}, 0.0}});
    const Oracle oracle(schema, {{{0.0}, Label::positive}, {{1.0}, Label::positive}});
    const auto clf = train_classifier(oracle, KernelSpec::gaussian(0.5), 0.01, 50, 5);
    CHECK(clf.constant_warning);
    const auto p = predict(clf, std::vector<double>{0.0});
    CHECK(p.label == Label::positive);
    CHECK(p.margin == predict(clf, std::vector<double>{1.0}).margin);
}

TEST_CASE("train_classifier parameter validation") {
    const auto oracle = xor_oracle();
    CHECK_THROWS_AS(train_classifier(oracle, KernelSpec::gaussian(0.5), 0.0, 50, 5),
                    ParameterError);
    CHECK_THROWS_AS(train_classifier(oracle, KernelSpec::gaussian(0.5), 0.01, 0, 5),
                    ParameterError);
}

TEST_CASE("training is bit-deterministic per seed") {
    const auto oracle = xor_oracle();
    const auto a = train_classifier(oracle, KernelSpec::gaussian(0.5), 0.01, 120, 42);
    const auto b = train_classifier(oracle, KernelSpec::gaussian(0.5), 0.01, 120, 42);
    CHECK(a.coefficients == b.coefficients);
    CHECK(a.bias == b.bias);
    CHECK(a.training_error == b.training_error);

    const auto c = train_classifier(oracle, KernelSpec::gaussian(0.5), 0.01, 120, 43);
    CHECK(a.coefficients != c.coefficients);  // the shuffle stream moved
}

TEST_CASE("prediction ties resolve to negative") {
    TrainedClassifier clf;
    clf.kernel = KernelSpec::linear();
    clf.normalizer = Normalizer::from_schema(SignSchema({{"x", {0.0, 1.0}, 0.0}}));
    clf.bias = 0.0;  // no support points: decision value identically zero
    CHECK(predict(clf, std::vector<double>{1.0}).label == Label::negative);
}

TEST_CASE("kernel ridge regressor") {
    const auto schema = unit_square();

    SECTION("single sample interpolates") {
        const std::vector<EffectivenessSample> samples{{{0.0, 1.0}, 3.0}};
        const auto model = train_regressor(schema, samples, KernelSpec::gaussian(0.5), 1e-10);
        CHECK(predict_value(model, std::vector<double>{0.0, 1.0}) == Catch::Approx(3.0).margin(1e-8));
    }

    SECTION("equal targets stay put") {
        const std::vector<EffectivenessSample> samples{{{0.0, 0.0}, 0.7}, {{1.0, 1.0}, 0.7}};
        const auto model = train_regressor(schema, samples, KernelSpec::gaussian(0.5), 1e-8);
        CHECK(predict_value(model, std::vector<double>{0.0, 0.0}) ==
              Catch::Approx(0.7).margin(1e-6));
        CHECK(predict_value(model, std::vector<double>{1.0, 1.0}) ==
              Catch::Approx(0.7).margin(1e-6));
    }

    SECTION("interpolation within 1e-4 at reg 1e-8") {
        auto rng = make_rng(77);
        std::vector<EffectivenessSample> samples;
        samples.push_back({{0.0, 0.0}, uniform_unit(rng)});
        samples.push_back({{0.0, 1.0}, uniform_unit(rng)});
        samples.push_back({{1.0, 0.0}, uniform_unit(rng)});
        samples.push_back({{1.0, 1.0}, uniform_unit(rng)});
        const auto model = train_regressor(schema, samples, KernelSpec::gaussian(0.5), 1e-8);
        for (const auto& s : samples)
            CHECK(std::abs(predict_value(model, s.values) - s.effectiveness) <= 1e-4);
    }

    SECTION("heavy regularization shrinks to zero") {
        const std::vector<EffectivenessSample> samples{{{0.0, 0.0}, 1.0}, {{1.0, 1.0}, 1.0}};
        const auto model = train_regressor(schema, samples, KernelSpec::gaussian(0.5), 1e9);
        CHECK(std::abs(predict_value(model, std::vector<double>{0.0, 0.0})) < 1e-6);
    }

    SECTION("repeated points without regularization are singular") {
        const std::vector<EffectivenessSample> samples{{{0.0, 0.0}, 0.2}, {{0.0, 0.0}, 0.8}};
        CHECK_THROWS_AS(train_regressor(schema, samples, KernelSpec::gaussian(0.5), 0.0),
                        NumericError);
    }

    SECTION("empty and non-finite samples rejected") {
        CHECK_THROWS_AS(train_regressor(schema, {}, KernelSpec::gaussian(0.5), 0.01),
                        ParameterError);
        const std::vector<EffectivenessSample> bad{{{0.0, 0.0}, std::nan("")}};
        CHECK_THROWS_AS(train_regressor(schema, bad, KernelSpec::gaussian(0.5), 0.01),
                        ParameterError);
    }
}

TEST_CASE("model serialization round-trips bit-exactly") {
    const auto clf = train_classifier(xor_oracle(), KernelSpec::gaussian(0.5), 0.01, 150, 9);
    const auto text = serialize_classifier(clf);
    const auto parsed = parse_classifier(text);
    CHECK(parsed.coefficients == clf.coefficients);
    CHECK(parsed.bias == clf.bias);
    CHECK(parsed.support_points == clf.support_points);
    CHECK(parsed.normalizer.mins == clf.normalizer.mins);
    CHECK(parsed.normalizer.ranges == clf.normalizer.ranges);
    CHECK(parsed.training_seed == clf.training_seed);
    CHECK(parsed.training_error == clf.training_error);
    CHECK(serialize_classifier(parsed) == text);

    const std::vector<EffectivenessSample> samples{{{0.0, 1.0}, 0.25}, {{1.0, 0.0}, 0.75}};
    const auto reg = train_regressor(unit_square(), samples, KernelSpec::gaussian(0.5), 1e-4);
    const auto reg_text = serialize_regressor(reg);
    const auto reg_parsed = parse_regressor(reg_text);
    CHECK(serialize_regressor(reg_parsed) == reg_text);
    CHECK(reg_parsed.coefficients == reg.coefficients);

    CHECK_THROWS_AS(parse_classifier(reg_text), IoError);
    CHECK_THROWS_AS(parse_classifier("not a model"), IoError);
}
