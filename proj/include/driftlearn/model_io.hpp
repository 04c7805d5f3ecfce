#pragma once

#include <string>
#include <vector>

#include "driftlearn/kernel.hpp"
#include "driftlearn/textio.hpp"

namespace driftlearn {

// Model files are line-oriented text with every floating-point field printed
// at 17 significant digits, so a save/load cycle is bit-exact.

namespace detail {

inline void append_vector(std::string& out, const char* key, const std::vector<double>& v) {
    out += key;
    for (double x : v) {
        out += ' ';
        out += fmt_g17(x);
    }
    out += '\n';
}

inline std::string serialize_model(const KernelModel& model, const char* type,
                                   const std::string& extra) {
    std::string out = "driftlearn-model v1\n";
    out += "type ";
    out += type;
    out += '\n';
    out += "kernel " + model.kernel.to_string() + '\n';
    append_vector(out, "normalizer_min", model.normalizer.mins);
    append_vector(out, "normalizer_range", model.normalizer.ranges);
    out += "bias " + fmt_g17(model.bias) + '\n';
    out += "seed " + std::to_string(model.training_seed) + '\n';
    out += extra;
    out += "support " + std::to_string(model.support_points.size()) + '\n';
    for (std::size_t i = 0; i < model.support_points.size(); ++i) {
        out += fmt_g17(model.coefficients[i]);
        for (double v : model.support_points[i]) {
            out += ' ';
            out += fmt_g17(v);
        }
        out += '\n';
    }
    out += "end\n";
    return out;
}

struct ModelReader {
    std::vector<std::string> lines;
    std::size_t pos = 0;

    explicit ModelReader(const std::string& text) {
        for (auto& l : textio::split(text, '\n')) {
            const std::string t = textio::trim(l);
            if (!t.empty()) lines.push_back(t);
        }
    }

    std::string next(const std::string& expect_key = "") {
        if (pos >= lines.size()) throw IoError("model file truncated");
        std::string line = lines[pos++];
        if (!expect_key.empty()) {
            if (line.rfind(expect_key + " ", 0) != 0 && line != expect_key)
                throw IoError("model file: expected '" + expect_key + "', got '" + line + "'");
            line = line.size() > expect_key.size() ? line.substr(expect_key.size() + 1) : "";
        }
        return line;
    }
};

inline std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> out;
    for (const auto& tok : textio::split(text, ' '))
        if (!textio::trim(tok).empty()) out.push_back(textio::parse_double(tok, "model vector"));
    return out;
}

inline std::string parse_model_into(KernelModel& model, ModelReader& reader,
                                    const char* expected_type) {
    if (reader.next() != "driftlearn-model v1") throw IoError("not a driftlearn model file");
    const std::string type = reader.next("type");
    if (type != expected_type)
        throw IoError("model file holds a " + type + ", expected " + expected_type);
    model.kernel = KernelSpec::parse(reader.next("kernel"));
    model.normalizer.mins = parse_vector(reader.next("normalizer_min"));
    model.normalizer.ranges = parse_vector(reader.next("normalizer_range"));
    model.bias = textio::parse_double(reader.next("bias"), "model bias");
    model.training_seed = textio::parse_uint(reader.next("seed"), "model seed");
    return type;
}

inline void parse_support(KernelModel& model, ModelReader& reader) {
    const auto count = textio::parse_uint(reader.next("support"), "support count");
    for (std::uint64_t i = 0; i < count; ++i) {
        auto row = parse_vector(reader.next());
        if (row.size() != model.normalizer.size() + 1)
            throw IoError("support row has wrong width");
        model.coefficients.push_back(row.front());
        model.support_points.emplace_back(row.begin() + 1, row.end());
    }
    if (reader.next() != "end") throw IoError("model file missing end marker");
}

}  // namespace detail

inline std::string serialize_classifier(const TrainedClassifier& clf) {
    std::string extra = "training_error " + fmt_g17(clf.training_error) + '\n';
    extra += std::string("constant ") + (clf.constant_warning ? "1" : "0") + '\n';
    return detail::serialize_model(clf, "classifier", extra);
}

inline TrainedClassifier parse_classifier(const std::string& text) {
    detail::ModelReader reader(text);
    TrainedClassifier clf;
    detail::parse_model_into(clf, reader, "classifier");
    clf.training_error = textio::parse_double(reader.next("training_error"), "training error");
    clf.constant_warning = textio::parse_uint(reader.next("constant"), "constant flag") != 0;
    detail::parse_support(clf, reader);
    return clf;
}

inline std::string serialize_regressor(const TrainedRegressor& model) {
    return detail::serialize_model(model, "regressor", "");
}

inline TrainedRegressor parse_regressor(const std::string& text) {
    detail::ModelReader reader(text);
    TrainedRegressor model;
    detail::parse_model_into(model, reader, "regressor");
    detail::parse_support(model, reader);
    return model;
}

}  // namespace driftlearn
