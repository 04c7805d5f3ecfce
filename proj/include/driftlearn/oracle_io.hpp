#pragma once

#include <string>
#include <vector>

#include "driftlearn/domain.hpp"
#include "driftlearn/textio.hpp"

namespace driftlearn {

// Oracle file format (plain 7-bit text, '.' decimal separator):
//   line 1:  schema header, one ';'-separated field per sign,
//            each field "name:sigma:v1,v2,...,vk"
//   line 2+: one record per line, "v1,v2,...,vk,<label>" with label '+'
//            (confirmed) or '-' (refuted)
// Blank lines are ignored.

inline std::string format_schema_header(const SignSchema& schema) {
    std::string out;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& s = schema.sign(i);
        if (i) out += ';';
        out += s.name;
        out += ':';
        out += fmt_g17(s.sigma);
        out += ':';
        for (std::size_t j = 0; j < s.values.size(); ++j) {
            if (j) out += ',';
            out += fmt_g17(s.values[j]);
        }
    }
    return out;
}

inline SignSchema parse_schema_header(const std::string& line) {
    std::vector<SignDef> signs;
    for (const auto& field : textio::split(line, ';')) {
        const auto parts = textio::split(field, ':');
        if (parts.size() != 3)
            throw IoError("schema field '" + field + "' is not name:sigma:values");
        SignDef def;
        def.name = textio::trim(parts[0]);
        def.sigma = textio::parse_double(parts[1], "schema sigma for '" + def.name + "'");
        for (const auto& tok : textio::split(parts[2], ','))
            def.values.push_back(textio::parse_double(tok, "schema value for '" + def.name + "'"));
        signs.push_back(std::move(def));
    }
    try {
        return SignSchema(std::move(signs));
    } catch (const SchemaError& e) {
        throw IoError(std::string("bad schema header: ") + e.what());
    }
}

inline std::string format_oracle(const Oracle& oracle) {
    std::string out = format_schema_header(oracle.schema());
    out += '\n';
    for (const auto& rec : oracle.records()) {
        for (double v : rec.values) {
            out += fmt_g17(v);
            out += ',';
        }
        out += label_token(rec.label);
        out += '\n';
    }
    return out;
}

inline Oracle parse_oracle(const std::string& text, std::string provenance = "",
                           std::int64_t collected_at = 0) {
    SignSchema schema;
    std::vector<Observation> records;
    bool have_schema = false;
    std::size_t line_no = 0;
    for (const auto& raw_line : textio::split(text, '\n')) {
        ++line_no;
        const std::string line = textio::trim(raw_line);
        if (line.empty()) continue;
        if (!have_schema) {
            schema = parse_schema_header(line);
            have_schema = true;
            continue;
        }
        const auto fields = textio::split(line, ',');
        const std::string ctx = "oracle line " + std::to_string(line_no);
        if (fields.size() != schema.size() + 1)
            throw IoError(ctx + ": expected " + std::to_string(schema.size()) +
                          " values plus a label");
        Observation obs;
        for (std::size_t i = 0; i < schema.size(); ++i)
            obs.values.push_back(textio::parse_double(fields[i], ctx));
        const std::string tok = textio::trim(fields.back());
        if (tok == "+") obs.label = Label::positive;
        else if (tok == "-") obs.label = Label::negative;
        else throw IoError(ctx + ": label must be '+' or '-', got '" + tok + "'");
        records.push_back(std::move(obs));
    }
    if (!have_schema) throw IoError("oracle file has no schema header");
    if (records.empty()) throw IoError("oracle file has no records");
    return Oracle(std::move(schema), std::move(records), std::move(provenance), collected_at);
}

inline void write_oracle_file(const Oracle& oracle, const std::string& path) {
    textio::write_file(path, format_oracle(oracle));
}

inline Oracle read_oracle_file(const std::string& path, std::int64_t collected_at = 0) {
    return parse_oracle(textio::read_file(path), path, collected_at);
}

}  // namespace driftlearn
