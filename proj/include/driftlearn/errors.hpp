#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace driftlearn {

// All toolkit failures derive from Error and carry a short machine-readable
// code. The CLI prints one line per failure, "error[<code>]: <message>", and
// exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& m) : Error("invalid-schema", m) {}
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& m) : Error("parameter-domain", m) {}
};

struct UnboundedError : Error {
    explicit UnboundedError(const std::string& m) : Error("unbounded-requirement", m) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& m) : Error("dimension-mismatch", m) {}
};

struct OverflowError : Error {
    explicit OverflowError(const std::string& m) : Error("overflow", m) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error("numeric", m) {}
};

struct BudgetError : Error {
    explicit BudgetError(const std::string& m) : Error("world-budget", m) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config", m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io", m) {}
};

}  // namespace driftlearn
