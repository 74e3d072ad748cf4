#pragma once

#include <stdexcept>
#include <string>

namespace degcausal {

// Every failure surfaced by the library carries a stable machine-readable kind
// so the CLI can emit structured error reports.
enum class ErrorKind {
    StructuralInput,
    Comparison,
    Arity,
    Domain,
    Input,
    Numerical,
    DegenerateInput,
    TestInfeasible,
    Convergence,
    Divergence,
    Metric,
    Config,
    EnumeratedChoice,
    Parse,
    MappingValidation,
    Window,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace degcausal
