#pragma once

#include <stdexcept>
#include <string>

namespace vass {

enum class Errc {
    DimensionMismatch,
    NegativeCounter,
    ZeroTestFailed,
    IllegalWalk,
    NegativeExponent,
    NotSlps,
    SchemaError,
    NotThreeCnf,
    HeaderMismatch,
    ZeroTestOnLoop,
    UpdateExceedsBound,
    AggregateEffectTooLarge,
    TripleTooSmall,
    DepthTooLarge,
    CeilingExceeded,
    PreconditionViolated,
    UnsupportedScheme,
    MalformedWitness,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace vass
