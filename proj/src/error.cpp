#include "vass/error.hpp"

namespace vass {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::NegativeCounter: return "NegativeCounter";
        case Errc::ZeroTestFailed: return "ZeroTestFailed";
        case Errc::IllegalWalk: return "IllegalWalk";
        case Errc::NegativeExponent: return "NegativeExponent";
        case Errc::NotSlps: return "NotSlps";
        case Errc::SchemaError: return "SchemaError";
        case Errc::NotThreeCnf: return "NotThreeCnf";
        case Errc::HeaderMismatch: return "HeaderMismatch";
        case Errc::ZeroTestOnLoop: return "ZeroTestOnLoop";
        case Errc::UpdateExceedsBound: return "UpdateExceedsBound";
        case Errc::AggregateEffectTooLarge: return "AggregateEffectTooLarge";
        case Errc::TripleTooSmall: return "TripleTooSmall";
        case Errc::DepthTooLarge: return "DepthTooLarge";
        case Errc::CeilingExceeded: return "CeilingExceeded";
        case Errc::PreconditionViolated: return "PreconditionViolated";
        case Errc::UnsupportedScheme: return "UnsupportedScheme";
        case Errc::MalformedWitness: return "MalformedWitness";
    }
    return "Error";
}

}  // namespace vass
