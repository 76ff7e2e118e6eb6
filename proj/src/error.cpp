#include "distsdp/error.hpp"

namespace distsdp {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZERO_VECTOR";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::InvalidProblem: return "INVALID_PROBLEM";
    case ErrorCode::MultipleParents: return "MULTIPLE_PARENTS";
    case ErrorCode::DisconnectedAgents: return "DISCONNECTED_AGENTS";
    case ErrorCode::OrphanIndex: return "ORPHAN_INDEX";
    case ErrorCode::OwnershipViolation: return "OWNERSHIP_VIOLATION";
    case ErrorCode::CyclicPrecedence: return "CYCLIC_PRECEDENCE";
    case ErrorCode::BadSigma: return "BAD_SIGMA";
    case ErrorCode::NotAChild: return "NOT_A_CHILD";
    case ErrorCode::NoParent: return "NO_PARENT";
    case ErrorCode::MissingMessage: return "MISSING_MESSAGE";
    case ErrorCode::StaleBeyondB: return "STALE_BEYOND_B";
    case ErrorCode::TooLarge: return "TOO_LARGE";
    case ErrorCode::TooManyAgents: return "TOO_MANY_AGENTS";
    case ErrorCode::UnsupportedFormat: return "UNSUPPORTED_FORMAT";
    case ErrorCode::CorruptHeader: return "CORRUPT_HEADER";
    case ErrorCode::TruncatedPixelData: return "TRUNCATED_PIXEL_DATA";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

}  // namespace distsdp
