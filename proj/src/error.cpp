#include "qgnls/error.hpp"

namespace qgnls {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::HTooLarge: return "HTooLarge";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NoPositivePart: return "NoPositivePart";
    case ErrorCode::NotOnNehari: return "NotOnNehari";
    case ErrorCode::PeakOnNonTerminalVertex: return "PeakOnNonTerminalVertex";
    case ErrorCode::SupportTooLong: return "SupportTooLong";
    case ErrorCode::InvalidPeakSpec: return "InvalidPeakSpec";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::OnlyConstantBranchFound: return "OnlyConstantBranchFound";
    case ErrorCode::PeakSetMismatch: return "PeakSetMismatch";
    case ErrorCode::EigenNoConvergence: return "EigenNoConvergence";
    case ErrorCode::EdgeNotTerminal: return "EdgeNotTerminal";
    case ErrorCode::NonPositiveSamples: return "NonPositiveSamples";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace qgnls
