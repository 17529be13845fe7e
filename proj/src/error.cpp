#include "tfsieve/error.hpp"

namespace tfsieve {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::AxisMismatch: return "AxisMismatch";
    case ErrorCode::AliasingRisk: return "AliasingRisk";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TruncationRisk: return "TruncationRisk";
    case ErrorCode::PatchOutsideGrid: return "PatchOutsideGrid";
    case ErrorCode::DegenerateConstant: return "DegenerateConstant";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::PointOutsideWindow: return "PointOutsideWindow";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Error";
}

}  // namespace tfsieve
