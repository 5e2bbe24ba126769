#include "santalo/error.hpp"

namespace santalo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateBody: return "DegenerateBody";
    case ErrorCode::CenterOutside: return "CenterOutside";
    case ErrorCode::SolverFail: return "SolverFail";
    case ErrorCode::HypothesisFail: return "HypothesisFail";
    case ErrorCode::DivergentKernel: return "DivergentKernel";
    case ErrorCode::QuadFail: return "QuadFail";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace santalo
