#pragma once

#include <stdexcept>
#include <string>

namespace qshape {

enum class ErrorCode {
  TooFewVertices,
  SelfIntersecting,
  DegenerateEdge,
  CoincidentPoints,
  UnsupportedFormat,
  CorruptHeader,
  TruncatedData,
  EmptyMask,
  ComponentTooSmall,
  CollapsedPolygon,
  TargetTooSmall,
  SimplificationStuck,
  NonPositiveRatio,
  ShiftOutOfRange,
  ShapeMismatch,
  ZeroDirectionError,
  DegenerateCandidate,
  BudgetTooSmall,
  InvalidParams,
  InvalidDescriptor,
  EmptyCorpus,
  AllEntriesFailed,
  HeterogeneousCorpus,
  KTooLarge,
  IoFailure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::DegenerateEdge: return "DegenerateEdge";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ComponentTooSmall: return "ComponentTooSmall";
    case ErrorCode::CollapsedPolygon: return "CollapsedPolygon";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::SimplificationStuck: return "SimplificationStuck";
    case ErrorCode::NonPositiveRatio: return "NonPositiveRatio";
    case ErrorCode::ShiftOutOfRange: return "ShiftOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ZeroDirectionError: return "ZeroDirectionError";
    case ErrorCode::DegenerateCandidate: return "DegenerateCandidate";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidDescriptor: return "InvalidDescriptor";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::AllEntriesFailed: return "AllEntriesFailed";
    case ErrorCode::HeterogeneousCorpus: return "HeterogeneousCorpus";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qshape
