#pragma once

#include <stdexcept>
#include <string>

namespace xprov {

enum class ErrorCode {
  // container
  DuplicateLabel,
  ArityMismatch,
  UnknownIndex,
  EmptyDimension,
  InvalidScalar,
  // lineage store
  SchemaViolation,
  SchemaMismatch,
  EmptyInput,
  CorruptPayload,
  // ops / execution
  UnknownOperation,
  ExecutionFailure,
  Timeout,
  NonZeroExit,
  MalformedOutput,
  NotBuiltin,
  OutputMismatch,
  NonDeterministicOp,
  // learn
  SubsetTooLarge,
  AllExecutionsFailed,
  NoExamples,
  // workflow / kb
  CycleDetected,
  UnknownContainerRef,
  DuplicateId,
  KBWriteFailure,
  CorruptStore,
  // query
  InvalidPath,
  UnknownTarget,
  InsufficientLineage,
  // generic
  ParseError,
  Precondition,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::UnknownIndex: return "UnknownIndex";
    case ErrorCode::EmptyDimension: return "EmptyDimension";
    case ErrorCode::InvalidScalar: return "InvalidScalar";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::CorruptPayload: return "CorruptPayload";
    case ErrorCode::UnknownOperation: return "UnknownOperation";
    case ErrorCode::ExecutionFailure: return "ExecutionFailure";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::NonZeroExit: return "NonZeroExit";
    case ErrorCode::MalformedOutput: return "MalformedOutput";
    case ErrorCode::NotBuiltin: return "NotBuiltin";
    case ErrorCode::OutputMismatch: return "OutputMismatch";
    case ErrorCode::NonDeterministicOp: return "NonDeterministicOp";
    case ErrorCode::SubsetTooLarge: return "SubsetTooLarge";
    case ErrorCode::AllExecutionsFailed: return "AllExecutionsFailed";
    case ErrorCode::NoExamples: return "NoExamples";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::UnknownContainerRef: return "UnknownContainerRef";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::KBWriteFailure: return "KBWriteFailure";
    case ErrorCode::CorruptStore: return "CorruptStore";
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::InsufficientLineage: return "InsufficientLineage";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Precondition: return "Precondition";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace xprov
