#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flightgb {

enum class Errc {
  // usage
  InvalidArgument,
  InvalidSpec,
  InvalidSchema,
  InvalidPercent,
  InvalidThreshold,
  EmptyGrid,
  // data
  IoError,
  MissingColumn,
  RowArity,
  ParseError,
  SchemaMismatch,
  EmptyInput,
  UnknownColumn,
  CannotDropLabel,
  UnrecognizedLabelValue,
  NotCategorical,
  UnseenCategory,
  MissingValue,
  TooFewRows,
  LengthMismatch,
  VersionMismatch,
  CorruptModel,
  // numeric / training
  MinorityTooSmall,
  NonFiniteTarget,
  NonFiniteFeature,
  DimensionMismatch,
  SingleClassTraining,
  SingleClassInput,
  ClassTooSmallForFolds,
};

enum class ErrorCategory { usage, data, numeric };

constexpr std::string_view errc_name(Errc e) noexcept {
  switch (e) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidSchema: return "InvalidSchema";
    case Errc::InvalidPercent: return "InvalidPercent";
    case Errc::InvalidThreshold: return "InvalidThreshold";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::IoError: return "IoError";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::RowArity: return "RowArity";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::UnknownColumn: return "UnknownColumn";
    case Errc::CannotDropLabel: return "CannotDropLabel";
    case Errc::UnrecognizedLabelValue: return "UnrecognizedLabelValue";
    case Errc::NotCategorical: return "NotCategorical";
    case Errc::UnseenCategory: return "UnseenCategory";
    case Errc::MissingValue: return "MissingValue";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptModel: return "CorruptModel";
    case Errc::MinorityTooSmall: return "MinorityTooSmall";
    case Errc::NonFiniteTarget: return "NonFiniteTarget";
    case Errc::NonFiniteFeature: return "NonFiniteFeature";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingleClassTraining: return "SingleClassTraining";
    case Errc::SingleClassInput: return "SingleClassInput";
    case Errc::ClassTooSmallForFolds: return "ClassTooSmallForFolds";
  }
  return "Unknown";
}

constexpr ErrorCategory errc_category(Errc e) noexcept {
  switch (e) {
    case Errc::InvalidArgument:
    case Errc::InvalidSpec:
    case Errc::InvalidSchema:
    case Errc::InvalidPercent:
    case Errc::InvalidThreshold:
    case Errc::EmptyGrid:
      return ErrorCategory::usage;
    case Errc::MinorityTooSmall:
    case Errc::NonFiniteTarget:
    case Errc::NonFiniteFeature:
    case Errc::DimensionMismatch:
    case Errc::SingleClassTraining:
    case Errc::SingleClassInput:
    case Errc::ClassTooSmallForFolds:
      return ErrorCategory::numeric;
    default:
      return ErrorCategory::data;
  }
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return errc_category(code_); }

 private:
  Errc code_;
};

}  // namespace flightgb
