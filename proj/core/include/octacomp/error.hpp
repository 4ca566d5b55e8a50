#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace octacomp {

enum class ErrorKind {
  NotSquare,
  AsymmetricMatrix,
  NegativeEntry,
  NonzeroDiagonal,
  TriangleViolation,
  ZeroDistanceDistinctPoints,
  UnknownLabel,
  InvalidTree,
  PointNotInTree,
  NotAdditive,
  ParameterOutOfRange,
  DisconnectedDiagonals,
  BadSize,
  LabelingNotBijective,
  DimensionMismatch,
  NotTripod,
  MoveNotMonotone,
  ContainmentRuleUnsatisfied,
  VerificationFailedAllOrientations,
  InternalExhaustion,
  NotSymmetric,
  WrongPointCount,
  BadSpec,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace octacomp
