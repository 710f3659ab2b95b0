#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vatgame {

enum class ErrorCode {
  InvalidParams,
  DegenerateAnchors,
  AmbiguousGame,
  OutsideTaxonomy,
  EmptyGraph,
  SizeMismatch,
  TooFewSamples,
  NonPositiveSample,
  TooFewDistinct,
  UnknownAxis,
  UnknownKey,
  ParseError,
  NegativeAmount,
  BothZero,
  EmptyInput,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every data or parameter error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vatgame
