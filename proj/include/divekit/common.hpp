#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace divekit {

// Infinite bounds are stored as this sentinel so that dual objectives stay
// finite and instances serialize as plain numbers.
inline constexpr double kInfinity = 1e20;

inline bool is_infinite(double v) { return std::abs(v) >= kInfinity; }
inline bool is_finite_bound(double v) { return !is_infinite(v) && std::isfinite(v); }

// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnsupportedFeature : public Error {
 public:
  using Error::Error;
};

class InfeasibleConstruction : public Error {
 public:
  using Error::Error;
};

class SingularBasis : public Error {
 public:
  using Error::Error;
};

class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyPool : public Error {
 public:
  using Error::Error;
};

class MissingDuals : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradient : public Error {
 public:
  using Error::Error;
};

class BudgetMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace divekit
