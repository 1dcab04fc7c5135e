#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdmgen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element set or state vector outside the domain of a conversion.
class ConversionError : public Error {
 public:
  using Error::Error;
};

class InvalidElements : public Error {
 public:
  using Error::Error;
};

/// Semi-major axis decayed below the Earth radius during propagation.
class DecayError : public Error {
 public:
  DecayError(double epoch_s, std::string object = {})
      : Error(make_message(epoch_s, object)), epoch_s_(epoch_s), object_(std::move(object)) {}

  double epoch_seconds() const { return epoch_s_; }
  const std::string& object() const { return object_; }

  DecayError with_object(std::string object) const { return DecayError(epoch_s_, std::move(object)); }

 private:
  static std::string make_message(double epoch_s, const std::string& object) {
    std::string msg = "orbit decayed below the Earth radius at t=" + std::to_string(epoch_s) + " s";
    if (!object.empty()) msg += " (" + object + ")";
    return msg;
  }

  double epoch_s_;
  std::string object_;
};

/// Squared-distance function was not unimodal on a refinement bracket.
class NonUnimodalBracket : public Error {
 public:
  using Error::Error;
};

/// A sampling loop hit its attempt cap.
class RejectionCapExceeded : public Error {
 public:
  RejectionCapExceeded(const std::string& what, std::size_t attempts)
      : Error(what + " (after " + std::to_string(attempts) + " attempts)"), attempts_(attempts) {}

  std::size_t attempts() const { return attempts_; }

 private:
  std::size_t attempts_;
};

/// Observations emitted by a model disagree with the conditioning set.
class StructuralMismatch : public Error {
 public:
  using Error::Error;
};

/// Every importance weight is -inf.
class DegeneratePosterior : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or document. Row and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(format(what, row, column)), row_(row), column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t row, std::size_t column) {
    std::string msg = what;
    if (row != 0) msg += " (row " + std::to_string(row);
    if (row != 0 && column != 0) msg += ", column " + std::to_string(column);
    if (row != 0) msg += ")";
    return msg;
  }

  std::size_t row_;
  std::size_t column_;
};

/// Invalid configuration value or unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cdmgen
