#pragma once

#include <stdexcept>
#include <string>

namespace geoprobe {

// Base of every error thrown by the library. The CLI maps subclasses to
// exit codes (data errors -> 2, provider errors -> 3).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(const std::string& msg, std::size_t pos)
      : Error("WKT syntax error at offset " + std::to_string(pos) + ": " + msg), pos_(pos) {}
  std::size_t position() const noexcept { return pos_; }

private:
  std::size_t pos_;
};

class UnsupportedType : public Error {
public:
  explicit UnsupportedType(const std::string& type)
      : Error("unsupported geometry type: " + type) {}
};

class EmptyGeometry : public Error {
public:
  explicit EmptyGeometry(const std::string& type) : Error("empty geometry: " + type) {}
};

class InvalidGeometry : public Error {
public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class ProviderError : public Error {
public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
public:
  using Error::Error;
};

class EmptyPool : public Error {
public:
  using Error::Error;
};

}  // namespace geoprobe
