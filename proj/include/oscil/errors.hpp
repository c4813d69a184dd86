#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace oscil {

/// Shortest round-trip representation of `value`.
inline std::string format_real(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "?";
  return std::string(buf.data(), end);
}

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A coefficient or expression could not be evaluated at `x()`.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double x)
      : Error(what + " at x=" + format_real(x)), x_(x) {}

  double x() const noexcept { return x_; }

 private:
  double x_;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// A shooting search found no sign change below its cap.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on caller input (empty basis, dominance, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. `key()` is the dotted path of the offending
/// entry, empty when the document itself is malformed.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what) : Error(what), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace oscil
