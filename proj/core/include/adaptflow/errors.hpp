#ifndef ADAPTFLOW_ERRORS_HPP
#define ADAPTFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adaptflow {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A state with non-positive density or pressure was passed to (or produced
/// by) a flux evaluation or an update. Usually indicates a CFL violation or
/// bad input data.
class NonPhysicalState : public Error {
 public:
  explicit NonPhysicalState(const std::string& what) : Error(what) {}
};

class LevelMismatch : public Error {
 public:
  explicit LevelMismatch(const std::string& what) : Error(what) {}
};

class BadDomain : public Error {
 public:
  explicit BadDomain(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Cached reference snapshot does not match the configuration that requested it.
class CacheCorrupt : public Error {
 public:
  explicit CacheCorrupt(const std::string& what) : Error(what) {}
};

class DivisionDomain : public Error {
 public:
  explicit DivisionDomain(const std::string& what) : Error(what) {}
};

class UnbalancedTimer : public Error {
 public:
  explicit UnbalancedTimer(const std::string& what) : Error(what) {}
};

class TimeMismatch : public Error {
 public:
  explicit TimeMismatch(const std::string& what) : Error(what) {}
};

class MissingBracketingStates : public Error {
 public:
  explicit MissingBracketingStates(const std::string& what) : Error(what) {}
};

class RegisterMismatch : public Error {
 public:
  explicit RegisterMismatch(const std::string& what) : Error(what) {}
};

class NestingViolation : public Error {
 public:
  explicit NestingViolation(const std::string& what) : Error(what) {}
};

}  // namespace adaptflow

#endif  // ADAPTFLOW_ERRORS_HPP
