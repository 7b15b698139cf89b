#pragma once

#include <stdexcept>
#include <string>

namespace nhq {

// Caller passed arguments that violate a documented precondition.
class UsageError : public std::invalid_argument {
public:
  explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

// On-disk data is malformed (truncated file, bad header, ragged CSV, ...).
class FormatError : public std::runtime_error {
public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Index archive rejections, kept distinct so callers can tell apart
// "not one of our files", "newer/older format", and "bit rot".
class BadMagicError : public FormatError {
public:
  explicit BadMagicError(const std::string& msg) : FormatError(msg) {}
};

class VersionError : public FormatError {
public:
  explicit VersionError(const std::string& msg) : FormatError(msg) {}
};

class ChecksumError : public FormatError {
public:
  explicit ChecksumError(const std::string& msg) : FormatError(msg) {}
};

// A structural invariant did not hold (out-of-range neighbor id, self loop,
// degree overflow, ...). Distinct from UsageError: the data structure itself
// is broken, not the call.
class InvariantError : public std::logic_error {
public:
  explicit InvariantError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace nhq
