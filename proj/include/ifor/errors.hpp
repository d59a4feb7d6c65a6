#pragma once

#include <stdexcept>
#include <string>

namespace ifor {

/// Raised by the binary/CSV readers and writers. `kind()` distinguishes
/// a wrong magic, an unsupported format version, a short read and a
/// value that fails validation, so callers can map them to exit codes.
class IoError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, BadVersion, Truncated, Malformed };

  IoError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace ifor
