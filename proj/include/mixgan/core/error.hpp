#pragma once

#include <stdexcept>
#include <string>

namespace mixgan {

// Error taxonomy shared by all modules. Every failure surfaced to callers is
// one of these; exit-code mapping lives in the CLI.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file content (bad magic, truncated payload, corrupt container).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Array shape does not match the declared contract.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid argument value (empty input, out-of-range scalar).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// NaN or infinity appeared where finite values are required.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Checkpoint is in the wrong pipeline stage for the requested operation.
class StageError : public Error {
 public:
  using Error::Error;
};

// Checkpoint container version is not supported.
class VersionError : public Error {
 public:
  using Error::Error;
};

// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Dataset directory resolved to zero usable images.
class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

// Kernel bandwidth degenerated to zero (all points identical).
class DegenerateKernelError : public Error {
 public:
  using Error::Error;
};

}  // namespace mixgan
