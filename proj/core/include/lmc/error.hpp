// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace lmc {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input has the wrong shape or size (length mismatch, non-multiple buffer).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Byte stream is not in the expected file format (bad magic, bad version).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Data was recognized but failed a checksum or consistency check.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what,
                          std::optional<std::uint64_t> frame_index = std::nullopt)
      : Error(what), frame_index_(frame_index) {}

  /// Index of the container frame the error was detected in, when known.
  std::optional<std::uint64_t> frame_index() const { return frame_index_; }

 private:
  std::optional<std::uint64_t> frame_index_;
};

/// Stream ended before a complete record/frame could be read.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Requested feature is not available in this build (e.g. a codec that
/// was compiled out).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace lmc
