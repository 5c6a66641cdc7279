#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kplane {

/// Invalid arguments or numerically ill-posed requests (bad dimensions,
/// unsupported orders, non-finite data).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed KPT1 file. Carries the byte offset where decoding failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kplane
