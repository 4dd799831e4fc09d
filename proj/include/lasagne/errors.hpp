#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lasagne {

// A file could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed line in a flat input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Syntax error in logical-form text; carries the character offset.
class LfParseError : public std::runtime_error {
 public:
  LfParseError(std::size_t offset, const std::string& message)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Result-sort mismatch in a logical form; the message names the offending
// subtree by its path from the root.
class SortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Entity linking and slot-permutation failures.
class LinkingError : public std::runtime_error {
 public:
  enum class Kind { NoCandidate, MissingSlot, DuplicateSlot, SlotCountMismatch };

  LinkingError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Dataset generation ran out of sampling attempts.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lasagne
