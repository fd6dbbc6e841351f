#pragma once

#include <stdexcept>
#include <string>

namespace sseq {

// Thrown when a bigraded map fed to a homology computation does not commute
// with the differentials.
class NonChainMap : public std::runtime_error {
 public:
  explicit NonChainMap(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a page map derived from page 0 fails to be a chain map.
class NotAMorphism : public std::runtime_error {
 public:
  NotAMorphism(int page, const std::string& what)
      : std::runtime_error("page " + std::to_string(page) + ": " + what), page_(page) {}
  int page() const { return page_; }

 private:
  int page_;
};

// Pullbacks of spectral sequences exist only along surjections; this is the
// refusal signal for everything else.
class NotASurjection : public std::runtime_error {
 public:
  explicit NotASurjection(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedGenerator : public std::runtime_error {
 public:
  explicit UnsupportedGenerator(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public std::runtime_error {
 public:
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

// An internal contract that mathematics guarantees has failed; always a bug.
class InternalInvariantViolation : public std::logic_error {
 public:
  explicit InternalInvariantViolation(const std::string& what) : std::logic_error(what) {}
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A parsed document that fails its module invariants (reported with the
// validator's message, distinct from a syntax error).
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sseq
