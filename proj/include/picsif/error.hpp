#pragma once

#include <stdexcept>
#include <string>

namespace picsif {

// Base of every named error raised by the engine.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class SortError : public Error {
 public:
  using Error::Error;
};

class PatternMismatch : public Error {
 public:
  PatternMismatch(int axiom, const std::string& path, const std::string& detail)
      : Error("axiom " + std::to_string(axiom) + " does not match at " + path + ": " + detail),
        axiom_(axiom) {}
  int axiom() const { return axiom_; }

 private:
  int axiom_;
};

class SideConditionViolation : public Error {
 public:
  using Error::Error;
};

class HoleError : public Error {
 public:
  using Error::Error;
};

class StaleRedex : public Error {
 public:
  using Error::Error;
};

class ReplayDivergence : public Error {
 public:
  ReplayDivergence(std::size_t step, const std::string& detail)
      : Error("witness diverges at step " + std::to_string(step) + ": " + detail), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace picsif
