#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selectkit {

// Base for every error the library raises. Callers that only need a
// message can catch this; the subclasses carry structured context.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (empty word, bad shape, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class CycleError : public Error {
 public:
  explicit CycleError(const std::string& chain)
      : Error("hierarchy cycle: " + chain), chain_(chain) {}
  const std::string& chain() const noexcept { return chain_; }

 private:
  std::string chain_;
};

class BackendError : public Error {
 public:
  BackendError(const std::string& what, int attempts)
      : Error(what + " after " + std::to_string(attempts) + " attempt(s)"),
        attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

// LLM output without a recognizable list; raw text is kept for diagnosis.
class UnparseableCompletion : public Error {
 public:
  explicit UnparseableCompletion(std::string raw)
      : Error("no recognizable list in completion: " + raw.substr(0, 200)),
        raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class NoValidCandidates : public Error {
 public:
  NoValidCandidates() : Error("no valid candidates") {}
};

class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double conditioning)
      : Error(what + " (smallest eigenvalue " + std::to_string(conditioning) + ")"),
        conditioning_(conditioning) {}
  double conditioning() const noexcept { return conditioning_; }

 private:
  double conditioning_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double grad_norm)
      : Error(what + " (gradient norm " + std::to_string(grad_norm) + ")"),
        grad_norm_(grad_norm) {}
  double gradient_norm() const noexcept { return grad_norm_; }

 private:
  double grad_norm_;
};

class CacheConflict : public Error {
 public:
  using Error::Error;
};

class CorruptCacheEntry : public Error {
 public:
  CorruptCacheEntry(const std::string& what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Wraps a failure inside one phase of the mining pipeline.
class PhaseError : public Error {
 public:
  PhaseError(std::string phase, const std::string& inner)
      : Error(phase + ": " + inner), phase_(std::move(phase)) {}
  const std::string& phase() const noexcept { return phase_; }

 private:
  std::string phase_;
};

}  // namespace selectkit
