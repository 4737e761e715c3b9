#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace basisid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parse failure in a dataset, config or model file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A loaded object would violate a type invariant; `invariant` names it.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& invariant)
      : Error("invariant violated: " + invariant), invariant_(invariant) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// A simulated or filtered state became non-finite. `time` is 0-based;
/// `iteration` is the PSAEM iteration (0 outside the EM driver).
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t time, std::size_t iteration = 0)
      : Error(message(time, iteration)), time_(time), iteration_(iteration) {}
  std::size_t time() const noexcept { return time_; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  static std::string message(std::size_t time, std::size_t iteration) {
    std::string s = "non-finite state at time index " + std::to_string(time);
    if (iteration) s += " in iteration " + std::to_string(iteration);
    return s;
  }
  std::size_t time_;
  std::size_t iteration_;
};

class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& equation, std::size_t row)
      : Error("singular regression system for " + equation + " row " + std::to_string(row) +
              "; add regularization (nonzero prior precision) or reduce the basis size"),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class DegenerateWeights : public Error {
 public:
  DegenerateWeights() : Error("all particle weights are zero or non-finite") {}
};

}  // namespace basisid
