#pragma once

#include <stdexcept>
#include <string>

namespace bnnmi {

// Argument outside an operation's mathematical domain (x <= 0 for log-gamma,
// negative concentration, point off the simplex, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Class index outside [0, C).
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Every class was flagged degenerate, or too few classes remain to estimate.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite value appeared during fixed-point estimation.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or invalid training input.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (CSV rows, comma-separated lists, config values).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure reading or writing a file; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bnnmi
