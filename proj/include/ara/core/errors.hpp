#pragma once

#include <stdexcept>
#include <string>

namespace ara {

// Malformed graph or document (dangling ids, duplicate ids, bad domains).
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reduction requested out of path order.
struct OrderingError : std::logic_error {
  using std::logic_error::logic_error;
};

// A utility that must be strictly positive was not.
struct PositivityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientSamplesError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BindingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DependencyError : std::runtime_error {
  DependencyError(std::string stage, const std::string& what)
      : std::runtime_error(what), missing_stage(std::move(stage)) {}
  std::string missing_stage;
};

}  // namespace ara
