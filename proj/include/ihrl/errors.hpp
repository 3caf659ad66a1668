#pragma once

#include <stdexcept>
#include <string>

namespace ihrl {

/// Invalid or inconsistent configuration (unknown layout, bad ranges, bad agent/experiment pair).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its contract (stepping a terminal state, unknown edge, ...).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Task generation could not satisfy the layout constraints.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A persisted file could not be parsed or failed validation.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ihrl
