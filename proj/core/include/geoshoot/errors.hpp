#pragma once

#include <stdexcept>
#include <string>

namespace geoshoot {

/// Raised when an integration produces non-finite values.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(const std::string& what, int time_node)
      : std::runtime_error(what + " (time node " + std::to_string(time_node) + ")"),
        time_node_(time_node) {}

  int time_node() const noexcept { return time_node_; }

 private:
  int time_node_;
};

/// Malformed image or field file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called with a cache or object in the wrong state.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace geoshoot
