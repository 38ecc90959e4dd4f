#pragma once

#include <stdexcept>
#include <string>

namespace ppsim {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Text could not be parsed; `pos` is a byte offset into the input.
struct parse_error : error {
  parse_error(const std::string& msg, std::size_t pos)
      : error(msg + " (at offset " + std::to_string(pos) + ")"), pos(pos) {}
  std::size_t pos;
};

// Arithmetic evaluation failed (unbound variable, unknown functor).
struct eval_error : error {
  using error::error;
};

// An effect rule or expectation rule is malformed or unsafe.
struct rule_error : error {
  using error::error;
};

// A query addressed a tick outside the recorded narrative.
struct query_error : error {
  using error::error;
};

// Bad scenario configuration; the message names the offending field.
struct config_error : error {
  using error::error;
};

}  // namespace ppsim
