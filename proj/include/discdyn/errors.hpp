#pragma once

#include <stdexcept>
#include <string>

namespace discdyn {

/// Reasons an operation can reject its input or fail to produce a result.
enum class Errc {
  input_error,               ///< source stream unreadable
  empty_input,               ///< nothing parseable / empty collection
  requires_steady_state,     ///< series must be complete to read the gain
  insufficient_data,         ///< fewer replies than the method needs
  degenerate_crossing,       ///< two-point levels collapse onto one instant
  numerical_failure,         ///< non-finite objective or unstable solve
  degenerate_normalization,  ///< every logistic point hit the clamp bounds
  insufficient_support,      ///< fewer than 3 usable histogram bins
  invalid_argument,          ///< parameter outside its documented domain
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::input_error: return "input_error";
    case Errc::empty_input: return "empty_input";
    case Errc::requires_steady_state: return "requires_steady_state";
    case Errc::insufficient_data: return "insufficient_data";
    case Errc::degenerate_crossing: return "degenerate_crossing";
    case Errc::numerical_failure: return "numerical_failure";
    case Errc::degenerate_normalization: return "degenerate_normalization";
    case Errc::insufficient_support: return "insufficient_support";
    case Errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace discdyn
