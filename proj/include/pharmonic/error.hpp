#pragma once

#include <stdexcept>
#include <string>

namespace pharmonic {

enum class Errc {
  invalid_parameter,
  non_finite,
  singular_multiplier,
  truncation,
  domain,
  singular_evaluation,
  quadrature_failure,
  inadmissible_exponent,
  unknown_suite,
  config_validation,
  io,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::non_finite: return "non-finite";
    case Errc::singular_multiplier: return "singular-multiplier";
    case Errc::truncation: return "truncation";
    case Errc::domain: return "domain";
    case Errc::singular_evaluation: return "singular-evaluation";
    case Errc::quadrature_failure: return "quadrature-failure";
    case Errc::inadmissible_exponent: return "inadmissible-exponent";
    case Errc::unknown_suite: return "unknown-suite";
    case Errc::config_validation: return "config-validation";
    case Errc::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace pharmonic
