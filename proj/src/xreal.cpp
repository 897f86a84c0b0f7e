#include "modenergy/xreal.hpp"

#include <cctype>
#include <stdexcept>

namespace modenergy {

namespace {

// Establish the 120-digit default before anything else in this library runs.
const bool default_precision_set = [] {
  XReal::default_precision(kDefaultPrecisionDigits);
  return true;
}();

bool valid_decimal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t mantissa_digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++mantissa_digits;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++mantissa_digits;
    }
  }
  if (mantissa_digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++exp_digits;
    }
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

}  // namespace

void set_working_precision(unsigned digits) {
  if (digits < kMinPrecisionDigits) {
    throw std::invalid_argument("working precision must be at least " +
                                std::to_string(kMinPrecisionDigits) + " digits, got " +
                                std::to_string(digits));
  }
  XReal::default_precision(digits);
}

unsigned working_precision() { return XReal::default_precision(); }

XReal parse_decimal(std::string_view text) {
  if (!valid_decimal(text)) {
    throw std::invalid_argument("not a decimal literal: \"" + std::string(text) + "\"");
  }
  return XReal(std::string(text));
}

std::string format_decimal(const XReal& x, std::streamsize digits) {
  return x.str(digits, digits == 0 ? std::ios_base::fmtflags(0) : std::ios_base::scientific);
}

XReal nth_root(const XReal& x, unsigned n) {
  if (n == 0) throw std::invalid_argument("nth_root: n must be positive");
  if (n % 2 == 0 && x < 0) {
    throw std::domain_error("nth_root: negative radicand with even index");
  }
  XReal result;
  mpfr_rootn_ui(result.backend().data(), x.backend().data(), n, MPFR_RNDN);
  return result;
}

XReal pi_value() {
  XReal result;
  mpfr_const_pi(result.backend().data(), MPFR_RNDN);
  return result;
}

}  // namespace modenergy
