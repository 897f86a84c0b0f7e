#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace modenergy {

/// Extended-precision real scalar. Precision (decimal digits) is selected at
/// runtime, process-global, and must be fixed before any value is created.
/// Arithmetic is deterministic: identical inputs at identical precision give
/// bit-identical results across runs.
using XReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                            boost::multiprecision::et_off>;

using XVec = std::vector<XReal>;

inline constexpr unsigned kMinPrecisionDigits = 16;
inline constexpr unsigned kDefaultPrecisionDigits = 120;

/// Sets the working precision in decimal digits for all subsequently created
/// values. Throws std::invalid_argument for digits < 16.
void set_working_precision(unsigned digits);

/// Current working precision in decimal digits.
unsigned working_precision();

/// Parses a signed decimal literal with optional exponent ("0.5", "-1e-3").
/// Throws std::invalid_argument on malformed input.
XReal parse_decimal(std::string_view text);

/// Formats at the given number of significant digits; digits == 0 emits
/// enough digits that parse_decimal(format_decimal(x)) == x exactly.
std::string format_decimal(const XReal& x, std::streamsize digits = 0);

/// y with y^n = x to within one ulp at working precision. Even n requires
/// x >= 0 (std::domain_error otherwise); n must be positive.
XReal nth_root(const XReal& x, unsigned n);

/// pi at working precision.
XReal pi_value();

}  // namespace modenergy
