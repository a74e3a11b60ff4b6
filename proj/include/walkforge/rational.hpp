#pragma once

#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace walkforge {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

// Accepted forms: "a/b", plain integers, and "2^k" / "2^-k" (any base works,
// e.g. "10^6"). No floating point anywhere: w and theta stay exact.
Rat parse_rational(const std::string& text);

// Integer-valued variant for group sizes ("2^80", "1048576").
Int parse_integer_expr(const std::string& text);

double to_double(const Rat& r);

std::string rational_to_string(const Rat& r);

}  // namespace walkforge
