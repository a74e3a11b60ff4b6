#include "walkforge/rational.hpp"

#include <cctype>

namespace walkforge {

namespace {

bool is_integer_token(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

Int parse_int_token(const std::string& s) {
    if (!is_integer_token(s)) throw std::invalid_argument("malformed integer: '" + s + "'");
    return Int(s);
}

}  // namespace

Rat parse_rational(const std::string& text) {
    const auto caret = text.find('^');
    if (caret != std::string::npos) {
        const Int base = parse_int_token(text.substr(0, caret));
        std::string exp_s = text.substr(caret + 1);
        bool neg = false;
        if (!exp_s.empty() && exp_s[0] == '-') {
            neg = true;
            exp_s = exp_s.substr(1);
        }
        const Int exp = parse_int_token(exp_s);
        if (exp < 0 || exp > 4096) throw std::invalid_argument("exponent out of range: " + text);
        if (base == 0 && neg) throw std::invalid_argument("zero base with negative exponent");
        Int p = 1;
        for (Int i = 0; i < exp; ++i) p *= base;
        return neg ? Rat(1, p) : Rat(p);
    }
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const Int num = parse_int_token(text.substr(0, slash));
        const Int den = parse_int_token(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        return Rat(num, den);
    }
    return Rat(parse_int_token(text));
}

Int parse_integer_expr(const std::string& text) {
    const Rat r = parse_rational(text);
    if (denominator(r) != 1) throw std::invalid_argument("expected an integer, got: " + text);
    return numerator(r);
}

double to_double(const Rat& r) { return r.convert_to<double>(); }

std::string rational_to_string(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace walkforge
