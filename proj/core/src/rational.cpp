#include "brwlab/rational.hpp"

#include <sstream>

namespace brwlab {

namespace {

// decimal digits with optional sign; leading zeros are stripped so the
// cpp_int parser never sees an octal-looking literal
BigInt parse_decimal_int(std::string s, const std::string& original) {
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s.erase(0, 1);
    }
    std::size_t nz = s.find_first_not_of('0');
    s = (nz == std::string::npos) ? "0" : s.substr(nz);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("bad number '" + original + "'");
    BigInt v(s);
    return neg ? -v : v;
}

} // namespace

Rational rational_from_string(const std::string& text) {
    if (text.empty()) throw ConfigError("empty number");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num = parse_decimal_int(text.substr(0, slash), text);
        BigInt den = parse_decimal_int(text.substr(slash + 1), text);
        if (den == 0) throw ConfigError("zero denominator in '" + text + "'");
        return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_decimal_int(text, text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t places = text.size() - dot - 1;
    BigInt den = 1;
    for (std::size_t i = 0; i < places; ++i) den *= 10;
    return Rational(parse_decimal_int(digits, text), den);
}

std::string rational_to_string(const Rational& q) {
    std::ostringstream os;
    os << numerator(q);
    if (denominator(q) != 1) os << '/' << denominator(q);
    return os.str();
}

} // namespace brwlab
