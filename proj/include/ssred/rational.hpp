#ifndef SSRED_RATIONAL_HPP
#define SSRED_RATIONAL_HPP

#include <boost/rational.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssred {

/// Exact rational arithmetic for marking positions. Boost keeps values in
/// lowest terms with a positive denominator, which is exactly the "p/q,
/// q >= 1" convention of the file formats.
using Rational = boost::rational<std::int64_t>;

inline bool is_integral(const Rational& r) { return r.denominator() == 1; }

inline std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Accepts "p/q" or a bare integer "p".
inline Rational parse_rational(const std::string& text) {
    auto parse_int = [](const std::string& s) -> std::int64_t {
        std::size_t used = 0;
        std::int64_t v = std::stoll(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("malformed rational: '" + s + "'");
        }
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string::npos) {
        return Rational(parse_int(text), 1);
    }
    std::int64_t num = parse_int(text.substr(0, slash));
    std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) {
        throw std::invalid_argument("zero denominator in rational: '" + text + "'");
    }
    return Rational(num, den);
}

} // namespace ssred

#endif // SSRED_RATIONAL_HPP
