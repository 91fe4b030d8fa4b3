#include "wtgrid/types.hpp"

#include <algorithm>
#include <cctype>

namespace wtgrid {

std::string to_string_u128(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v) {
        s.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

static u128 gcd128(u128 a, u128 b) {
    while (b) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational Rational::make(u128 num, u128 den) {
    if (den == 0) throw Error(Errc::invalid_argument, "zero denominator");
    u128 g = gcd128(num, den);
    if (g == 0) g = 1;
    return {num / g, den / g};
}

namespace {

uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.size() > 18 || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw Error(Errc::invalid_argument, "bad number '" + s + "'");
    return std::stoull(s);
}

}  // namespace

Fraction Fraction::parse(const std::string& s) {
    Fraction f;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        f.num = parse_u64(s.substr(0, slash));
        f.den = parse_u64(s.substr(slash + 1));
    } else if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
        if (frac.empty() || frac.size() > 15) throw Error(Errc::invalid_argument, "bad fraction '" + s + "'");
        f.den = 1;
        for (size_t i = 0; i < frac.size(); ++i) f.den *= 10;
        f.num = (whole.empty() ? 0 : parse_u64(whole)) * f.den + parse_u64(frac);
    } else {
        throw Error(Errc::invalid_argument, "fraction must look like 0.25 or 1/4");
    }
    if (f.den == 0 || f.num == 0 || f.num >= f.den) throw Error(Errc::invalid_argument, "alpha must lie in (0,1)");
    uint64_t g = std::gcd(f.num, f.den);
    f.num /= g;
    f.den /= g;
    return f;
}

Direction parse_direction(const std::string& s) {
    std::string l;
    for (char c : s) l.push_back(char(std::tolower(static_cast<unsigned char>(c))));
    if (l == "ne") return Direction::NE;
    if (l == "nw") return Direction::NW;
    if (l == "se") return Direction::SE;
    if (l == "sw") return Direction::SW;
    throw Error(Errc::invalid_argument, "direction must be one of ne, nw, se, sw");
}

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::NE: return "ne";
        case Direction::NW: return "nw";
        case Direction::SE: return "se";
        case Direction::SW: return "sw";
    }
    return "?";
}

}  // namespace wtgrid
