#pragma once

// Exact rational arithmetic and decimal-string (de)serialization.
//
// All weights, compliance values, scores, gains and costs are exact
// rationals end to end, so published totals reproduce bit-exactly.
// Serialization contract: a value whose denominator is 2^a*5^b is written
// as a plain decimal without trailing zeros ("102.5", "15", "0.125");
// anything else falls back to the explicit fraction form "p/q", which the
// parser also accepts.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace plopt {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Thrown for malformed input data (files, numbers, unknown ids).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Parses "12", "-0.25", "3." , ".5" or "p/q". Throws DataError on junk.
inline Rat parse_rational(std::string_view text) {
    const std::string original(text);
    auto fail = [&original]() -> Rat {
        throw DataError("not a number: '" + original + "'");
    };

    bool negative = false;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
        negative = text[0] == '-';
        text.remove_prefix(1);
    }
    if (text.empty()) return fail();

    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        // fraction form: integer / positive integer
        std::string_view num = text.substr(0, slash);
        std::string_view den = text.substr(slash + 1);
        if (num.empty() || den.empty()) return fail();
        for (char c : num)
            if (!std::isdigit(static_cast<unsigned char>(c))) return fail();
        for (char c : den)
            if (!std::isdigit(static_cast<unsigned char>(c))) return fail();
        BigInt n{std::string(num)};
        BigInt d{std::string(den)};
        if (d == 0) throw DataError("zero denominator: '" + original + "'");
        Rat r(n, d);
        return negative ? Rat(-r) : r;
    }

    auto dot = text.find('.');
    std::string_view int_part = text.substr(0, dot == std::string_view::npos ? text.size() : dot);
    std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) return fail();
    for (char c : int_part)
        if (!std::isdigit(static_cast<unsigned char>(c))) return fail();
    for (char c : frac_part)
        if (!std::isdigit(static_cast<unsigned char>(c))) return fail();

    BigInt n = int_part.empty() ? BigInt(0) : BigInt(std::string(int_part));
    BigInt scale = 1;
    for (char c : frac_part) {
        n = n * 10 + (c - '0');
        scale *= 10;
    }
    Rat r(n, scale);
    return negative ? Rat(-r) : r;
}

// Exact decimal rendering without trailing zeros; "p/q" when the
// denominator has a prime factor other than 2 and 5.
inline std::string format_rational(const Rat& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);  // canonical: den > 0
    bool negative = num < 0;
    if (negative) num = -num;

    BigInt d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) {
        std::string s = num.str() + "/" + den.str();
        return negative ? "-" + s : s;
    }

    // scale to 10^k, k = max(twos, fives)
    int k = twos > fives ? twos : fives;
    for (int i = twos; i < k; ++i) num *= 2;
    for (int i = fives; i < k; ++i) num *= 5;
    std::string digits = num.str();
    if (static_cast<int>(digits.size()) <= k)
        digits.insert(0, k + 1 - digits.size(), '0');
    std::string int_part = digits.substr(0, digits.size() - k);
    std::string frac_part = digits.substr(digits.size() - k);
    while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
    std::string s = negative ? "-" + int_part : int_part;
    if (!frac_part.empty()) s += "." + frac_part;
    return s;
}

}  // namespace plopt
