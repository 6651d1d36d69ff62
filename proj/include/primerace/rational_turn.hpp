#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>

namespace primerace {

// A root of unity stored exactly as a rational fraction of a full turn,
// canonicalized to num/den with 0 <= num < den, den >= 1, gcd(num,den) = 1.
// Multiplying two roots of unity is addition of turns mod 1, which stays
// exact in integers; conversion to complex happens only at the boundary of
// analytic computations.
struct RationalTurn {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static RationalTurn of(std::int64_t n, std::int64_t d) {
        RationalTurn t;
        n %= d;
        if (n < 0) n += d;
        const std::int64_t g = std::gcd(n, d);
        t.num = n / g;
        t.den = d / g;
        return t;
    }

    friend RationalTurn operator+(RationalTurn a, RationalTurn b) {
        const std::int64_t g = std::gcd(a.den, b.den);
        const std::int64_t d = a.den / g * b.den;
        return of(a.num * (d / a.den) + b.num * (d / b.den), d);
    }

    friend RationalTurn operator-(RationalTurn a, RationalTurn b) {
        const std::int64_t g = std::gcd(a.den, b.den);
        const std::int64_t d = a.den / g * b.den;
        return of(a.num * (d / a.den) - b.num * (d / b.den), d);
    }

    RationalTurn scaled(std::int64_t m) const { return of(num * m, den); }
    RationalTurn conjugated() const { return of(-num, den); }

    bool operator==(const RationalTurn&) const = default;

    bool is_one() const { return num == 0; }          // value +1
    bool is_minus_one() const { return 2 * num == den; }
    bool is_real() const { return is_one() || is_minus_one(); }

    std::complex<double> to_complex() const {
        if (is_one()) return {1.0, 0.0};
        if (is_minus_one()) return {-1.0, 0.0};
        if (4 * num == den) return {0.0, 1.0};
        if (4 * num == 3 * den) return {0.0, -1.0};
        const double a = 2.0 * std::numbers::pi * static_cast<double>(num) /
                         static_cast<double>(den);
        return {std::cos(a), std::sin(a)};
    }
};

}  // namespace primerace
