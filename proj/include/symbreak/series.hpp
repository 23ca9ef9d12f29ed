#pragma once

#include <vector>

#include "symbreak/errors.hpp"

namespace symbreak {

// Truncated Laurent series in a formal variable s (in practice s = d^{-1/kappa}).
// Coefficients are doubles; exponents are integers and may be negative (d
// itself is s^{-kappa}). Each series carries the window [valuation, hi] on
// which its coefficients are trustworthy, so order bookkeeping survives
// multiplication by negative powers and the global length cap.
class Series {
public:
    static constexpr int kExact = 1 << 20;  // "known to all orders" sentinel
    static constexpr int kMaxLen = 64;

    Series() = default;                       // exact zero
    Series(double a);                         // NOLINT: constant, implicit by design
    static Series monomial(double a, int exponent);

    bool is_zero() const { return c_.empty(); }
    int valuation() const;   // exponent of first nonzero stored coefficient
    int hi() const { return hi_; }

    // Coefficient of s^e; throws when e lies beyond the accuracy window.
    double coeff(int e) const;

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);

    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator-(const Series& a);
    friend Series operator*(const Series& a, const Series& b);
    friend Series operator/(const Series& a, const Series& b);

    friend Series operator+(Series a, double b) { return a += Series(b); }
    friend Series operator+(double b, Series a) { return a += Series(b); }
    friend Series operator-(Series a, double b) { return a -= Series(b); }
    friend Series operator-(double b, const Series& a) { return Series(b) - a; }
    friend Series operator*(const Series& a, double b);
    friend Series operator*(double b, const Series& a) { return a * b; }
    friend Series operator/(const Series& a, double b) { return a * (1.0 / b); }
    friend Series operator/(double b, const Series& a) { return Series(b) / a; }

    Series derivative() const;
    Series integral() const;  // antiderivative vanishing at 0; no s^{-1} term allowed

    friend Series sqrt(const Series& a);   // valuation must be even, leading > 0
    friend Series recip(const Series& a);

private:
    void trim();
    int lo_ = 0;
    int hi_ = kExact;
    std::vector<double> c_;  // exponent lo_ + i
};

// theta = acos(c) and sin(theta) for a series cosine. Handles both the
// interior case |c(0)| < 1 and the tangent case c(0) = +-1, where the result
// picks up the square-root branch (the argument's deviation from +-1 must
// have even valuation).
void angle_from_cos(const Series& c, Series& theta, Series& sine);

}  // namespace symbreak
