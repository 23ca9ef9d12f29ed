#include "symbreak/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace symbreak {

namespace {
int sat_add(int a, int b) {
    const long s = static_cast<long>(a) + b;
    if (s >= Series::kExact) return Series::kExact;
    if (s <= -Series::kExact) return -Series::kExact;
    return static_cast<int>(s);
}
}  // namespace

Series::Series(double a) {
    if (a != 0.0) {
        lo_ = 0;
        c_ = {a};
    }
}

Series Series::monomial(double a, int exponent) {
    Series s;
    if (a != 0.0) {
        s.lo_ = exponent;
        s.c_ = {a};
    }
    return s;
}

void Series::trim() {
    std::size_t lead = 0;
    while (lead < c_.size() && c_[lead] == 0.0) ++lead;
    if (lead > 0) {
        c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
        lo_ += static_cast<int>(lead);
    }
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    // enforce the window and length cap
    if (!c_.empty() && hi_ < lo_ + static_cast<int>(c_.size()) - 1) {
        const int keep = hi_ - lo_ + 1;
        if (keep <= 0)
            c_.clear();
        else
            c_.resize(static_cast<std::size_t>(keep));
    }
    if (static_cast<int>(c_.size()) > kMaxLen) {
        c_.resize(kMaxLen);
        hi_ = std::min(hi_, lo_ + kMaxLen - 1);
    }
    if (c_.empty()) lo_ = 0;
}

int Series::valuation() const {
    if (c_.empty())
        throw domain_error("series valuation of the zero series");
    return lo_;
}

double Series::coeff(int e) const {
    if (e > hi_)
        throw domain_error("series coefficient s^" + std::to_string(e) +
                           " is beyond the accuracy window (hi=" + std::to_string(hi_) + ")");
    if (c_.empty() || e < lo_ || e >= lo_ + static_cast<int>(c_.size())) return 0.0;
    return c_[static_cast<std::size_t>(e - lo_)];
}

Series& Series::operator+=(const Series& o) {
    const int nhi = std::min(hi_, o.hi_);
    if (o.c_.empty()) {
        hi_ = nhi;
        trim();
        return *this;
    }
    if (c_.empty()) {
        *this = o;
        hi_ = nhi;
        trim();
        return *this;
    }
    const int nlo = std::min(lo_, o.lo_);
    const int top = std::min(nhi, std::max(lo_ + static_cast<int>(c_.size()),
                                           o.lo_ + static_cast<int>(o.c_.size())) -
                                      1);
    std::vector<double> nc(static_cast<std::size_t>(std::max(0, top - nlo + 1)), 0.0);
    for (int e = nlo; e <= top; ++e) {
        double v = 0.0;
        if (e >= lo_ && e < lo_ + static_cast<int>(c_.size())) v += c_[e - lo_];
        if (e >= o.lo_ && e < o.lo_ + static_cast<int>(o.c_.size())) v += o.c_[e - o.lo_];
        nc[e - nlo] = v;
    }
    lo_ = nlo;
    hi_ = nhi;
    c_ = std::move(nc);
    trim();
    return *this;
}

Series& Series::operator-=(const Series& o) { return *this += (-o); }

Series operator-(const Series& a) {
    Series r = a;
    for (double& v : r.c_) v = -v;
    return r;
}

Series operator*(const Series& a, double b) {
    Series r = a;
    if (b == 0.0) {
        r.c_.clear();
        r.lo_ = 0;
        return r;
    }
    for (double& v : r.c_) v *= b;
    return r;
}

Series operator*(const Series& a, const Series& b) {
    Series r;
    if (a.c_.empty() || b.c_.empty()) {
        // exact zero if either factor is exactly zero within its window; the
        // window of the product is still limited by the factors'
        r.hi_ = (a.c_.empty() && a.hi_ == Series::kExact) || (b.c_.empty() && b.hi_ == Series::kExact)
                    ? std::min(a.hi_ == Series::kExact && a.c_.empty() ? Series::kExact : a.hi_,
                               b.hi_ == Series::kExact && b.c_.empty() ? Series::kExact : b.hi_)
                    : std::min(a.hi_, b.hi_);
        return r;
    }
    r.lo_ = sat_add(a.lo_, b.lo_);
    r.hi_ = std::min(sat_add(a.hi_, b.lo_), sat_add(b.hi_, a.lo_));
    const int len = std::min<int>(Series::kMaxLen, r.hi_ - r.lo_ + 1);
    if (len <= 0) {
        r.c_.clear();
        return r;
    }
    r.c_.assign(static_cast<std::size_t>(len), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.c_.size(); ++j) {
            const int e = a.lo_ + static_cast<int>(i) + b.lo_ + static_cast<int>(j);
            const int idx = e - r.lo_;
            if (idx >= 0 && idx < len) r.c_[idx] += a.c_[i] * b.c_[j];
        }
    }
    r.trim();
    return r;
}

Series recip(const Series& a) {
    if (a.c_.empty()) throw domain_error("series reciprocal of zero");
    Series b = a;
    b.trim();
    const double lead = b.c_[0];
    if (lead == 0.0) throw domain_error("series reciprocal of zero leading coefficient");
    const int k = b.lo_;
    // g satisfies b g = 1; g known through hi(b) - 2k
    Series r;
    r.lo_ = -k;
    r.hi_ = std::min(sat_add(b.hi_, -2 * k), Series::kExact);
    const int len = std::min<int>(Series::kMaxLen, r.hi_ - r.lo_ + 1);
    if (len <= 0) throw domain_error("series reciprocal: empty accuracy window");
    r.c_.assign(static_cast<std::size_t>(len), 0.0);
    r.c_[0] = 1.0 / lead;
    for (int n = 1; n < len; ++n) {
        double s = 0.0;
        for (int j = 1; j <= n && j < static_cast<int>(b.c_.size()); ++j)
            s += b.c_[j] * r.c_[n - j];
        r.c_[n] = -s / lead;
    }
    r.trim();
    return r;
}

Series operator/(const Series& a, const Series& b) { return a * recip(b); }

Series Series::derivative() const {
    Series r;
    if (c_.empty()) {
        r.hi_ = sat_add(hi_, -1);
        return r;
    }
    r.lo_ = lo_ - 1;
    r.hi_ = sat_add(hi_, -1);
    r.c_.assign(c_.size(), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        r.c_[i] = c_[i] * static_cast<double>(lo_ + static_cast<int>(i));
    r.trim();
    return r;
}

Series Series::integral() const {
    Series r;
    if (c_.empty()) {
        r.hi_ = sat_add(hi_, 1);
        return r;
    }
    if (lo_ <= -1 && coeff(-1) != 0.0)
        throw domain_error("series integral: s^{-1} term present");
    r.lo_ = lo_ + 1;
    r.hi_ = sat_add(hi_, 1);
    r.c_.assign(c_.size(), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        const int e = lo_ + static_cast<int>(i);
        if (e == -1) continue;
        r.c_[i] = c_[i] / static_cast<double>(e + 1);
    }
    r.trim();
    return r;
}

Series sqrt(const Series& a) {
    if (a.c_.empty()) return Series();
    Series b = a;
    b.trim();
    if (b.lo_ % 2 != 0)
        throw domain_error("series sqrt: odd valuation (" + std::to_string(b.lo_) + ")");
    if (b.c_[0] <= 0.0)
        throw domain_error("series sqrt: non-positive leading coefficient");
    const int k = b.lo_ / 2;
    Series r;
    r.lo_ = k;
    r.hi_ = std::min(sat_add(b.hi_, -k), Series::kExact);
    const int len = std::min<int>(Series::kMaxLen, r.hi_ - r.lo_ + 1);
    if (len <= 0) throw domain_error("series sqrt: empty accuracy window");
    r.c_.assign(static_cast<std::size_t>(len), 0.0);
    r.c_[0] = std::sqrt(b.c_[0]);
    // r^2 = b, solved order by order
    for (int n = 1; n < len; ++n) {
        double s = (n < static_cast<int>(b.c_.size())) ? b.c_[n] : 0.0;
        for (int j = 1; j < n; ++j) s -= r.c_[j] * r.c_[n - j];
        r.c_[n] = s / (2.0 * r.c_[0]);
    }
    r.trim();
    return r;
}

void angle_from_cos(const Series& c, Series& theta, Series& sine) {
    constexpr double pi = 3.14159265358979323846;
    if (c.is_zero()) {
        theta = Series(pi / 2.0);
        sine = Series(1.0);
        // windows inherited from the argument
        return;
    }
    if (c.valuation() < 0)
        throw domain_error("angle_from_cos: cosine series with negative valuation");
    const double c0 = c.coeff(0);
    if (std::fabs(c0) > 1.0 + 1e-9)
        throw domain_error("angle_from_cos: |cos| > 1 at the series base point");

    sine = sqrt(1.0 - c * c);
    const Series dc = c.derivative();
    Series integrand = -dc / sine;
    theta = Series(std::acos(std::clamp(c0, -1.0, 1.0))) + integrand.integral();
}

}  // namespace symbreak
