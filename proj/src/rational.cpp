#include "ficds/rational.hpp"

#include "ficds/errors.hpp"
#include "ficds/roots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ficds {

RationalTF::RationalTF(Polynomial n, Polynomial d, double delay_s)
    : num(std::move(n)), den(std::move(d)), delay(delay_s) {
    if (den.is_zero())
        raise(Errc::division_by_zero, "rational transfer function with identically zero denominator");
    if (delay < 0.0)
        raise(Errc::invalid_argument, "negative delay");
}

RationalTF RationalTF::canonical() const {
    double lead = den.leading();
    RationalTF out = *this;
    out.num *= 1.0 / lead;
    out.den *= 1.0 / lead;
    return out;
}

std::complex<double> RationalTF::eval(std::complex<double> s) const {
    std::complex<double> d = den.eval(s);
    return num.eval(s) / d * std::exp(-s * delay);
}

namespace {

void require_no_delay(const RationalTF& a, const char* op) {
    if (a.delay != 0.0)
        raise(Errc::delay_not_expanded,
              std::string(op) + ": delay factor must be expanded with pade_delay first");
}

} // namespace

RationalTF rational_add(const RationalTF& a, const RationalTF& b) {
    require_no_delay(a, "rational_add");
    require_no_delay(b, "rational_add");
    return {a.num * b.den + b.num * a.den, a.den * b.den};
}

RationalTF rational_sub(const RationalTF& a, const RationalTF& b) {
    require_no_delay(a, "rational_sub");
    require_no_delay(b, "rational_sub");
    return {a.num * b.den - b.num * a.den, a.den * b.den};
}

RationalTF rational_mul(const RationalTF& a, const RationalTF& b) {
    return {a.num * b.num, a.den * b.den, a.delay + b.delay};
}

RationalTF rational_inv(const RationalTF& a) {
    if (a.num.is_zero())
        raise(Errc::division_by_zero, "rational_inv: numerator is identically zero");
    if (a.delay != 0.0)
        raise(Errc::delay_not_expanded, "rational_inv: cannot invert a pure delay factor");
    return {a.den, a.num};
}

RationalTF pade_delay(double tau, int order) {
    if (tau < 0.0)
        raise(Errc::invalid_argument, "pade_delay: tau must be >= 0");
    if (order < 1)
        raise(Errc::invalid_argument, "pade_delay: order must be >= 1");
    if (tau == 0.0)
        return RationalTF::constant(1.0);
    const std::size_t m = static_cast<std::size_t>(order);
    // c_k = (2m-k)! m! / ((2m)! k! (m-k)!) via the stable ratio recurrence
    std::vector<double> num(m + 1), den(m + 1);
    double c = 1.0;
    double tp = 1.0; // tau^k
    for (std::size_t k = 0; k <= m; ++k) {
        den[k] = c * tp;
        num[k] = (k % 2 == 0) ? den[k] : -den[k];
        c *= static_cast<double>(m - k) /
             (static_cast<double>(2 * m - k) * static_cast<double>(k + 1));
        tp *= tau;
    }
    return {Polynomial(std::move(num)), Polynomial(std::move(den))};
}

std::vector<std::complex<double>> freq_response(const RationalTF& tf,
                                                std::span<const double> omegas) {
    std::vector<std::complex<double>> out;
    out.reserve(omegas.size());
    for (double w : omegas) {
        const std::complex<double> jw(0.0, w);
        const std::complex<double> d = tf.den.eval(jw);
        if (d == std::complex<double>(0.0, 0.0)) {
            std::ostringstream msg;
            msg << "freq_response: denominator vanishes exactly at omega = " << w << " rad/s";
            raise(Errc::pole_hit, msg.str());
        }
        out.push_back(tf.num.eval(jw) / d * std::polar(1.0, -w * tf.delay));
    }
    return out;
}

RationalTF reduce(const RationalTF& tf, double tol, double* err_bound) {
    if (tol < 0.0)
        raise(Errc::invalid_argument, "reduce: tol must be >= 0");
    if (err_bound)
        *err_bound = 0.0;
    if (tol == 0.0 || tf.num.degree() < 1 || tf.den.degree() < 1)
        return tf;

    auto zn = poly_roots(tf.num).roots;
    auto zd = poly_roots(tf.den).roots;
    std::vector<bool> keep_n(zn.size(), true), keep_d(zd.size(), true);
    for (std::size_t i = 0; i < zd.size(); ++i) {
        std::size_t best = zn.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < zn.size(); ++j) {
            if (!keep_n[j])
                continue;
            double d = std::abs(zn[j] - zd[i]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best < zn.size() && best_d <= tol * std::max(1.0, std::abs(zd[i]))) {
            keep_n[best] = false;
            keep_d[i] = false;
        }
    }
    std::vector<std::complex<double>> rn, rd;
    for (std::size_t j = 0; j < zn.size(); ++j)
        if (keep_n[j])
            rn.push_back(zn[j]);
    for (std::size_t i = 0; i < zd.size(); ++i)
        if (keep_d[i])
            rd.push_back(zd[i]);
    if (rn.size() == zn.size())
        return tf; // nothing cancelled

    RationalTF out{polynomial_from_roots(tf.num.leading(), rn),
                   polynomial_from_roots(tf.den.leading(), rd), tf.delay};
    if (err_bound) {
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            double w = std::pow(10.0, -1.0 + 6.0 * k / 9.0); // 0.1 .. 1e5 rad/s
            std::complex<double> jw(0.0, w);
            std::complex<double> a = tf.num.eval(jw) / tf.den.eval(jw);
            std::complex<double> b = out.num.eval(jw) / out.den.eval(jw);
            double scale = std::max(std::abs(a), 1e-300);
            worst = std::max(worst, std::abs(a - b) / scale);
        }
        *err_bound = worst;
    }
    return out;
}

} // namespace ficds
