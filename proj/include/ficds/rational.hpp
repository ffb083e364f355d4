#pragma once

#include "ficds/polynomial.hpp"

#include <complex>
#include <span>
#include <vector>

namespace ficds {

inline constexpr double kPi = 3.14159265358979323846;

/// Rational transfer function num(s)/den(s) * e^{-delay*s}. The delay factor
/// is carried symbolically; operations that cannot represent it reject it
/// until it has been rationalized with pade_delay().
struct RationalTF {
    Polynomial num{0.0};
    Polynomial den{1.0};
    double delay = 0.0; // seconds

    RationalTF() = default;
    RationalTF(Polynomial n, Polynomial d, double delay_s = 0.0);

    static RationalTF constant(double k) { return {Polynomial{k}, Polynomial{1.0}}; }

    /// Scale num and den so the denominator is monic.
    [[nodiscard]] RationalTF canonical() const;

    /// Value at a general complex point, delay applied as e^{-s*delay}.
    [[nodiscard]] std::complex<double> eval(std::complex<double> s) const;
};

RationalTF rational_add(const RationalTF& a, const RationalTF& b);
RationalTF rational_sub(const RationalTF& a, const RationalTF& b);
RationalTF rational_mul(const RationalTF& a, const RationalTF& b);
RationalTF rational_inv(const RationalTF& a);

inline RationalTF operator+(const RationalTF& a, const RationalTF& b) { return rational_add(a, b); }
inline RationalTF operator-(const RationalTF& a, const RationalTF& b) { return rational_sub(a, b); }
inline RationalTF operator*(const RationalTF& a, const RationalTF& b) { return rational_mul(a, b); }

/// Diagonal [order/order] Pade approximant of e^{-tau*s}. All-pass by
/// construction: num(s) = den(-s). tau = 0 yields the identity.
RationalTF pade_delay(double tau, int order);

/// tf(j*omega) for each frequency; the delay factor is applied exactly as
/// e^{-j*omega*tau}, not through an approximant. Throws pole_hit if the
/// denominator evaluates to exactly zero at some omega.
std::vector<std::complex<double>> freq_response(const RationalTF& tf,
                                                std::span<const double> omegas);

/// Cancel numerator/denominator root pairs closer than tol (relative to the
/// root magnitude). tol = 0 returns the input unchanged. If err_bound is
/// given it receives the max relative deviation sampled over probe
/// frequencies. Never applied automatically anywhere in the verdict path.
RationalTF reduce(const RationalTF& tf, double tol, double* err_bound = nullptr);

} // namespace ficds
