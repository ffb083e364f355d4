#include "ficds/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace ficds {

void Polynomial::trim() {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0)
        coeffs_.pop_back();
    if (coeffs_.empty())
        coeffs_.push_back(0.0);
}

std::complex<double> Polynomial::eval(std::complex<double> s) const {
    std::complex<double> acc = coeffs_.back();
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it)
        acc = acc * s + *it;
    return acc;
}

double Polynomial::eval_magnitude(double r) const {
    double acc = std::abs(coeffs_.back());
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it)
        acc = acc * r + std::abs(*it);
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() == 1)
        return Polynomial{};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
        d[k - 1] = coeffs_[k] * static_cast<double>(k);
    return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size())
        coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k)
        coeffs_[k] += rhs.coeffs_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size())
        coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k)
        coeffs_[k] -= rhs.coeffs_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(double k) {
    for (double& c : coeffs_)
        c *= k;
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero())
        return Polynomial{};
    std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
            out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(out));
}

Polynomial polynomial_from_roots(double leading, std::span<const std::complex<double>> roots) {
    // Pair complex roots with their conjugates so each pair contributes a real
    // quadratic; lone near-real roots contribute linear factors.
    std::vector<std::complex<double>> pending(roots.begin(), roots.end());
    Polynomial p{leading};
    while (!pending.empty()) {
        std::complex<double> r = pending.back();
        pending.pop_back();
        if (r.imag() == 0.0) {
            p = p * Polynomial{-r.real(), 1.0};
            continue;
        }
        // find the best conjugate partner
        std::size_t best = pending.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pending.size(); ++i) {
            double d = std::abs(pending[i] - std::conj(r));
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best == pending.size()) {
            p = p * Polynomial{-r.real(), 1.0}; // unpaired: drop the imaginary part
            continue;
        }
        std::complex<double> q = pending[best];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
        double re = 0.5 * (r.real() + q.real());
        double im = 0.5 * (r.imag() - q.imag());
        p = p * Polynomial{re * re + im * im, -2.0 * re, 1.0};
    }
    return p;
}

} // namespace ficds
