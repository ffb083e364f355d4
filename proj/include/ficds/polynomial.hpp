#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace ficds {

/// Dense real-coefficient polynomial in the Laplace variable s, stored in
/// ascending powers. Trailing zero coefficients are trimmed on construction,
/// so degree() == coeffs().size() - 1 and the leading coefficient is nonzero
/// unless the polynomial is identically zero (kept as the single coefficient 0).
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    Polynomial(std::initializer_list<double> c) : coeffs_(c) { trim(); }
    explicit Polynomial(std::vector<double> c) : coeffs_(std::move(c)) { trim(); }

    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
    [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
    [[nodiscard]] double leading() const { return coeffs_.back(); }
    [[nodiscard]] double operator[](std::size_t k) const {
        return k < coeffs_.size() ? coeffs_[k] : 0.0;
    }

    [[nodiscard]] std::complex<double> eval(std::complex<double> s) const;

    /// Sum_k |c_k| |s|^k, the magnitude scale of an evaluation at |s| = r.
    [[nodiscard]] double eval_magnitude(double r) const;

    [[nodiscard]] Polynomial derivative() const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(double k);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double k) { return a *= k; }
    friend Polynomial operator*(double k, Polynomial a) { return a *= k; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

    bool operator==(const Polynomial&) const = default;

private:
    void trim();
    std::vector<double> coeffs_;
};

/// Real polynomial leading * prod (s - r_i); complex roots must appear in
/// conjugate pairs (imaginary parts cancel pairwise during reconstruction).
Polynomial polynomial_from_roots(double leading, std::span<const std::complex<double>> roots);

} // namespace ficds
