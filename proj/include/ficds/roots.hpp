#pragma once

#include "ficds/polynomial.hpp"

#include <complex>
#include <vector>

namespace ficds {

/// All complex roots of a real polynomial, conjugate-symmetrized, plus the
/// worst backward-error residual |p(z)| / sum_k |b_k||z|^k measured on the
/// monic variable-scaled polynomial.
struct PoleSet {
    std::vector<std::complex<double>> roots;
    double residual_bound = 0.0;

    [[nodiscard]] double max_real() const;
};

struct RootOptions {
    int max_iterations = 200;
    double step_tol = 1e-12;        // relative Aberth update size for convergence
    double accept_residual = 1e-9;  // fallback acceptance when updates stall
};

/// Simultaneous-iteration (Aberth-Ehrlich) root extraction on the monic,
/// variable-scaled polynomial. Initial guesses lie on a circle sized by the
/// coefficient root bounds. Throws invalid_argument for degree < 1 and
/// no_convergence if the iteration stalls with a bad residual.
PoleSet poly_roots(const Polynomial& p, const RootOptions& opts = {});

} // namespace ficds
