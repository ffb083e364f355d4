#include "ficds/roots.hpp"

#include "ficds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ficds {

double PoleSet::max_real() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots)
        m = std::max(m, r.real());
    return m;
}

namespace {

std::complex<double> horner(const std::vector<double>& c, std::complex<double> z) {
    std::complex<double> acc = c.back();
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

double horner_mag(const std::vector<double>& c, double r) {
    double acc = std::abs(c.back());
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it)
        acc = acc * r + std::abs(*it);
    return acc;
}

/// Force conjugate symmetry on the raw root estimates: snap near-real roots
/// to the axis, then average each +/- pair.
void symmetrize(std::vector<std::complex<double>>& roots) {
    constexpr double snap_rel = 1e-5;
    std::vector<std::complex<double>> plus, minus;
    std::vector<std::complex<double>> out;
    for (auto& z : roots) {
        if (std::abs(z.imag()) <= snap_rel * (1.0 + std::abs(z))) {
            out.emplace_back(z.real(), 0.0);
        } else if (z.imag() > 0.0) {
            plus.push_back(z);
        } else {
            minus.push_back(z);
        }
    }
    for (const auto& p : plus) {
        std::size_t best = minus.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < minus.size(); ++i) {
            double d = std::abs(std::conj(minus[i]) - p);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best == minus.size()) {
            out.emplace_back(p.real(), 0.0); // no partner left: treat as real
            continue;
        }
        std::complex<double> q = minus[best];
        minus.erase(minus.begin() + static_cast<std::ptrdiff_t>(best));
        double re = 0.5 * (p.real() + q.real());
        double im = 0.5 * (p.imag() - q.imag());
        out.emplace_back(re, im);
        out.emplace_back(re, -im);
    }
    for (const auto& q : minus)
        out.emplace_back(q.real(), 0.0);
    roots = std::move(out);
}

} // namespace

PoleSet poly_roots(const Polynomial& p, const RootOptions& opts) {
    for (double c : p.coeffs())
        if (!std::isfinite(c))
            raise(Errc::invalid_argument, "poly_roots: non-finite coefficient");
    if (p.degree() < 1 || p.is_zero())
        raise(Errc::invalid_argument, "poly_roots: polynomial must have degree >= 1");

    std::vector<double> a = p.coeffs();
    std::size_t origin_roots = 0;
    while (a.size() > 1 && a.front() == 0.0) {
        a.erase(a.begin());
        ++origin_roots;
    }
    PoleSet out;
    out.roots.assign(origin_roots, {0.0, 0.0});
    const std::size_t n = a.size() - 1;
    if (n == 0)
        return out;

    // Variable scaling s = sigma*z with sigma the geometric mean of the root
    // moduli, |a0/an|^(1/n): tames coefficients whose physical units span
    // many orders of magnitude. Built per-coefficient in log space.
    const double lsig = (std::log(std::abs(a.front())) - std::log(std::abs(a.back()))) /
                        static_cast<double>(n);
    const double sigma = std::exp(lsig);
    const double lan = std::log(std::abs(a.back()));
    std::vector<double> b(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
        if (a[k] == 0.0)
            continue;
        double logb = std::log(std::abs(a[k])) +
                      (static_cast<double>(k) - static_cast<double>(n)) * lsig - lan;
        b[k] = std::copysign(std::exp(logb), a[k] * a.back());
    }
    std::vector<double> db(n);
    for (std::size_t k = 1; k <= n; ++k)
        db[k - 1] = b[k] * static_cast<double>(k);

    if (n == 1) {
        out.roots.emplace_back(-b[0] * sigma, 0.0);
        out.residual_bound = 0.0;
        return out;
    }

    // Initial guesses on a circle bounded by the coefficient root bounds
    // (Cauchy capped by Fujiwara, which is much tighter for skewed spectra).
    double cauchy = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        cauchy = std::max(cauchy, std::abs(b[k]));
    cauchy += 1.0;
    double fuji = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
        fuji = std::max(fuji, std::pow(std::abs(b[n - k]), 1.0 / static_cast<double>(k)));
    const double r0 = std::min(cauchy, 2.0 * fuji);

    std::vector<std::complex<double>> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ang = 2.0 * 3.14159265358979323846 * static_cast<double>(i) /
                         static_cast<double>(n) +
                     0.4;
        z[i] = std::polar(r0, ang);
    }

    bool converged = false;
    std::vector<std::complex<double>> w(n);
    for (int iter = 0; iter < opts.max_iterations && !converged; ++iter) {
        bool all_small = true;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> pz = horner(b, z[i]);
            std::complex<double> dpz = horner(db, z[i]);
            if (dpz == std::complex<double>(0.0, 0.0)) {
                w[i] = 0.01 * (1.0 + std::abs(z[i])); // nudge off a stationary point
                all_small = false;
                continue;
            }
            std::complex<double> newton = pz / dpz;
            std::complex<double> s(0.0, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                std::complex<double> d = z[i] - z[j];
                if (d != std::complex<double>(0.0, 0.0))
                    s += 1.0 / d;
            }
            std::complex<double> denom = 1.0 - newton * s;
            w[i] = (denom == std::complex<double>(0.0, 0.0)) ? newton : newton / denom;
            if (std::abs(w[i]) > opts.step_tol * std::max(std::abs(z[i]), 1e-300))
                all_small = false;
        }
        for (std::size_t i = 0; i < n; ++i)
            z[i] -= w[i];
        converged = all_small;
    }

    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double mag = horner_mag(b, std::abs(z[i]));
        resid = std::max(resid, std::abs(horner(b, z[i])) / std::max(mag, 1e-300));
    }
    if (!converged && resid > opts.accept_residual)
        raise(Errc::no_convergence, "poly_roots: Aberth iteration did not converge "
                                    "(residual " + std::to_string(resid) + ")");

    for (auto& zi : z)
        zi *= sigma;
    symmetrize(z);
    out.roots.insert(out.roots.end(), z.begin(), z.end());
    out.residual_bound = resid;
    return out;
}

} // namespace ficds
