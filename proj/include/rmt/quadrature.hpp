#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

namespace detail {

inline QuadRule make_gauss_legendre(int n) {
    QuadRule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    // Newton on P_n with the Chebyshev-angle initial guess; nodes come out
    // to machine precision in a handful of iterations.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[static_cast<std::size_t>(i)] = -x;
        r.x[static_cast<std::size_t>(n - 1 - i)] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[static_cast<std::size_t>(i)] = w;
        r.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

}  // namespace detail

/// Cached Gauss-Legendre rule (thread-safe).
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::make_gauss_legendre(n)).first;
    return it->second;
}

/// \int_a^b f(x) dx with an n-point Gauss-Legendre rule.
template <class F>
auto integrate(F&& f, double a, double b, int n) -> decltype(f(0.0)) {
    const QuadRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    decltype(f(0.0)) s{};
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

/// Doubles the node count until two consecutive results agree to tol
/// (relative to the larger magnitude, with an absolute floor).
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-12, int n0 = 32,
                          int nmax = 1 << 16) {
    double prev = integrate(f, a, b, n0);
    for (int n = 2 * n0; n <= nmax; n *= 2) {
        double cur = integrate(f, a, b, n);
        double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) <= tol * std::max(scale, 1.0) + tol * scale) return cur;
        prev = cur;
    }
    throw quadrature_non_convergence("integrate_adaptive: no self-agreement at max node count");
}

/// n-point Gauss-Chebyshev rule for \int_a^b g(x) / sqrt((x-a)(b-x)) dx.
/// The substitution x = m + r cos(theta) absorbs the endpoint singularity.
template <class F>
double integrate_chebyshev(F&& g, double a, double b, int n) {
    const double m = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
        double th = M_PI * (2.0 * k - 1.0) / (2.0 * n);
        s += g(m + r * std::cos(th));
    }
    return s * M_PI / n;
}

}  // namespace rmt
