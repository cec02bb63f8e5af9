#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rmt/band.hpp"
#include "rmt/errors.hpp"
#include "rmt/poly.hpp"
#include "rmt/potential.hpp"
#include "rmt/quadrature.hpp"

namespace rmt {

/// Recurrence data of the monic orthogonal polynomials for the weight
/// e^{-N V(x)}:  x P_n = P_{n+1} + beta_n P_n + gamma_n^2 P_{n-1},
/// h_n = <P_n, P_n>.
struct RecurrenceTable {
    int N = 0;
    std::vector<double> gamma;  // gamma[n-1] = gamma_n, n = 1..nmax
    std::vector<double> beta;   // beta[n]    = beta_n,  n = 0..nmax
    std::vector<double> h;      // h[n]       = h_n,     n = 0..nmax
    double domain_lo = 0.0, domain_hi = 0.0;  // quadrature window used
    int quad_nodes = 0;

    int nmax() const { return static_cast<int>(gamma.size()); }
    double gamma_n(int n) const { return n == 0 ? 0.0 : gamma[static_cast<std::size_t>(n - 1)]; }
    double beta_n(int n) const { return beta[static_cast<std::size_t>(n)]; }
    double h_n(int n) const { return h[static_cast<std::size_t>(n)]; }
};

/// Symmetric tridiagonal Jacobi matrix view (M x M truncation).
struct JacobiMatrix {
    std::vector<double> diag;  // beta_0 .. beta_{M-1}
    std::vector<double> off;   // gamma_1 .. gamma_{M-1}

    int size() const { return static_cast<int>(diag.size()); }

    static JacobiMatrix from_table(const RecurrenceTable& t, int M) {
        JacobiMatrix j;
        j.diag.assign(t.beta.begin(), t.beta.begin() + M);
        j.off.assign(t.gamma.begin(), t.gamma.begin() + (M - 1));
        return j;
    }
};

namespace detail {

/// Integration window: far enough out that the weight times the worst-case
/// polynomial growth (2 max(|x|,1))^{2 nmax} is below e^{-85} relative to the
/// weight's maximum.  The Gershgorin check in the builder widens it further
/// if the Jacobi spectrum turns out to reach the edge.
inline std::pair<double, double> weight_window(const Potential& V, int N, int nmax) {
    double vmin = V(0.0);
    for (int i = -400; i <= 400; ++i) vmin = std::min(vmin, V(i * 0.025));
    auto far_enough = [&](double x) {
        return N * (V(x) - vmin) - 2.0 * nmax * std::log(std::max(2.0 * std::abs(x), 1.0)) > 85.0;
    };
    auto expand = [&](double dir) {
        double x = dir;
        while (!far_enough(x) && std::abs(x) < 1e6) x *= 1.25;
        return x;
    };
    return {expand(-0.5), expand(0.5)};
}

}  // namespace detail

/// Stieltjes procedure: inner products against e^{-NV} by global quadrature,
/// then  beta_n = <x P_n, P_n>/h_n,  gamma_{n+1}^2 = h_{n+1}/h_n.
inline RecurrenceTable recurrence_from_weight(const Potential& V, int N, int nmax) {
    auto [lo, hi] = detail::weight_window(V, N, nmax);

    auto build = [&](int nodes, RecurrenceTable& t) {
        const QuadRule& r = gauss_legendre(nodes);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        std::vector<double> x(r.x.size()), w(r.x.size());
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            x[i] = mid + half * r.x[i];
            w[i] = half * r.w[i] * std::exp(-static_cast<double>(N) * V(x[i]));
        }
        std::vector<double> p0(x.size(), 1.0), p1(x.size(), 0.0);
        t.N = N;
        t.gamma.assign(static_cast<std::size_t>(nmax), 0.0);
        t.beta.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
        t.h.assign(static_cast<std::size_t>(nmax) + 1, 0.0);

        long double h_prev = 0.0L;
        for (int n = 0; n <= nmax; ++n) {
            long double hn = 0.0L, xn = 0.0L;
            for (std::size_t i = 0; i < x.size(); ++i) {
                long double pw = static_cast<long double>(p0[i]) * p0[i] * w[i];
                hn += pw;
                xn += pw * x[i];
            }
            if (!(hn > 0.0L))
                throw precision_loss("recurrence_from_weight: h_" + std::to_string(n) + " <= 0");
            if (n > 0) {
                double g2 = static_cast<double>(hn / h_prev);
                if (g2 < 1e-13 * static_cast<double>(t.h[1] / t.h[0]))
                    throw precision_loss("recurrence_from_weight: conditioning floor at n = " + std::to_string(n));
                t.gamma[static_cast<std::size_t>(n - 1)] = std::sqrt(g2);
            }
            t.h[static_cast<std::size_t>(n)] = static_cast<double>(hn);
            t.beta[static_cast<std::size_t>(n)] = static_cast<double>(xn / hn);
            if (n == nmax) break;

            // P_{n+1} = (x - beta_n) P_n - gamma_n^2 P_{n-1}
            const double bn = t.beta[static_cast<std::size_t>(n)];
            const double g2 = (n > 0) ? t.gamma[static_cast<std::size_t>(n - 1)] * t.gamma[static_cast<std::size_t>(n - 1)] : 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double p2 = (x[i] - bn) * p0[i] - g2 * p1[i];
                p1[i] = p0[i];
                p0[i] = p2;
            }
            h_prev = hn;
        }
        t.domain_lo = lo;
        t.domain_hi = hi;
        t.quad_nodes = nodes;
    };

    for (int attempt = 0; attempt < 6; ++attempt) {
        int nodes = std::max(256, 4 * nmax);
        RecurrenceTable cur;
        build(nodes, cur);
        bool settled = false;
        while (nodes <= (1 << 15)) {
            nodes *= 2;
            RecurrenceTable next;
            build(nodes, next);
            double err = 0.0;
            for (int n = 0; n <= nmax; ++n) {
                double d = std::abs(std::log(next.h[static_cast<std::size_t>(n)]) - std::log(cur.h[static_cast<std::size_t>(n)]));
                err = std::max(err, d);
            }
            cur = std::move(next);
            if (err < 1e-13) {
                settled = true;
                break;
            }
        }
        if (!settled)
            throw quadrature_non_convergence("recurrence_from_weight: node doubling did not settle");

        // All zeros of P_n lie inside the Gershgorin hull of the Jacobi
        // matrix; the window must contain it with room to spare, otherwise
        // the recursion silently produces the window's own Chebyshev data.
        double spec_lo = 0.0, spec_hi = 0.0;
        for (int n = 0; n <= cur.nmax(); ++n) {
            double reach = cur.gamma_n(n) + (n < cur.nmax() ? cur.gamma_n(n + 1) : 0.0);
            spec_lo = std::min(spec_lo, cur.beta_n(n) - reach);
            spec_hi = std::max(spec_hi, cur.beta_n(n) + reach);
        }
        if (spec_lo > lo + 0.1 * (hi - lo) && spec_hi < hi - 0.1 * (hi - lo)) return cur;
        lo = std::min(lo * 1.5, 1.6 * spec_lo - 0.5);
        hi = std::max(hi * 1.5, 1.6 * spec_hi + 0.5);
    }
    throw quadrature_non_convergence("recurrence_from_weight: window enlargement did not settle");
}

/// V'(Q) evaluated on the truncated Jacobi matrix by a banded Horner sweep.
/// Entries more than deg V' rows away from the truncation edge are exact.
inline BandMatrix poly_of_jacobi(const Polynomial& poly, const JacobiMatrix& J) {
    const int M = J.size();
    BandMatrix b(M, 0);
    b.add_diag(poly.coeff(poly.degree()));
    for (int k = poly.degree() - 1; k >= 0; --k) {
        b = b.mul_tridiag(J.diag, J.off);
        b.add_diag(poly.coeff(k));
    }
    return b;
}

inline BandMatrix vprime_of_Q(const Potential& V, const RecurrenceTable& t, int size) {
    const int p = V.degree();
    if (size + p > t.nmax())
        throw std::invalid_argument("vprime_of_Q: table too short for requested size");
    JacobiMatrix J = JacobiMatrix::from_table(t, size + p);
    return poly_of_jacobi(V.derivative(), J);
}

/// Residuals of the discrete string equations at index n:
///   gamma_n [V'(Q)]_{n,n-1} - n/N   and   [V'(Q)]_{nn}.
inline std::pair<double, double> string_residual(const Potential& V, const RecurrenceTable& t, int n) {
    BandMatrix vq = vprime_of_Q(V, t, n + 2);
    double r1 = t.gamma_n(n) * vq.at(n, n - 1) - static_cast<double>(n) / t.N;
    double r2 = vq.at(n, n);
    return {r1, r2};
}

// ---------------------------------------------------------------------------
// Hamiltonian form of the string equations.

namespace detail {

inline JacobiMatrix jacobi_from_sequences(const std::vector<double>& gamma_1toM,
                                          const std::vector<double>& beta_0toM) {
    const int M = static_cast<int>(gamma_1toM.size());
    JacobiMatrix J;
    J.diag.assign(static_cast<std::size_t>(M) + 1, 0.0);
    if (!beta_0toM.empty())
        for (int i = 0; i <= M && i < static_cast<int>(beta_0toM.size()); ++i)
            J.diag[static_cast<std::size_t>(i)] = beta_0toM[static_cast<std::size_t>(i)];
    J.off = gamma_1toM;  // couples rows n-1 and n, n = 1..M
    return J;
}

}  // namespace detail

/// H = N Tr V(Q) - sum_{n=1}^{M-1} n ln gamma_n^2 on the (M+1) x (M+1)
/// truncation; gamma_1toM[M-1] is the fixed boundary value gamma_M.
inline double hamiltonian(const Potential& V, const std::vector<double>& gamma_1toM,
                          const std::vector<double>& beta_0toM, int N) {
    const int M = static_cast<int>(gamma_1toM.size());
    for (int n = 1; n < M; ++n)
        if (!(gamma_1toM[static_cast<std::size_t>(n - 1)] > 0.0))
            throw non_positive_gamma("hamiltonian: gamma_" + std::to_string(n) + " <= 0");
    JacobiMatrix J = detail::jacobi_from_sequences(gamma_1toM, beta_0toM);
    double H = N * poly_of_jacobi(V.poly(), J).trace();
    for (int n = 1; n < M; ++n) H -= 2.0 * n * std::log(gamma_1toM[static_cast<std::size_t>(n - 1)]);
    return H;
}

/// dH/dgamma_n = 2N [V'(Q)]_{n,n-1} - 2n/gamma_n for n = 1..M-1.
inline std::vector<double> hamiltonian_grad_gamma(const Potential& V,
                                                  const std::vector<double>& gamma_1toM,
                                                  const std::vector<double>& beta_0toM, int N) {
    const int M = static_cast<int>(gamma_1toM.size());
    JacobiMatrix J = detail::jacobi_from_sequences(gamma_1toM, beta_0toM);
    BandMatrix vq = poly_of_jacobi(V.derivative(), J);
    std::vector<double> g(static_cast<std::size_t>(M - 1));
    for (int n = 1; n < M; ++n)
        g[static_cast<std::size_t>(n - 1)] =
            2.0 * N * vq.at(n, n - 1) - 2.0 * n / gamma_1toM[static_cast<std::size_t>(n - 1)];
    return g;
}

/// dH/dbeta_n = N [V'(Q)]_{nn}.
inline std::vector<double> hamiltonian_grad_beta(const Potential& V,
                                                 const std::vector<double>& gamma_1toM,
                                                 const std::vector<double>& beta_0toM, int N) {
    const int M = static_cast<int>(gamma_1toM.size());
    JacobiMatrix J = detail::jacobi_from_sequences(gamma_1toM, beta_0toM);
    BandMatrix vq = poly_of_jacobi(V.derivative(), J);
    std::vector<double> g(static_cast<std::size_t>(M));
    for (int n = 0; n < M; ++n) g[static_cast<std::size_t>(n)] = N * vq.at(n, n);
    return g;
}

struct MinimizeResult {
    std::vector<double> gamma;     // gamma_1 .. gamma_M (last entry = boundary)
    int iterations = 0;
    double grad_inf = 0.0;         // sup |dH/dgamma_n| at exit
    double string_residual_inf = 0.0;
};

/// Scaling-profile seed for the even quartic V = (t/2) z^2 + (g/4) z^4:
/// one branch above lambda_c = t^2/(4g), a period-2 pair below it.
inline double quartic_profile_R(double t, double g, double lambda, int parity_odd) {
    const double lc = t * t / (4.0 * g);
    if (lambda >= lc) return (-t + std::sqrt(t * t + 12.0 * g * lambda)) / (6.0 * g);
    const double s = std::sqrt(std::max(t * t - 4.0 * g * lambda, 0.0));
    return parity_odd ? (-t + s) / (2.0 * g) : (-t - s) / (2.0 * g);
}

/// Minimize H over gamma_1..gamma_{M-1} with gamma_0 = 0 and gamma_M fixed,
/// for an even potential (beta = 0).  Polak-Ribiere conjugate gradient with
/// an Armijo line search, seeded from the scaling profile.
inline MinimizeResult minimize_hamiltonian(const Potential& V, int N, int M, double boundary = 0.0,
                                           double tol_residual = 1e-10, int max_iter = 200000) {
    if (!V.is_even()) throw std::invalid_argument("minimize_hamiltonian: potential must be even");
    const std::vector<double> no_beta;

    std::vector<double> gam(static_cast<std::size_t>(M), 0.0);
    const bool quartic = (V.degree() == 4);
    const double t4 = 2.0 * V.v(2), g4 = 4.0 * V.v(4);
    for (int n = 1; n < M; ++n) {
        double lam = static_cast<double>(n) / N;
        double g2;
        if (quartic && t4 < 0.0)
            g2 = quartic_profile_R(t4, g4, lam, n % 2);
        else
            g2 = std::max(lam / (2.0 * std::max(V.v(2), 0.25)), 1e-4);
        gam[static_cast<std::size_t>(n - 1)] = std::sqrt(std::max(g2, 1e-8));
    }
    gam[static_cast<std::size_t>(M - 1)] = boundary;

    auto free_grad = [&](const std::vector<double>& g) { return hamiltonian_grad_gamma(V, g, no_beta, N); };

    double H = hamiltonian(V, gam, no_beta, N);
    std::vector<double> grad = free_grad(gam);
    std::vector<double> dir(grad.size()), grad_prev;
    for (std::size_t i = 0; i < grad.size(); ++i) dir[i] = -grad[i];

    auto residual_inf = [&](const std::vector<double>& g, const std::vector<double>& gr) {
        double r = 0.0;
        for (int n = 1; n < M; ++n)
            r = std::max(r, std::abs(g[static_cast<std::size_t>(n - 1)] * gr[static_cast<std::size_t>(n - 1)]) / (2.0 * N));
        return r;
    };

    MinimizeResult out;
    double alpha = 1e-3;
    int it = 0;
    for (; it < max_iter; ++it) {
        double res = residual_inf(gam, grad);
        if (res < tol_residual) break;

        double slope = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) slope += grad[i] * dir[i];
        if (slope >= 0.0) {  // restart on a non-descent direction
            for (std::size_t i = 0; i < grad.size(); ++i) dir[i] = -grad[i];
            slope = 0.0;
            for (std::size_t i = 0; i < grad.size(); ++i) slope += grad[i] * dir[i];
        }

        // keep every free gamma strictly positive
        double amax = 1e300;
        for (std::size_t i = 0; i + 1 < gam.size(); ++i)
            if (dir[i] < 0.0) amax = std::min(amax, -0.95 * gam[i] / dir[i]);

        double a = std::min(2.0 * alpha, amax);
        std::vector<double> trial(gam);
        double Ht = 0.0;
        bool ok = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i + 1 < gam.size(); ++i) trial[i] = gam[i] + a * dir[i];
            Ht = hamiltonian(V, trial, no_beta, N);
            if (Ht <= H + 1e-4 * a * slope) {
                ok = true;
                break;
            }
            a *= 0.5;
        }
        if (!ok) throw line_search_failure("minimize_hamiltonian: no decrease along search direction");
        alpha = a;

        gam.swap(trial);
        H = Ht;
        grad_prev.swap(grad);
        grad = free_grad(gam);

        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            num += grad[i] * (grad[i] - grad_prev[i]);
            den += grad_prev[i] * grad_prev[i];
        }
        double beta_pr = std::max(0.0, num / std::max(den, 1e-300));
        for (std::size_t i = 0; i < grad.size(); ++i) dir[i] = -grad[i] + beta_pr * dir[i];
    }

    out.gamma = gam;
    out.iterations = it;
    out.grad_inf = 0.0;
    for (double g : grad) out.grad_inf = std::max(out.grad_inf, std::abs(g));
    out.string_residual_inf = residual_inf(gam, grad);
    if (it >= max_iter)
        throw non_convergence("minimize_hamiltonian: iteration cap hit, residual = " + std::to_string(out.string_residual_inf));
    return out;
}

// ---------------------------------------------------------------------------
// Wave functions and the finite-N kernel.

/// psi_n(x) = h_n^{-1/2} P_n(x) e^{-N V(x)/2}, evaluated through the
/// recurrence (never by expanding P_n in monomials).
inline double psi(const RecurrenceTable& t, const Potential& V, int N, int n, double x) {
    double p0 = std::exp(-0.5 * N * V(x)) / std::sqrt(t.h_n(0));
    if (n == 0) return p0;
    double pm = 0.0;
    for (int k = 0; k < n; ++k) {
        double p1 = ((x - t.beta_n(k)) * p0 - t.gamma_n(k) * pm) / t.gamma_n(k + 1);
        pm = p0;
        p0 = p1;
    }
    return p0;
}

/// psi_n and psi_{n-1} together with their x-derivatives.
struct PsiPair {
    double psi_n, psi_nm1, dpsi_n, dpsi_nm1;
};

inline PsiPair psi_pair_with_deriv(const RecurrenceTable& t, const Potential& V, int N, int n, double x) {
    const double e = std::exp(-0.5 * N * V(x));
    const double dv = -0.5 * N * V.derivative()(x);
    double p0 = 1.0 / std::sqrt(t.h_n(0)), d0 = 0.0;  // orthonormal polynomial part
    double pm = 0.0, dm = 0.0;
    for (int k = 0; k < n; ++k) {
        const double g1 = t.gamma_n(k + 1), g0 = t.gamma_n(k), b = t.beta_n(k);
        double p1 = ((x - b) * p0 - g0 * pm) / g1;
        double d1 = (p0 + (x - b) * d0 - g0 * dm) / g1;
        pm = p0; dm = d0;
        p0 = p1; d0 = d1;
    }
    PsiPair out;
    out.psi_n = e * p0;
    out.psi_nm1 = e * pm;
    out.dpsi_n = e * (d0 + dv * p0);
    out.dpsi_nm1 = e * (dm + dv * pm);
    return out;
}

/// Christoffel-Darboux kernel K_N(x, y); confluent form within the diagonal
/// switch window.
inline double cd_kernel(const RecurrenceTable& t, const Potential& V, int N, double x, double y) {
    const double scale = std::max({1.0, std::abs(x), std::abs(y)});
    const double gN = t.gamma_n(N);
    if (std::abs(x - y) < 1e-6 * scale) {
        const double m = 0.5 * (x + y);
        PsiPair p = psi_pair_with_deriv(t, V, N, N, m);
        return gN * (p.dpsi_n * p.psi_nm1 - p.dpsi_nm1 * p.psi_n);
    }
    PsiPair px = psi_pair_with_deriv(t, V, N, N, x);
    PsiPair py = psi_pair_with_deriv(t, V, N, N, y);
    return gN * (px.psi_n * py.psi_nm1 - px.psi_nm1 * py.psi_n) / (x - y);
}

/// m-point correlation function det(K_N(x_k, x_l)).
inline double correlation_functions(const RecurrenceTable& t, const Potential& V, int N,
                                    const std::vector<double>& points) {
    const int m = static_cast<int>(points.size());
    std::vector<double> k(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            k[static_cast<std::size_t>(i) * m + j] =
                cd_kernel(t, V, N, points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
    // LU with partial pivoting; m stays small (it is the correlation order).
    double det = 1.0;
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(k[static_cast<std::size_t>(r) * m + c]) > std::abs(k[static_cast<std::size_t>(piv) * m + c])) piv = r;
        if (piv != c) {
            for (int j = 0; j < m; ++j)
                std::swap(k[static_cast<std::size_t>(piv) * m + j], k[static_cast<std::size_t>(c) * m + j]);
            det = -det;
        }
        const double d = k[static_cast<std::size_t>(c) * m + c];
        det *= d;
        if (d == 0.0) return 0.0;
        for (int r = c + 1; r < m; ++r) {
            const double f = k[static_cast<std::size_t>(r) * m + c] / d;
            for (int j = c; j < m; ++j)
                k[static_cast<std::size_t>(r) * m + j] -= f * k[static_cast<std::size_t>(c) * m + j];
        }
    }
    return det;
}

/// Right-hand sides of the deformation equations for d/dv_k at index n:
/// derivatives of ln h_n, gamma_n, beta_n built from [Q^k] entries.
struct DvDerivatives {
    double dlnh, dgamma, dbeta;
};

inline DvDerivatives dv_derivatives(const Potential& V, int N, int k, int n) {
    const int size = n + k + 3;
    RecurrenceTable t = recurrence_from_weight(V, N, size + 1);
    JacobiMatrix J = JacobiMatrix::from_table(t, size);
    BandMatrix qk = poly_of_jacobi(Polynomial::monomial(k), J);
    DvDerivatives d;
    d.dlnh = -static_cast<double>(N) * qk.at(n, n);
    d.dgamma = 0.5 * N * t.gamma_n(n) * (qk.at(n - 1, n - 1) - qk.at(n, n));
    d.dbeta = N * (t.gamma_n(n) * qk.at(n, n - 1) - t.gamma_n(n + 1) * qk.at(n + 1, n));
    return d;
}

}  // namespace rmt
