#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rmt/orthopoly.hpp"
#include "rmt/quadrature.hpp"

using namespace rmt;

TEST_CASE("GUE recurrence: gamma_n^2 = n/(2N)") {
    const int N = 10;
    RecurrenceTable t = recurrence_from_weight(Potential::gaussian(), N, 50);
    for (int n = 1; n <= 50; ++n)
        CHECK(t.gamma_n(n) * t.gamma_n(n) == Catch::Approx(n / (2.0 * N)).margin(1e-10));
    for (int n = 0; n <= 50; ++n) CHECK(std::abs(t.beta_n(n)) < 1e-10);
}

TEST_CASE("Gaussian h_0 at N = 1 is sqrt(pi)") {
    RecurrenceTable t = recurrence_from_weight(Potential::gaussian(), 1, 4);
    CHECK(t.h_n(0) == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("quartic gamma_1^2 equals the moment ratio") {
    // gamma_1^2 = int z^2 e^{-NV} / int e^{-NV} for even V
    const int N = 7;
    Potential V = Potential::quartic(-1.0);
    RecurrenceTable t = recurrence_from_weight(V, N, 6);
    double num = integrate_adaptive([&](double z) { return z * z * std::exp(-N * V(z)); }, -8.0, 8.0, 1e-13);
    double den = integrate_adaptive([&](double z) { return std::exp(-N * V(z)); }, -8.0, 8.0, 1e-13);
    CHECK(t.gamma_n(1) * t.gamma_n(1) == Catch::Approx(num / den).epsilon(1e-10));
}

TEST_CASE("vprime_of_Q entries") {
    const int N = 12;
    RecurrenceTable t = recurrence_from_weight(Potential::gaussian(), N, 30);

    SECTION("V = x^2 gives V'(Q) = 2Q") {
        BandMatrix vq = vprime_of_Q(Potential::gaussian(), t, 20);
        for (int n = 1; n < 20; ++n) {
            CHECK(vq.at(n, n - 1) == Catch::Approx(2.0 * t.gamma_n(n)).margin(1e-14));
            CHECK(vq.at(n, n) == Catch::Approx(0.0).margin(1e-14));
        }
    }

    SECTION("even quartic reproduces the explicit band entry") {
        Potential V = Potential::quartic(-1.0);
        RecurrenceTable tq = recurrence_from_weight(V, N, 30);
        BandMatrix vq = vprime_of_Q(V, tq, 20);
        auto g2 = [&](int n) { return tq.gamma_n(n) * tq.gamma_n(n); };
        for (int n = 1; n < 20; ++n) {
            double expect = tq.gamma_n(n) * (-1.0 + g2(n - 1) + g2(n) + g2(n + 1));
            CHECK(vq.at(n, n - 1) == Catch::Approx(expect).margin(1e-12));
            CHECK(vq.at(n, n) == Catch::Approx(0.0).margin(1e-12));  // odd poly of bipartite matrix
        }
    }
}

TEST_CASE("string residuals") {
    SECTION("GUE table satisfies the string equations") {
        RecurrenceTable t = recurrence_from_weight(Potential::gaussian(), 10, 30);
        for (int n = 1; n <= 20; ++n) {
            auto [r1, r2] = string_residual(Potential::gaussian(), t, n);
            CHECK(std::abs(r1) < 1e-10);
            CHECK(std::abs(r2) < 1e-10);
        }
    }

    SECTION("quartic table satisfies the string equations") {
        Potential V = Potential::quartic(-1.0);
        RecurrenceTable t = recurrence_from_weight(V, 20, 30);
        auto [r1, r2] = string_residual(V, t, 5);
        CHECK(std::abs(r1) < 1e-7);
        CHECK(std::abs(r2) < 1e-7);
    }

    SECTION("perturbing one coefficient breaks the identity") {
        Potential V = Potential::quartic(-1.0);
        RecurrenceTable t = recurrence_from_weight(V, 20, 30);
        t.gamma[4] += 0.01;  // gamma_5
        auto [r1, r2] = string_residual(V, t, 5);
        CHECK(std::abs(r1) > 1e-4);
        (void)r2;
    }
}

TEST_CASE("string identity holds along the whole table") {
    Potential V = Potential::quartic(1.0);
    const int N = 15;
    RecurrenceTable t = recurrence_from_weight(V, N, 25);
    for (int n = 1; n <= 20; ++n) {
        auto [r1, r2] = string_residual(V, t, n);
        CHECK(std::abs(r1) < 1e-7);
        CHECK(std::abs(r2) < 1e-7);
    }
}

TEST_CASE("hamiltonian gradients match central differences") {
    Potential V = Potential::quartic(-1.0);
    const int N = 8, M = 12;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.4, 1.1);
    std::vector<double> gam(M), bet(M + 1, 0.0);
    for (auto& g : gam) g = u(rng);
    gam.back() = 0.3;

    SECTION("gamma gradient") {
        std::vector<double> grad = hamiltonian_grad_gamma(V, gam, bet, N);
        for (int n = 1; n < M; ++n) {
            const double eps = 1e-6;
            std::vector<double> gp(gam), gm(gam);
            gp[n - 1] += eps;
            gm[n - 1] -= eps;
            double fd = (hamiltonian(V, gp, bet, N) - hamiltonian(V, gm, bet, N)) / (2 * eps);
            CHECK(grad[n - 1] == Catch::Approx(fd).epsilon(1e-6).margin(1e-6));
        }
    }

    SECTION("beta gradient") {
        for (auto& b : bet) b = 0.2 * u(rng);
        std::vector<double> grad = hamiltonian_grad_beta(V, gam, bet, N);
        for (int n = 0; n < M; ++n) {
            const double eps = 1e-6;
            std::vector<double> bp(bet), bm(bet);
            bp[n] += eps;
            bm[n] -= eps;
            double fd = (hamiltonian(V, gam, bp, N) - hamiltonian(V, gam, bm, N)) / (2 * eps);
            CHECK(grad[n] == Catch::Approx(fd).epsilon(1e-6).margin(1e-6));
        }
    }
}

TEST_CASE("even quartic hamiltonian matches the explicit sum") {
    // H = sum_n [ (N/2) g_n^2 (2t + g(g_{n-1}^2+g_n^2+g_{n+1}^2)) - n ln g_n^2 ]
    const double t = -1.0, g = 1.0;
    Potential V = Potential::quartic(t, g);
    const int N = 5, M = 9;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.3, 1.2);
    std::vector<double> gam(M);
    for (auto& x : gam) x = u(rng);

    auto g2 = [&](int n) {
        if (n <= 0 || n > M) return 0.0;
        return gam[n - 1] * gam[n - 1];
    };
    double H_explicit = 0.0;
    for (int n = 1; n <= M; ++n)
        H_explicit += 0.5 * N * g2(n) * (2 * t + g * (g2(n - 1) + g2(n) + g2(n + 1)));
    for (int n = 1; n < M; ++n) H_explicit -= n * std::log(g2(n));

    CHECK(hamiltonian(V, gam, {}, N) == Catch::Approx(H_explicit).epsilon(1e-12));
}

TEST_CASE("minimizer reproduces the scaling profile", "[slow]") {
    // g = 1, t = -1, N = 400 run; bulk branch and period-2 branch values.
    Potential V = Potential::quartic(-1.0);
    const int N = 400;
    MinimizeResult res = minimize_hamiltonian(V, N, N, 0.0, 1e-10);

    auto gamma_sq = [&](int n) { return res.gamma[n - 1] * res.gamma[n - 1]; };

    // n/N = 1: gamma_n^2 ~ R(1) = (1+sqrt(13))/6, away from the boundary layer
    double R1 = (1.0 + std::sqrt(13.0)) / 6.0;
    CHECK(gamma_sq(380) == Catch::Approx(R1).margin(0.02));

    // n/N = 3/16 < 1/4: even/odd subsequences near 0.25 and 0.75
    int n0 = 75;  // 75/400 = 3/16
    double lo = std::min(gamma_sq(n0), gamma_sq(n0 + 1));
    double hi = std::max(gamma_sq(n0), gamma_sq(n0 + 1));
    CHECK(lo == Catch::Approx(0.25).margin(0.02));
    CHECK(hi == Catch::Approx(0.75).margin(0.02));

    // both branches meet at 1/2 at lambda_c = 1/4
    CHECK(quartic_profile_R(-1.0, 1.0, 0.25, 0) == Catch::Approx(0.5));
    CHECK(quartic_profile_R(-1.0, 1.0, 0.25, 1) == Catch::Approx(0.5));

    // stationarity implies string residuals vanish away from the boundary
    std::vector<double> grad = hamiltonian_grad_gamma(V, res.gamma, {}, N);
    double res_inf = 0.0;
    for (int n = 10; n <= 380; ++n)
        res_inf = std::max(res_inf, std::abs(res.gamma[n - 1] * grad[n - 1] / (2.0 * N)));
    CHECK(res_inf < 1e-8);
}

TEST_CASE("psi functions are orthonormal and satisfy the recurrence") {
    const int N = 10;
    Potential V = Potential::gaussian();
    RecurrenceTable t = recurrence_from_weight(V, N, 34);

    SECTION("normalization and orthogonality") {
        for (int n : {0, 3, 17, 30}) {
            double nrm = integrate([&](double x) { double p = psi(t, V, N, n, x); return p * p; },
                                   t.domain_lo, t.domain_hi, 2048);
            CHECK(nrm == Catch::Approx(1.0).margin(1e-8));
        }
        double dot = integrate([&](double x) { return psi(t, V, N, 4, x) * psi(t, V, N, 9, x); },
                               t.domain_lo, t.domain_hi, 2048);
        CHECK(std::abs(dot) < 1e-8);
    }

    SECTION("pointwise three-term recurrence") {
        for (double x : {-1.1, -0.2, 0.7, 1.3}) {
            for (int n : {1, 5, 12}) {
                double lhs = x * psi(t, V, N, n, x);
                double rhs = t.gamma_n(n + 1) * psi(t, V, N, n + 1, x) + t.beta_n(n) * psi(t, V, N, n, x) +
                             t.gamma_n(n) * psi(t, V, N, n - 1, x);
                CHECK(lhs == Catch::Approx(rhs).margin(1e-9));
            }
        }
    }
}

TEST_CASE("CD kernel properties") {
    const int N = 12;
    Potential V = Potential::gaussian();
    RecurrenceTable t = recurrence_from_weight(V, N, N + 4);

    SECTION("trace equals N") {
        double tr = integrate([&](double x) { return cd_kernel(t, V, N, x, x); },
                              t.domain_lo, t.domain_hi, 4096);
        CHECK(tr == Catch::Approx(static_cast<double>(N)).margin(1e-6));
    }

    SECTION("CD form equals the direct sum") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(-1.4, 1.4);
        for (int rep = 0; rep < 50; ++rep) {
            double x = u(rng), y = u(rng);
            double direct = 0.0;
            for (int n = 0; n < N; ++n) direct += psi(t, V, N, n, x) * psi(t, V, N, n, y);
            CHECK(cd_kernel(t, V, N, x, y) == Catch::Approx(direct).margin(1e-9));
        }
    }

    SECTION("kernel is symmetric and continuous at the diagonal") {
        CHECK(cd_kernel(t, V, N, 0.3, -0.9) == Catch::Approx(cd_kernel(t, V, N, -0.9, 0.3)).epsilon(1e-12));
        double diag = cd_kernel(t, V, N, 0.4, 0.4);
        double near = cd_kernel(t, V, N, 0.4, 0.4 + 5e-7);
        CHECK(near == Catch::Approx(diag).epsilon(1e-5));
    }

    SECTION("reproducing property") {
        double x = 0.25, y = -0.6;
        double conv = integrate([&](double s) { return cd_kernel(t, V, N, x, s) * cd_kernel(t, V, N, s, y); },
                                t.domain_lo, t.domain_hi, 4096);
        CHECK(conv == Catch::Approx(cd_kernel(t, V, N, x, y)).margin(1e-6));
    }
}

TEST_CASE("correlation functions") {
    Potential V = Potential::gaussian();

    SECTION("R_1 is the kernel diagonal and nonnegative") {
        const int N = 6;
        RecurrenceTable t = recurrence_from_weight(V, N, N + 4);
        for (double x : {-1.0, 0.0, 0.8}) {
            double r1 = correlation_functions(t, V, N, {x});
            CHECK(r1 == Catch::Approx(cd_kernel(t, V, N, x, x)));
            CHECK(r1 >= 0.0);
        }
    }

    SECTION("pair repulsion: R_2 -> 0 as the points merge") {
        const int N = 6;
        RecurrenceTable t = recurrence_from_weight(V, N, N + 4);
        double far = correlation_functions(t, V, N, {0.1, 0.9});
        double close = correlation_functions(t, V, N, {0.1, 0.1 + 1e-5});
        CHECK(std::abs(close) < 1e-6 * std::max(1.0, far));
    }

    SECTION("N = 2 against the explicit two-particle density") {
        const int N = 2;
        RecurrenceTable t = recurrence_from_weight(V, N, N + 4);
        // int R_1 = N
        double tr = integrate([&](double x) { return correlation_functions(t, V, N, {x}); },
                              t.domain_lo, t.domain_hi, 2048);
        CHECK(tr == Catch::Approx(2.0).margin(1e-8));
        // R_2(x, y) = 2! (x-y)^2 e^{-2x^2 - 2y^2} / Z2,  Z2 = pi/4
        const double Z2 = M_PI / 4.0;
        for (auto [x, y] : std::vector<std::pair<double, double>>{{0.3, -0.5}, {0.0, 1.0}, {-0.2, -0.9}}) {
            double expect = 2.0 * (x - y) * (x - y) * std::exp(-2 * (x * x + y * y)) / Z2;
            CHECK(correlation_functions(t, V, N, {x, y}) == Catch::Approx(expect).margin(1e-6));
        }
    }
}

TEST_CASE("deformation derivative identities") {
    SECTION("GUE k = 2 closed form") {
        const int N = 9;
        for (int n : {1, 3, 6}) {
            DvDerivatives d = dv_derivatives(Potential::gaussian(), N, 2, n);
            CHECK(d.dlnh / N == Catch::Approx(-(2.0 * n + 1.0) / (2.0 * N)).margin(1e-9));
            CHECK(std::abs(d.dbeta) < 1e-8);
        }
    }

    SECTION("finite differences confirm the k in {2,4} rules for the quartic") {
        const int N = 6;
        Potential V = Potential::quartic(-1.0);
        const double eps = 1e-5;
        for (int k : {2, 4}) {
            for (int n : {2, 5, 9}) {
                DvDerivatives d = dv_derivatives(V, N, k, n);
                std::vector<double> vp(V.coeffs()), vm(V.coeffs());
                vp[k - 1] += eps;
                vm[k - 1] -= eps;
                RecurrenceTable tp = recurrence_from_weight(Potential(vp), N, n + 2);
                RecurrenceTable tm = recurrence_from_weight(Potential(vm), N, n + 2);
                double fd_lnh = (std::log(tp.h_n(n)) - std::log(tm.h_n(n))) / (2 * eps);
                double fd_gam = (tp.gamma_n(n) - tm.gamma_n(n)) / (2 * eps);
                CHECK(d.dlnh == Catch::Approx(fd_lnh).epsilon(1e-5).margin(1e-7));
                CHECK(d.dgamma == Catch::Approx(fd_gam).epsilon(1e-5).margin(1e-7));
            }
        }
    }
}

TEST_CASE("one-cut recurrence asymptotics approach the equilibrium endpoints") {
    // |gamma_N - (b-a)/4| decays across N for a one-cut regular potential.
    Potential V = Potential::quartic(1.0);
    std::vector<double> err;
    for (int N : {20, 40, 80, 160}) {
        RecurrenceTable t = recurrence_from_weight(V, N, N + 1);
        // closed-form endpoints: a = sqrt((-2t + 2 sqrt(t^2+12))/3), t = 1
        double a = std::sqrt((-2.0 + 2.0 * std::sqrt(13.0)) / 3.0);
        err.push_back(std::abs(t.gamma_n(N) - 2.0 * a / 4.0) + std::abs(t.beta_n(N - 1)));
    }
    CHECK(err[1] < err[0]);
    CHECK(err[2] < err[1]);
    CHECK(err[3] < err[2]);
    CHECK(err[3] < 0.5 * err[0]);
}
