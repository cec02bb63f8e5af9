#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

/// Base class for numerical failures that a caller can act on.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Iteration cap hit or a singular Jacobian in a nonlinear solve.
struct non_convergence : numeric_error {
    explicit non_convergence(const std::string& msg) : numeric_error(msg) {}
};

/// An endpoint solve converged but produced a sign-changing density:
/// the requested cut count is wrong, try a different q.
struct wrong_cut_count : numeric_error {
    explicit wrong_cut_count(const std::string& msg) : numeric_error(msg) {}
};

/// The three-term recursion lost all significant digits.
struct precision_loss : numeric_error {
    explicit precision_loss(const std::string& msg) : numeric_error(msg) {}
};

/// A linear system was too ill-conditioned to trust.
struct ill_conditioned : numeric_error {
    explicit ill_conditioned(const std::string& msg) : numeric_error(msg) {}
};

struct quadrature_non_convergence : numeric_error {
    explicit quadrature_non_convergence(const std::string& msg) : numeric_error(msg) {}
};

struct branch_cut_error : numeric_error {
    explicit branch_cut_error(const std::string& msg) : numeric_error(msg) {}
};

struct y_out_of_grid : numeric_error {
    explicit y_out_of_grid(const std::string& msg) : numeric_error(msg) {}
};

struct line_search_failure : numeric_error {
    explicit line_search_failure(const std::string& msg) : numeric_error(msg) {}
};

struct newton_divergence : numeric_error {
    explicit newton_divergence(const std::string& msg) : numeric_error(msg) {}
};

struct non_positive_gamma : numeric_error {
    explicit non_positive_gamma(const std::string& msg) : numeric_error(msg) {}
};

struct coincident_points : numeric_error {
    explicit coincident_points(const std::string& msg) : numeric_error(msg) {}
};

struct integrand_tail_error : numeric_error {
    explicit integrand_tail_error(const std::string& msg) : numeric_error(msg) {}
};

}  // namespace rmt
