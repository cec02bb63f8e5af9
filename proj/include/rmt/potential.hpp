#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmt/poly.hpp"

namespace rmt {

/// Confining polynomial potential V(z) = sum_{j=1}^{p} v_j z^j with even
/// degree p and v_p > 0.  The constant term is fixed at zero: adding a
/// constant to V only rescales every normalization h_n by the same factor,
/// and nothing downstream depends on it.
class Potential {
  public:
    /// v[j-1] is the coefficient of z^j (so v = {v1, ..., vp}).
    explicit Potential(std::vector<double> v) : v_(std::move(v)) {
        if (v_.empty()) throw std::invalid_argument("Potential: empty coefficient list");
        const int p = degree();
        if (p % 2 != 0) throw std::invalid_argument("Potential: degree must be even");
        if (v_.back() <= 0.0) throw std::invalid_argument("Potential: leading coefficient must be positive");
    }

    Potential(std::initializer_list<double> v) : Potential(std::vector<double>(v)) {}

    /// Quartic family V(z) = (t/2) z^2 + (g/4) z^4.
    static Potential quartic(double t, double g = 1.0) {
        return Potential({0.0, t / 2.0, 0.0, g / 4.0});
    }

    static Potential gaussian() { return Potential({0.0, 1.0}); }

    int degree() const { return static_cast<int>(v_.size()); }

    /// Coefficient of z^j, 1 <= j <= p.
    double v(int j) const {
        if (j < 1 || j > degree()) return 0.0;
        return v_[static_cast<std::size_t>(j - 1)];
    }

    const std::vector<double>& coeffs() const { return v_; }

    bool is_even() const {
        for (int j = 1; j <= degree(); j += 2)
            if (v(j) != 0.0) return false;
        return true;
    }

    double operator()(double x) const {
        double r = 0.0;
        for (std::size_t k = v_.size(); k-- > 0;) r = (r + v_[k]) * x;
        return r;
    }

    /// V as a plain polynomial (constant term zero).
    Polynomial poly() const {
        std::vector<double> c(v_.size() + 1, 0.0);
        for (std::size_t k = 0; k < v_.size(); ++k) c[k + 1] = v_[k];
        return Polynomial(std::move(c));
    }

    /// V' as a polynomial of degree p-1.
    Polynomial derivative() const {
        std::vector<double> d(v_.size());
        for (std::size_t k = 0; k < v_.size(); ++k) d[k] = static_cast<double>(k + 1) * v_[k];
        return Polynomial(std::move(d));
    }

    /// The deformation toward the Gaussian,
    ///   V(z; t) = (1 - 1/t) z^2 + V(z / sqrt(t)),   1 <= t < infinity,
    /// which satisfies V(z; 1) = V(z) and V(z; t) -> z^2 as t -> infinity.
    Potential deform(double t) const {
        if (!(t >= 1.0)) throw std::domain_error("Potential::deform: requires t >= 1");
        std::vector<double> w(v_.size(), 0.0);
        const double rt = std::sqrt(t);
        double scale = 1.0 / rt;  // t^{-j/2}
        for (std::size_t k = 0; k < v_.size(); ++k) {
            w[k] = v_[k] * scale;
            scale /= rt;
        }
        w[1] += 1.0 - 1.0 / t;
        return Potential(std::move(w));
    }

    /// Comma-separated "v1,v2,...,vp" form used by the CLI.
    static Potential parse(const std::string& s) {
        std::vector<double> v;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            v.push_back(std::stod(item));
        }
        return Potential(std::move(v));
    }

    std::string to_string() const {
        std::ostringstream os;
        os.precision(17);
        for (std::size_t k = 0; k < v_.size(); ++k) {
            if (k) os << ",";
            os << v_[k];
        }
        return os.str();
    }

  private:
    std::vector<double> v_;
};

}  // namespace rmt
