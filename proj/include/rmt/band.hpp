#pragma once

#include <cstddef>
#include <vector>

namespace rmt {

/// Symmetric-storage band matrix used for polynomials of a Jacobi matrix.
/// Entry (i, j) is stored when |i - j| <= band.
class BandMatrix {
  public:
    BandMatrix(int size, int band) : n_(size), b_(band), a_(static_cast<std::size_t>(size) * (2 * band + 1), 0.0) {}

    int size() const { return n_; }
    int band() const { return b_; }

    double at(int i, int j) const {
        if (i < 0 || j < 0 || i >= n_ || j >= n_ || j - i > b_ || i - j > b_) return 0.0;
        return a_[idx(i, j)];
    }

    void set(int i, int j, double v) { a_[idx(i, j)] = v; }

    void add_diag(double v) {
        for (int i = 0; i < n_; ++i) a_[idx(i, i)] += v;
    }

    /// this * tridiag(diag, off) where off[i] couples rows i and i+1.
    BandMatrix mul_tridiag(const std::vector<double>& diag, const std::vector<double>& off) const {
        BandMatrix c(n_, b_ + 1);
        for (int i = 0; i < n_; ++i) {
            const int jlo = std::max(0, i - b_ - 1), jhi = std::min(n_ - 1, i + b_ + 1);
            for (int j = jlo; j <= jhi; ++j) {
                double s = at(i, j) * diag[static_cast<std::size_t>(j)];
                if (j > 0) s += at(i, j - 1) * off[static_cast<std::size_t>(j - 1)];
                if (j + 1 < n_) s += at(i, j + 1) * off[static_cast<std::size_t>(j)];
                c.set(i, j, s);
            }
        }
        return c;
    }

    double trace() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += a_[idx(i, i)];
        return s;
    }

  private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * (2 * b_ + 1) + static_cast<std::size_t>(j - i + b_);
    }

    int n_, b_;
    std::vector<double> a_;
};

}  // namespace rmt
