#ifndef LEXDYN_OLS_HPP
#define LEXDYN_OLS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lexdyn/error.hpp"

namespace lexdyn {

/// Dense row-major design matrix.
class DesignMatrix {
  public:
    DesignMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

  private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

/// Householder QR of a design matrix with the target carried along.
///
/// No column pivoting: column order is preserved, so a regression on the
/// first p columns is read straight off the factorization. That makes nested
/// model comparisons (restricted vs. full, or a BIC scan over lag orders)
/// one factorization instead of one per candidate.
///
/// A column whose residual norm collapses during factorization is numerically
/// dependent on the columns before it; those indices are recorded and any
/// solve touching them throws CollinearError.
class QrLs {
  public:
    QrLs(const DesignMatrix& x, std::span<const double> y)
        : m_(x.rows()), p_(x.cols()), a_(m_ * p_), qty_(y.begin(), y.end()) {
        if (y.size() != m_)
            throw NumericError("QrLs: target length " + std::to_string(y.size()) +
                               " != design rows " + std::to_string(m_));
        if (m_ < p_)
            throw NumericError("QrLs: fewer rows than columns (" + std::to_string(m_) +
                               " < " + std::to_string(p_) + ")");
        for (std::size_t r = 0; r < m_; ++r)
            for (std::size_t c = 0; c < p_; ++c) a_[r * p_ + c] = x(r, c);
        factor();
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return p_; }

    const std::vector<int>& dependent_columns() const { return dependent_; }

    bool prefix_full_rank(std::size_t p) const {
        for (int c : dependent_)
            if (std::size_t(c) < p) return false;
        return true;
    }

    /// Residual sum of squares of the regression on the first p columns.
    double prefix_rss(std::size_t p) const {
        double s = 0.0;
        for (std::size_t i = p; i < m_; ++i) s += qty_[i] * qty_[i];
        return s;
    }

    double rss() const { return prefix_rss(p_); }

    /// Coefficients of the regression on the first p columns.
    std::vector<double> solve(std::size_t p) const {
        require_full_rank(p);
        std::vector<double> beta(p, 0.0);
        for (std::size_t jj = p; jj-- > 0;) {
            double s = qty_[jj];
            for (std::size_t k = jj + 1; k < p; ++k) s -= r(jj, k) * beta[k];
            beta[jj] = s / r(jj, jj);
        }
        return beta;
    }

    std::vector<double> solve() const { return solve(p_); }

    /// Standard errors of the full-model coefficients for a given residual
    /// variance: sqrt(sigma2 * diag((X'X)^-1)) via rows of R^-1.
    std::vector<double> coef_se(double sigma2) const {
        require_full_rank(p_);
        // K = R^-1, upper triangular
        std::vector<double> k(p_ * p_, 0.0);
        for (std::size_t j = p_; j-- > 0;) {
            k[j * p_ + j] = 1.0 / r(j, j);
            for (std::size_t i = j; i-- > 0;) {
                double s = 0.0;
                for (std::size_t l = i + 1; l <= j; ++l) s += r(i, l) * k[l * p_ + j];
                k[i * p_ + j] = -s / r(i, i);
            }
        }
        std::vector<double> se(p_);
        for (std::size_t i = 0; i < p_; ++i) {
            double s = 0.0;
            for (std::size_t j = i; j < p_; ++j) s += k[i * p_ + j] * k[i * p_ + j];
            se[i] = std::sqrt(sigma2 * s);
        }
        return se;
    }

  private:
    std::size_t m_, p_;
    std::vector<double> a_;    // reflectors below diagonal, R on and above
    std::vector<double> qty_;  // Q'y
    std::vector<int> dependent_;

    double r(std::size_t i, std::size_t j) const { return a_[i * p_ + j]; }

    void require_full_rank(std::size_t p) const {
        if (prefix_full_rank(p)) return;
        std::vector<int> cols;
        std::string msg = "rank-deficient design, dependent column(s):";
        for (int c : dependent_)
            if (std::size_t(c) < p) {
                cols.push_back(c);
                msg += " " + std::to_string(c);
            }
        throw CollinearError(msg, cols);
    }

    void factor() {
        const double eps = std::numeric_limits<double>::epsilon();
        // original column norms set the dependency tolerance
        std::vector<double> colnorm(p_, 0.0);
        for (std::size_t j = 0; j < p_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m_; ++i) s += a_[i * p_ + j] * a_[i * p_ + j];
            colnorm[j] = std::sqrt(s);
        }
        for (std::size_t j = 0; j < p_; ++j) {
            double norm = 0.0;
            for (std::size_t i = j; i < m_; ++i) norm += a_[i * p_ + j] * a_[i * p_ + j];
            norm = std::sqrt(norm);
            const double tol = double(std::max(m_, p_)) * eps * colnorm[j] + 1e-300;
            if (norm <= tol) {
                dependent_.push_back(int(j));
                for (std::size_t i = j; i < m_; ++i) a_[i * p_ + j] = 0.0;
                continue;
            }
            double ajj = a_[j * p_ + j];
            const double alpha = ajj >= 0.0 ? -norm : norm;
            // v = x - alpha*e1, stored below the diagonal with v_1 implicit
            const double v1 = ajj - alpha;
            a_[j * p_ + j] = alpha;
            const double denom = -alpha * v1;  // = ||v||^2 / 2
            for (std::size_t c = j + 1; c < p_; ++c) {
                double s = v1 * a_[j * p_ + c];
                for (std::size_t i = j + 1; i < m_; ++i) s += a_[i * p_ + j] * a_[i * p_ + c];
                s /= denom;
                a_[j * p_ + c] -= s * v1;
                for (std::size_t i = j + 1; i < m_; ++i) a_[i * p_ + c] -= s * a_[i * p_ + j];
            }
            double s = v1 * qty_[j];
            for (std::size_t i = j + 1; i < m_; ++i) s += a_[i * p_ + j] * qty_[i];
            s /= denom;
            qty_[j] -= s * v1;
            for (std::size_t i = j + 1; i < m_; ++i) qty_[i] -= s * a_[i * p_ + j];
        }
    }
};

struct OlsFit {
    std::vector<double> coef;
    double rss = 0.0;
    int df_resid = 0;
    std::vector<double> se;  // empty unless requested
};

/// Least squares by Householder QR. Throws CollinearError on rank-deficient
/// designs, naming the dependent columns.
inline OlsFit ols(const DesignMatrix& x, std::span<const double> y, bool with_se = false) {
    QrLs qr(x, y);
    OlsFit fit;
    fit.coef = qr.solve();
    fit.rss = qr.rss();
    fit.df_resid = int(x.rows()) - int(x.cols());
    if (with_se) {
        const double sigma2 = fit.df_resid > 0 ? fit.rss / double(fit.df_resid) : 0.0;
        fit.se = qr.coef_se(sigma2);
    }
    return fit;
}

}  // namespace lexdyn

#endif
