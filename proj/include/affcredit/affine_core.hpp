#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "affcredit/errors.hpp"

namespace affcredit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Parameters of the affine diffusion dX = (AX + b)dt + Sigma sqrt(R) dW on R^m_{++} x R^{d-m}.
///
/// R is diagonal with R_kk = alpha_k + sum_i beta(i, k) x_i, i.e. column k of beta
/// carries the loadings of the k-th diffusion channel. The state is ordered
/// (v, Y_1, ..., Y_{d-2}, L) with L the log pre-default stock price.
struct AffineModelParams {
    int d = 0;
    int m = 0;
    Matrix A;
    Vector b;
    Matrix Sigma;
    Vector alpha;
    Matrix beta;
    Vector x0;

    bool in_I(int i) const noexcept { return i < m; }
};

/// Affine functional c + C^T x, used for intensities and short rates.
struct SpecAffine {
    double bar = 0.0;
    Vector vec;

    double operator()(const Vector& x) const { return bar + vec.dot(x); }

    static SpecAffine constant(double c, int d) { return {c, Vector::Zero(d)}; }
    static SpecAffine zero(int d) { return {0.0, Vector::Zero(d)}; }

    bool is_zero() const { return bar == 0.0 && (vec.size() == 0 || vec.isZero(0.0)); }
};

/// One violated condition. Indices are 1-based to match the usual clause notation.
struct ValidationIssue {
    std::string clause;
    std::vector<int> indices;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const noexcept { return issues.empty(); }

    bool has(const std::string& clause) const {
        for (const auto& issue : issues) {
            if (issue.clause == clause) return true;
        }
        return false;
    }

    void add(std::string clause, std::vector<int> indices, double lhs, double rhs, std::string message) {
        issues.push_back({std::move(clause), std::move(indices), lhs, rhs, std::move(message)});
    }

    void append(const ValidationReport& other) {
        issues.insert(issues.end(), other.issues.begin(), other.issues.end());
    }

    std::string to_string() const {
        if (ok()) return "admissible";
        std::ostringstream os;
        for (const auto& issue : issues) {
            os << "clause " << issue.clause << " at (";
            for (std::size_t k = 0; k < issue.indices.size(); ++k) {
                os << (k ? "," : "") << issue.indices[k];
            }
            os << "): " << issue.message << " [lhs=" << issue.lhs << ", rhs=" << issue.rhs << "]\n";
        }
        return os.str();
    }
};

/// Raised when a model or premium fails validation; carries the structured report.
class ValidationError : public InputError {
public:
    explicit ValidationError(ValidationReport report)
        : InputError("validation failed:\n" + report.to_string()), report_(std::move(report)) {}

    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// Closed-form coefficients of the pre-default stock SDE.
struct StockCoefficients {
    double sbar = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    Vector eta;     // size d-2
    Vector etabar;  // size m-1
    double sigma = 0.0;
};

/// Throws StructuralError unless dimensions are consistent.
inline void check_structure(const AffineModelParams& p) {
    if (p.d < 2) throw StructuralError("dimension d must be at least 2");
    if (p.m < 1 || p.m > p.d - 1) throw StructuralError("m must lie in {1, ..., d-1}");
    const auto d = static_cast<Eigen::Index>(p.d);
    auto square = [d](const Matrix& M) { return M.rows() == d && M.cols() == d; };
    if (!square(p.A)) throw StructuralError("A must be d x d");
    if (!square(p.Sigma)) throw StructuralError("Sigma must be d x d");
    if (!square(p.beta)) throw StructuralError("beta must be d x d");
    if (p.b.size() != d) throw StructuralError("b must have length d");
    if (p.alpha.size() != d) throw StructuralError("alpha must have length d");
    if (p.x0.size() != d) throw StructuralError("x0 must have length d");
}

/// Checks the admissibility conditions (i)-(v) and the initial state. `slack` relaxes every
/// comparison by that amount; with the default 0 the boundary cases (equalities) pass.
inline ValidationReport validate_admissibility(const AffineModelParams& p, double slack = 0.0) {
    check_structure(p);
    ValidationReport report;
    const int d = p.d;
    const int m = p.m;

    for (int i = 0; i < m; ++i) {
        const double rhs = p.Sigma(i, i) * p.Sigma(i, i) * p.beta(i, i) / 2.0;
        if (p.b(i) < rhs - slack) {
            report.add("i", {i + 1}, p.b(i), rhs, "b_i must be >= Sigma_ii^2 beta_ii / 2");
        }
    }

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) {
            if (j >= m && std::abs(p.A(i, j)) > slack) {
                report.add("ii", {i + 1, j + 1}, p.A(i, j), 0.0, "A_ij must vanish for i in I, j in J");
            } else if (j < m && j != i && p.A(i, j) < -slack) {
                report.add("ii", {i + 1, j + 1}, p.A(i, j), 0.0, "A_ij must be >= 0 for i != j in I");
            }
        }
    }

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) {
            if (j != i && std::abs(p.Sigma(i, j)) > slack) {
                report.add("iii", {i + 1, j + 1}, p.Sigma(i, j), 0.0, "Sigma_ij must vanish for i in I, j != i");
            }
        }
    }

    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double v = p.beta(i, j);
            if (v < -slack) {
                report.add("iv", {i + 1, j + 1}, v, 0.0, "beta entries must be nonnegative");
            } else if (i >= m && std::abs(v) > slack) {
                report.add("iv", {i + 1, j + 1}, v, 0.0, "beta_ji must vanish for j in J");
            } else if (i < m && j < m && i != j && std::abs(v) > slack) {
                report.add("iv", {i + 1, j + 1}, v, 0.0, "beta_ij must vanish for i != j in I");
            }
        }
    }
    for (int i = 0; i < m; ++i) {
        if (!(p.beta(i, i) > -slack)) {
            report.add("iv", {i + 1, i + 1}, p.beta(i, i), 0.0, "beta_ii must be > 0 for i in I");
        }
    }

    for (int i = 0; i < m; ++i) {
        if (std::abs(p.alpha(i)) > slack) {
            report.add("v", {i + 1}, p.alpha(i), 0.0, "alpha_i must vanish for i in I");
        }
    }
    for (int j = m; j < d; ++j) {
        double bound = 0.0;
        for (int i = 0; i < m; ++i) bound -= p.beta(i, j);
        if (!(p.alpha(j) > bound - slack)) {
            report.add("v", {j + 1}, p.alpha(j), bound, "alpha_j must exceed -sum_{i in I} beta_ij");
        }
    }

    for (int i = 0; i < m; ++i) {
        if (!(p.x0(i) > 0.0)) {
            report.add("x0", {i + 1}, p.x0(i), 0.0, "initial state must be strictly positive on I");
        }
    }
    return report;
}

/// Checks an intensity or rate functional: nonnegative constant, loadings >= 0 on I and
/// zero on J, and (unless `allow_zero`) a strictly positive total.
inline ValidationReport validate_spec_affine(const SpecAffine& s, int d, int m, const std::string& clause,
                                             bool allow_zero = false) {
    ValidationReport report;
    if (s.vec.size() != d) throw StructuralError(clause + ": loading vector must have length d");
    if (s.bar < 0.0) report.add(clause, {0}, s.bar, 0.0, "constant term must be nonnegative");
    double total = s.bar;
    for (int i = 0; i < d; ++i) {
        if (i < m) {
            if (s.vec(i) < 0.0) report.add(clause, {i + 1}, s.vec(i), 0.0, "loading must be nonnegative on I");
            total += s.vec(i);
        } else if (s.vec(i) != 0.0) {
            report.add(clause, {i + 1}, s.vec(i), 0.0, "loading must vanish on J");
        }
    }
    if (!allow_zero && !(total > 0.0)) {
        report.add(clause, {}, total, 0.0, "constant plus loadings on I must be strictly positive");
    }
    return report;
}

inline Vector drift(const AffineModelParams& p, const Vector& x) { return p.A * x + p.b; }

/// Diagonal of R(x). Throws if an entry is not strictly positive at an interior state.
inline Vector diffusion_squared(const AffineModelParams& p, const Vector& x) {
    Vector r = p.alpha + p.beta.transpose() * x;
    bool interior = true;
    for (int i = 0; i < p.m; ++i) interior = interior && x(i) > 0.0;
    if (interior) {
        for (int k = 0; k < p.d; ++k) {
            if (!(r(k) > 0.0)) {
                throw InputError("admissibility inconsistency: R_" + std::to_string(k + 1) +
                                 " is not positive at an interior state");
            }
        }
    }
    return r;
}

inline StockCoefficients stock_coefficients(const AffineModelParams& p) {
    check_structure(p);
    const int d = p.d;
    const int m = p.m;
    const int last = d - 1;
    auto sq = [](double v) { return v * v; };

    StockCoefficients c;
    c.sbar = p.b(last);
    for (int k = m; k < d; ++k) c.sbar += 0.5 * sq(p.Sigma(last, k)) * p.alpha(k);
    c.mu1 = p.A(last, last);
    c.mu2 = p.A(last, 0) + 0.5 * sq(p.Sigma(last, 0)) * p.beta(0, 0);
    for (int k = m; k < d; ++k) c.mu2 += 0.5 * sq(p.Sigma(last, k)) * p.beta(0, k);

    c.eta.resize(d - 2);
    for (int i = 0; i < d - 2; ++i) c.eta(i) = p.A(last, i + 1);

    c.etabar.resize(m - 1);
    for (int i = 0; i < m - 1; ++i) {
        double v = 0.5 * sq(p.Sigma(last, i + 1)) * p.beta(i + 1, i + 1);
        for (int k = m; k < d; ++k) v += 0.5 * sq(p.Sigma(last, k)) * p.beta(i + 1, k);
        c.etabar(i) = v;
    }
    c.sigma = p.Sigma(last, 0) * std::sqrt(p.beta(0, 0));
    return c;
}

/// Drift of the pre-default price per unit of price, s + mu1 L + mu2 v + sum eta_i Y^i + sum etabar_i Y^i.
inline double stock_drift(const StockCoefficients& c, const Vector& x) {
    const auto d = x.size();
    double v = c.sbar + c.mu1 * x(d - 1) + c.mu2 * x(0);
    for (Eigen::Index i = 0; i < c.eta.size(); ++i) v += c.eta(i) * x(i + 1);
    for (Eigen::Index i = 0; i < c.etabar.size(); ++i) v += c.etabar(i) * x(i + 1);
    return v;
}

}  // namespace affcredit
