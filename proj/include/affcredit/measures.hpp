#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "affcredit/affine_core.hpp"
#include "affcredit/riccati.hpp"

namespace affcredit {

/// Market prices of risk: theta(x) = R(x)^{-1/2}(thetahat + Theta x) for the Brownian part,
/// and the risk-neutral intensity lambda^Q that fixes the default premium gamma.
struct RiskPremiumSpec {
    Vector thetahat;
    Matrix Theta;
    SpecAffine lambda_q;

    static RiskPremiumSpec zero(int d, SpecAffine lambda_q) {
        return {Vector::Zero(d), Matrix::Zero(d, d), std::move(lambda_q)};
    }
};

/// Risk-neutral model: the affine parameters with A^Q, b^Q in place of A, b.
struct QModelParams {
    AffineModelParams model;
    SpecAffine lambda_q;
    SpecAffine rate;
};

struct MeasureChangeOptions {
    /// Accept lambda^Q == 0, the default-free limit used for reference surfaces.
    bool allow_default_free = false;
};

/// Checks the premium conditions (clauses "premium-i", "premium-ii") and the risk-neutral
/// intensity (clause "intensity").
inline ValidationReport validate_premium(const AffineModelParams& params, const RiskPremiumSpec& p,
                                         const MeasureChangeOptions& opt = {}) {
    check_structure(params);
    const int d = params.d;
    const int m = params.m;
    if (p.thetahat.size() != d || p.Theta.rows() != d || p.Theta.cols() != d) {
        throw StructuralError("premium: thetahat must have length d and Theta must be d x d");
    }
    ValidationReport report;
    const Vector shift = params.Sigma * p.thetahat;
    for (int i = 0; i < m; ++i) {
        const double rhs = params.Sigma(i, i) * params.Sigma(i, i) * params.beta(i, i) / 2.0 - params.b(i);
        if (shift(i) < rhs) {
            report.add("premium-i", {i + 1}, shift(i), rhs, "sum_k Sigma_ik thetahat_k must be >= Sigma_ii^2 beta_ii/2 - b_i");
        }
    }
    const Matrix ST = params.Sigma * p.Theta;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) {
            if (j >= m && ST(i, j) != 0.0) {
                report.add("premium-ii", {i + 1, j + 1}, ST(i, j), 0.0, "(Sigma Theta)_ij must vanish for i in I, j in J");
            } else if (j < m && j != i && ST(i, j) < -params.A(i, j)) {
                report.add("premium-ii", {i + 1, j + 1}, ST(i, j), -params.A(i, j),
                           "(Sigma Theta)_ij must be >= -A_ij for i != j in I");
            }
        }
    }
    report.append(validate_spec_affine(p.lambda_q, d, m, "intensity", opt.allow_default_free));
    return report;
}

/// Girsanov parameter map (A, b) -> (A + Sigma Theta, b + Sigma thetahat). Throws ValidationError
/// naming the violated clause; the result is re-checked for admissibility.
inline QModelParams apply_measure_change(const AffineModelParams& params, const RiskPremiumSpec& p,
                                         const SpecAffine& rate, const MeasureChangeOptions& opt = {}) {
    const ValidationReport report = validate_premium(params, p, opt);
    if (!report.ok()) throw ValidationError(report);

    QModelParams q{params, p.lambda_q, rate};
    q.model.A = params.A + params.Sigma * p.Theta;
    q.model.b = params.b + params.Sigma * p.thetahat;

    ValidationReport adm = validate_admissibility(q.model);
    if (!adm.ok()) throw ValidationError(adm);
    return q;
}

/// Coefficients of (lhs - rhs) in the risk-neutral drift restriction, which is affine in the state
/// once theta(x) is substituted.
struct ResidualReport {
    double constant = 0.0;
    Vector state;  // one coefficient per state component, log-price last
    double tol = 1e-12;
    std::vector<std::string> notes;

    double max_abs() const {
        double m = std::abs(constant);
        for (Eigen::Index i = 0; i < state.size(); ++i) m = std::max(m, std::abs(state(i)));
        return m;
    }
    bool pass() const { return max_abs() < tol; }
};

/// Matches the stock drift under Q channel by channel against r + lambda^Q.
/// `lambda_p` only enters through lambda^P (1 + gamma) = lambda^Q, so it is validated but
/// does not affect the residuals.
inline ResidualReport verify_drift_condition(const AffineModelParams& params, const RiskPremiumSpec& p,
                                             const SpecAffine& rate, const SpecAffine& lambda_p,
                                             double tol = 1e-12) {
    check_structure(params);
    const int d = params.d;
    const int m = params.m;
    const int last = d - 1;
    if (lambda_p.vec.size() != d || rate.vec.size() != d || p.lambda_q.vec.size() != d) {
        throw StructuralError("drift check: affine functionals must have length d");
    }
    const StockCoefficients c = stock_coefficients(params);
    const Vector sigma_row = params.Sigma.row(last).transpose();

    ResidualReport r;
    r.tol = tol;
    r.constant = c.sbar + sigma_row.dot(p.thetahat) - rate.bar - p.lambda_q.bar;

    Vector drift_coef = Vector::Zero(d);
    drift_coef(0) = c.mu2;
    for (int i = 1; i < last; ++i) {
        drift_coef(i) = c.eta(i - 1) + (i <= m - 1 ? c.etabar(i - 1) : 0.0);
    }
    drift_coef(last) = c.mu1;
    const Vector theta_row = p.Theta.transpose() * sigma_row;
    r.state = drift_coef + theta_row - rate.vec - p.lambda_q.vec;

    if (c.mu1 != 0.0 && std::abs(r.state(last)) >= tol) {
        r.notes.emplace_back("no structure-preserving risk-neutral measure with this A_dd: the log-price "
                             "channel is not offset by the premium");
    }
    if (!validate_spec_affine(lambda_p, d, m, "intensity-P").ok()) {
        r.notes.emplace_back("physical intensity violates its positivity conditions");
    }
    return r;
}

struct RiskPremia {
    Vector theta;
    double gamma = 0.0;
};

/// Pointwise risk premia at an interior state.
inline RiskPremia risk_premia_at(const AffineModelParams& params, const RiskPremiumSpec& p,
                                 const SpecAffine& lambda_p, const Vector& x) {
    check_structure(params);
    for (int i = 0; i < params.m; ++i) {
        if (!(x(i) > 0.0)) throw InputError("risk premia are only defined at interior states");
    }
    const Vector R = diffusion_squared(params, x);
    const double lp = lambda_p(x);
    if (!(lp > 0.0)) throw InputError("physical intensity vanishes at this state");

    RiskPremia out;
    out.theta = (p.thetahat + p.Theta * x).cwiseQuotient(R.cwiseSqrt());
    out.gamma = (p.lambda_q(x) - lp) / lp;
    return out;
}

/// Characteristic function of X_T under the T-survival measure, conditional on X_t = x.
inline Complex survival_cf_P(const AffineModelParams& params, const SpecAffine& lambda_p, const CVector& z, double t,
                             double T, const Vector& x, const RiccatiOptions& opt = {}) {
    if (T < t) throw InputError("survival characteristic function requires t <= T");
    const auto flavor = MeasureFlavor::physical(lambda_p);
    const SpecAffine no_rate = SpecAffine::zero(params.d);
    const auto sz = solve(params, flavor, no_rate, z, T - t, opt);
    const auto s0 = solve(params, flavor, no_rate, CVector::Zero(params.d), T - t, opt);
    return std::exp(sz.exponent(T - t, x) - s0.exponent(T - t, x));
}

/// Characteristic function of X_u under the u-survival risk-neutral measure.
inline Complex survival_cf_Q(const QModelParams& q, const CVector& z, double t, double u, const Vector& x,
                             const RiccatiOptions& opt = {}) {
    if (u < t) throw InputError("survival characteristic function requires t <= u");
    const auto flavor = MeasureFlavor::risk_neutral(q.lambda_q);
    const auto sz = solve(q.model, flavor, q.rate, z, u - t, opt);
    const auto s0 = solve(q.model, flavor, q.rate, CVector::Zero(q.model.d), u - t, opt);
    return std::exp(sz.exponent(u - t, x) - s0.exponent(u - t, x));
}

}  // namespace affcredit
