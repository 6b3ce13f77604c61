#pragma once

#include <random>

#include "affcredit/affcredit.hpp"

namespace fixtures {

using namespace affcredit;

inline heston::HestonJtdParams calibrated_heston() {
    heston::HestonJtdParams h;
    h.k = 0.565;
    h.vhat = 0.07;
    h.sigmabar = 0.281;
    h.k0 = 0.325;
    h.yhat = 0.003;
    h.sigma0 = 0.036;
    h.mu = 0.1;
    h.rho = -0.558;
    h.rbar = 0.0;
    h.lambda_p = {0.1225, 0.1225, 0.1225};
    h.v0 = 0.07;
    h.y0 = 0.003;
    h.s0 = 1.0;
    return h;
}

inline heston::HestonPremium calibrated_premium(double lambda_bar_q = 0.001) {
    heston::HestonPremium p;
    p.theta1hat = 0.001;
    p.theta2hat = 0.001;
    p.Theta11 = 0.002;
    p.Theta22 = 0.002;
    p.lambda_q = {lambda_bar_q, 0.1225, 0.1225};
    return p;
}

inline PricingContext calibrated_context(bool closed_form = true) {
    return heston::make_context(calibrated_heston(), calibrated_premium(), {}, {}, closed_form);
}

/// Default-free reference: same model with zero risk-neutral intensity.
inline PricingContext default_free_context() {
    auto p = calibrated_premium();
    p.lambda_q = {0.0, 0.0, 0.0};
    return heston::make_context(calibrated_heston(), p, {true});
}

/// One square-root factor v and a log-price: X = (v, L).
inline AffineModelParams sv_params(double k = 1.2, double theta = 0.05, double sigma = 0.3, double rho = -0.5,
                                   double mu = 0.05) {
    AffineModelParams p;
    p.d = 2;
    p.m = 1;
    p.A = Matrix::Zero(2, 2);
    p.A(0, 0) = -k;
    p.A(1, 0) = -0.5;
    p.b = Vector(2);
    p.b << k * theta, mu;
    p.Sigma = Matrix::Zero(2, 2);
    p.Sigma(0, 0) = sigma;
    p.Sigma(1, 0) = rho;
    p.Sigma(1, 1) = std::sqrt(1.0 - rho * rho);
    p.alpha = Vector::Zero(2);
    p.beta = Matrix::Zero(2, 2);
    p.beta(0, 0) = 1.0;
    p.beta(0, 1) = 1.0;
    p.x0 = Vector(2);
    p.x0 << theta, 0.0;
    return p;
}

inline SpecAffine constant(double c, int d) { return SpecAffine::constant(c, d); }

/// Constant hazard `lambda` under both measures and constant rate `r`.
inline PricingContext constant_hazard_context(double lambda, double r) {
    const AffineModelParams p = sv_params();
    const SpecAffine lam = constant(lambda, 2);
    return make_context(p, lam, RiskPremiumSpec::zero(2, lam), constant(r, 2));
}

inline double uniform(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

/// Random admissible model with d = 3, m = 2: two square-root factors (possibly coupled through
/// a nonnegative off-diagonal drift) and a log-price.
inline AffineModelParams random_admissible(std::mt19937_64& g) {
    AffineModelParams p;
    p.d = 3;
    p.m = 2;
    p.A = Matrix::Zero(3, 3);
    p.Sigma = Matrix::Zero(3, 3);
    p.beta = Matrix::Zero(3, 3);
    p.alpha = Vector::Zero(3);
    p.b = Vector(3);
    p.x0 = Vector(3);
    for (int i = 0; i < 2; ++i) {
        p.A(i, i) = -uniform(g, 0.1, 3.0);
        p.Sigma(i, i) = uniform(g, 0.05, 0.8);
        p.beta(i, i) = 1.0;
        p.b(i) = p.Sigma(i, i) * p.Sigma(i, i) / 2.0 * uniform(g, 1.0, 3.0);
        p.x0(i) = uniform(g, 0.01, 0.5);
    }
    p.A(0, 1) = uniform(g, 0.0, 0.3);
    p.A(2, 0) = -0.5;
    p.beta(0, 2) = 1.0;
    p.alpha(2) = uniform(g, 0.0, 0.1);
    const double rho = uniform(g, -0.9, 0.9);
    p.Sigma(2, 0) = rho;
    p.Sigma(2, 2) = std::sqrt(1.0 - rho * rho);
    p.b(2) = uniform(g, -0.1, 0.2);
    p.x0(2) = 0.0;
    return p;
}

}  // namespace fixtures

namespace fixtures {

/// Premium for `p` (d = 3, m = 2) that satisfies both premium clauses, with a valid lambda^Q.
inline affcredit::RiskPremiumSpec random_valid_premium(const affcredit::AffineModelParams& p, std::mt19937_64& g) {
    using namespace affcredit;
    RiskPremiumSpec r;
    r.thetahat = Vector(3);
    r.Theta = Matrix::Zero(3, 3);
    for (int i = 0; i < 2; ++i) {
        const double lo = (p.Sigma(i, i) * p.Sigma(i, i) * p.beta(i, i) / 2.0 - p.b(i)) / p.Sigma(i, i);
        r.thetahat(i) = uniform(g, lo, 0.5);
        r.Theta(i, i) = uniform(g, -1.0, 1.0);
    }
    r.thetahat(2) = uniform(g, -1.0, 1.0);
    r.Theta(0, 1) = uniform(g, -p.A(0, 1) / p.Sigma(0, 0), 1.0);
    r.Theta(1, 0) = uniform(g, -p.A(1, 0) / p.Sigma(1, 1), 1.0);
    for (int j = 0; j < 3; ++j) r.Theta(2, j) = uniform(g, -1.0, 1.0);
    r.lambda_q = SpecAffine{uniform(g, 0.0, 0.2), Vector::Zero(3)};
    r.lambda_q.vec(0) = uniform(g, 0.0, 0.5);
    r.lambda_q.vec(1) = uniform(g, 0.0, 0.5);
    return r;
}

}  // namespace fixtures
