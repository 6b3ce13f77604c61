#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "affcredit/affine_core.hpp"
#include "affcredit/measures.hpp"
#include "affcredit/riccati.hpp"

namespace affcredit::heston {

/// Heston stochastic volatility with an extra CIR factor Y and a jump to default whose
/// intensity loads on v and Y. State (v, Y, L).
struct HestonJtdParams {
    double k = 0.0;
    double vhat = 0.0;
    double sigmabar = 0.0;
    double k0 = 0.0;
    double yhat = 0.0;
    double sigma0 = 0.0;
    double mu = 0.0;
    double rho = 0.0;
    double rbar = 0.0;
    std::array<double, 3> lambda_p{};  // (constant, loading on v, loading on Y)
    double v0 = 0.0;
    double y0 = 0.0;
    double s0 = 1.0;
};

/// Free parameters of a measure change that keeps the Heston jump-to-default form.
/// The cross terms Theta_12 and Theta_21 are absent on purpose: only diagonal premia stay
/// in the closed-form class.
struct HestonPremium {
    double theta1hat = 0.0;
    double theta2hat = 0.0;
    double Theta11 = 0.0;
    double Theta22 = 0.0;
    std::array<double, 3> lambda_q{};
};

/// Generic model bundle: diffusion parameters, physical intensity and short rate.
struct AffineModel {
    AffineModelParams params;
    SpecAffine lambda_p;
    SpecAffine rate;
};

inline ValidationReport validate_params(const HestonJtdParams& h) {
    ValidationReport r;
    if (h.k * h.vhat < h.sigmabar * h.sigmabar / 2.0) {
        r.add("feller-v", {1}, h.k * h.vhat, h.sigmabar * h.sigmabar / 2.0, "k vhat must be >= sigmabar^2/2");
    }
    if (h.k0 * h.yhat < h.sigma0 * h.sigma0 / 2.0) {
        r.add("feller-y", {2}, h.k0 * h.yhat, h.sigma0 * h.sigma0 / 2.0, "k0 yhat must be >= sigma0^2/2");
    }
    if (!(h.rho * h.rho <= 1.0)) r.add("rho", {}, h.rho * h.rho, 1.0, "correlation must lie in [-1, 1]");
    if (h.rbar < 0.0) r.add("rate", {}, h.rbar, 0.0, "risk-free rate must be nonnegative");
    const auto& l = h.lambda_p;
    if (l[0] < 0.0 || l[1] < 0.0 || l[2] < 0.0 || !(l[0] + l[1] + l[2] > 0.0)) {
        r.add("intensity-P", {}, l[0] + l[1] + l[2], 0.0, "physical intensity must be nonnegative with positive sum");
    }
    if (!(h.v0 > 0.0)) r.add("x0", {1}, h.v0, 0.0, "initial variance must be positive");
    if (!(h.y0 > 0.0)) r.add("x0", {2}, h.y0, 0.0, "initial factor must be positive");
    if (!(h.s0 > 0.0)) r.add("x0", {3}, h.s0, 0.0, "initial stock price must be positive");
    return r;
}

/// Embeds the Heston jump-to-default model in the generic affine parametrization.
inline AffineModel to_affine(const HestonJtdParams& h) {
    const ValidationReport r = validate_params(h);
    if (!r.ok()) throw StructuralError("invalid Heston jump-to-default parameters:\n" + r.to_string());

    AffineModel out;
    auto& p = out.params;
    p.d = 3;
    p.m = 2;
    p.A = Matrix::Zero(3, 3);
    p.A(0, 0) = -h.k;
    p.A(1, 1) = -h.k0;
    p.A(2, 0) = -0.5;
    p.b = Vector(3);
    p.b << h.k * h.vhat, h.k0 * h.yhat, h.mu;
    p.Sigma = Matrix::Zero(3, 3);
    p.Sigma(0, 0) = h.sigmabar;
    p.Sigma(1, 1) = h.sigma0;
    p.Sigma(2, 0) = h.rho;
    p.Sigma(2, 2) = std::sqrt(std::max(0.0, 1.0 - h.rho * h.rho));
    p.alpha = Vector::Zero(3);
    p.beta = Matrix::Zero(3, 3);
    p.beta(0, 0) = 1.0;  // R_11 = v
    p.beta(1, 1) = 1.0;  // R_22 = Y
    p.beta(0, 2) = 1.0;  // R_33 = v
    p.x0 = Vector(3);
    p.x0 << h.v0, h.y0, std::log(h.s0);

    out.lambda_p = SpecAffine{h.lambda_p[0], Vector::Zero(3)};
    out.lambda_p.vec(0) = h.lambda_p[1];
    out.lambda_p.vec(1) = h.lambda_p[2];
    out.rate = SpecAffine::constant(h.rbar, 3);
    return out;
}

inline SpecAffine intensity_q(const HestonPremium& p) {
    SpecAffine s{p.lambda_q[0], Vector::Zero(3)};
    s.vec(0) = p.lambda_q[1];
    s.vec(1) = p.lambda_q[2];
    return s;
}

/// Completes (thetahat, Theta): the log-price row is pinned down by the drift restriction.
inline RiskPremiumSpec full_premium(const HestonJtdParams& h, const HestonPremium& p) {
    const double rr = 1.0 - h.rho * h.rho;
    if (!(rr > 0.0)) throw InputError("degenerate correlation, premium not representable");
    const double sq = std::sqrt(rr);
    RiskPremiumSpec out;
    out.thetahat = Vector(3);
    out.thetahat << p.theta1hat, p.theta2hat, (h.rbar + p.lambda_q[0] - h.mu - h.rho * p.theta1hat) / sq;
    out.Theta = Matrix::Zero(3, 3);
    out.Theta(0, 0) = p.Theta11;
    out.Theta(1, 1) = p.Theta22;
    out.Theta(2, 0) = (p.lambda_q[1] - h.rho * p.Theta11) / sq;
    out.Theta(2, 1) = p.lambda_q[2] / sq;
    out.lambda_q = intensity_q(p);
    return out;
}

/// Checks that the premium keeps the Heston jump-to-default structure and that the assembled
/// premium satisfies the generic conditions and the drift restriction.
inline ValidationReport validate_heston_preserving(const HestonJtdParams& h, const HestonPremium& p,
                                                   const MeasureChangeOptions& opt = {}) {
    ValidationReport r;
    if (!(h.rho * h.rho < 1.0)) {
        r.add("correlation", {}, h.rho * h.rho, 1.0, "degenerate correlation, premium not representable");
        return r;
    }
    const double b1 = h.sigmabar / 2.0 - h.k * h.vhat / h.sigmabar;
    if (p.theta1hat < b1) r.add("theta1", {1}, p.theta1hat, b1, "thetahat_1 must be >= sigmabar/2 - k vhat/sigmabar");
    const double b2 = h.sigma0 / 2.0 - h.k0 * h.yhat / h.sigma0;
    if (p.theta2hat < b2) r.add("theta2", {2}, p.theta2hat, b2, "thetahat_2 must be >= sigma0/2 - k0 yhat/sigma0");

    const AffineModel model = to_affine(h);
    const RiskPremiumSpec full = full_premium(h, p);
    r.append(validate_premium(model.params, full, opt));
    const ResidualReport res = verify_drift_condition(model.params, full, model.rate, model.lambda_p);
    if (!res.pass()) r.add("drift", {}, res.max_abs(), 0.0, "drift restriction residual is nonzero");
    return r;
}

namespace detail {

/// (1 - e^{-x}) / x, with a series near 0 so that the degenerate discriminant is handled.
inline Complex one_minus_exp_over(Complex x) {
    if (std::abs(x) < 1e-4) return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    return (1.0 - std::exp(-x)) / x;
}

/// Scalar Riccati block psi' = a psi^2/2 + c psi - q/2, psi(0) = z, with the companion
/// drift integral (2 b / a) * log(...) contributed to Phi.
struct CirBlock {
    double a;  // squared volatility
    double b;  // drift constant multiplying psi in Phi
    Complex c;
    Complex q;
    Complex z;

    Complex root() const { return std::sqrt(c * c + a * q); }

    // G(t) = ((1 + e) - (c + a z) h) / 2, G(0) = 1; psi and the log term are rational in G.
    Complex G(Complex s, double t) const {
        const Complex x = s * t;
        const Complex e = std::exp(-x);
        const Complex h = t * one_minus_exp_over(x);
        return 0.5 * ((1.0 + e) - (c + a * z) * h);
    }

    Complex psi(double t) const {
        const Complex s = root();
        const Complex x = s * t;
        const Complex e = std::exp(-x);
        const Complex h = t * one_minus_exp_over(x);
        const Complex num = q * h - ((1.0 + e) + c * h) * z;
        const Complex den = (1.0 + e) - c * h - a * h * z;
        return -num / den;
    }

    /// log G(t) continued from G(0) = 1 along [0, t].
    Complex log_G(double t) const {
        const Complex s = root();
        const Complex gt = G(s, t);
        if (t == 0.0) return 0.0;
        for (int n = 8; n <= (1 << 16); n *= 2) {
            double phase = 0.0;
            Complex prev = 1.0;
            bool fine = true;
            for (int k = 1; k <= n; ++k) {
                const Complex cur = k == n ? gt : G(s, t * k / n);
                const double inc = std::arg(cur / prev);
                if (std::abs(inc) >= std::numbers::pi / 2) {
                    fine = false;
                    break;
                }
                phase += inc;
                prev = cur;
            }
            if (fine) return {std::log(std::abs(gt)), phase};
        }
        throw NumericalError("closed-form Riccati: logarithm phase could not be unwound");
    }

    Complex drift_integral(double t) const {
        const Complex s = root();
        return (2.0 * b / a) * (-(s + c) * t / 2.0 - log_G(t));
    }
};

inline Exponents assemble(const CirBlock& v, const CirBlock& y, Complex z3, Complex linear, double t) {
    Exponents out;
    out.Psi = CVector(3);
    out.Psi << v.psi(t), y.psi(t), z3;
    out.Phi = v.drift_integral(t) + y.drift_integral(t) + linear * t;
    return out;
}

inline void require_volatilities(const HestonJtdParams& h) {
    if (!(h.sigmabar > 0.0) || !(h.sigma0 > 0.0)) {
        throw InputError("closed-form Riccati requires strictly positive volatility parameters");
    }
}

}  // namespace detail

/// Explicit risk-neutral (Phi, Psi) at horizon t for a structure-preserving premium.
inline Exponents closed_form_riccati(const HestonJtdParams& h, const HestonPremium& p, const CVector& z, double t) {
    detail::require_volatilities(h);
    if (z.size() != 3) throw StructuralError("closed-form Riccati expects a 3-vector");
    if (t < 0.0) throw InputError("closed-form Riccati requires t >= 0");
    const Complex z3 = z(2);
    const double s2 = h.sigmabar * h.sigmabar;
    const double g2 = h.sigma0 * h.sigma0;
    const detail::CirBlock v{s2, h.k * h.vhat + h.sigmabar * p.theta1hat,
                             h.sigmabar * (p.Theta11 + h.rho * z3) - h.k,
                             z3 - z3 * z3 + 2.0 * p.lambda_q[1] * (1.0 - z3), z(0)};
    const detail::CirBlock y{g2, h.k0 * h.yhat + h.sigma0 * p.theta2hat, Complex(h.sigma0 * p.Theta22 - h.k0, 0.0),
                             2.0 * p.lambda_q[2] * (1.0 - z3), z(1)};
    return detail::assemble(v, y, z3, (h.rbar + p.lambda_q[0]) * (z3 - 1.0), t);
}

/// Explicit physical (Phi, Psi): killed at lambda^P, no discounting.
inline Exponents closed_form_riccati_p(const HestonJtdParams& h, const CVector& z, double t) {
    detail::require_volatilities(h);
    if (z.size() != 3) throw StructuralError("closed-form Riccati expects a 3-vector");
    if (t < 0.0) throw InputError("closed-form Riccati requires t >= 0");
    const Complex z3 = z(2);
    const detail::CirBlock v{h.sigmabar * h.sigmabar, h.k * h.vhat, h.sigmabar * h.rho * z3 - h.k,
                             z3 - z3 * z3 + 2.0 * h.lambda_p[1], z(0)};
    const detail::CirBlock y{h.sigma0 * h.sigma0, h.k0 * h.yhat, Complex(-h.k0, 0.0), Complex(2.0 * h.lambda_p[2], 0.0),
                             z(1)};
    return detail::assemble(v, y, z3, h.mu * z3 - h.lambda_p[0], t);
}

/// Closed-form exponents for pricing contexts built from a Heston jump-to-default model.
class ClosedFormProvider : public ExponentProvider {
public:
    ClosedFormProvider(HestonJtdParams h, HestonPremium p) : h_(h), p_(p) { detail::require_volatilities(h_); }

    std::optional<Exponents> exponents(Measure measure, const CVector& z, double horizon) const override {
        return measure == Measure::P ? closed_form_riccati_p(h_, z, horizon) : closed_form_riccati(h_, p_, z, horizon);
    }

private:
    HestonJtdParams h_;
    HestonPremium p_;
};

}  // namespace affcredit::heston
