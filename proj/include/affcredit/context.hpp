#pragma once

#include <memory>
#include <utility>

#include "affcredit/heston_jtd.hpp"
#include "affcredit/measures.hpp"
#include "affcredit/riccati.hpp"

namespace affcredit {

/// Work counters reported next to a computed value.
struct Diagnostics {
    std::size_t quadrature_nodes = 0;
    double u_max = 0.0;
    double damping = 0.0;
    double riccati_tol = 0.0;
};

/// Everything a pre-default valuation at time t in state x needs: both measures, the rate,
/// solver options and an optional closed-form shortcut for the exponents.
struct PricingContext {
    AffineModelParams p_params;
    SpecAffine lambda_p;
    QModelParams q;
    double t = 0.0;
    Vector x;
    RiccatiOptions riccati;
    std::shared_ptr<const ExponentProvider> provider;

    const SpecAffine& rate() const noexcept { return q.rate; }
    int dim() const noexcept { return p_params.d; }
    double spot() const { return std::exp(x(dim() - 1)); }

    /// (Phi, Psi) for the killed (P) or killed-and-discounted (Q) transform at horizon `tau`.
    /// Arguments outside the guaranteed domain are accepted; explosions surface as MomentExplosion.
    Exponents exponents(Measure measure, const CVector& z, double tau) const {
        if (provider) {
            if (auto e = provider->exponents(measure, z, tau)) return *std::move(e);
        }
        RiccatiOptions opt = riccati;
        opt.allow_outside_domain = true;
        const RiccatiSolution s = measure == Measure::P
                                      ? solve(p_params, MeasureFlavor::physical(lambda_p), q.rate, z, tau, opt)
                                      : solve(q.model, MeasureFlavor::risk_neutral(q.lambda_q), q.rate, z, tau, opt);
        return {s.Phi(tau), s.Psi(tau)};
    }

    /// Exponent Phi + Psi^T x at horizon `tau`.
    Complex log_transform(Measure measure, const CVector& z, double tau) const {
        return exponents(measure, z, tau).exponent(x);
    }

    /// Default-free discount factor: z = 0, no intensity, rate discounting on, Q-dynamics.
    double riskfree_discount(double tau) const {
        const RiccatiSolution s = solve(q.model, MeasureFlavor::risk_neutral(SpecAffine::zero(dim())), q.rate,
                                        CVector::Zero(dim()), tau, riccati);
        return std::exp(s.exponent(tau, x).real());
    }

    CVector log_price_argument(Complex z) const {
        CVector v = CVector::Zero(dim());
        v(dim() - 1) = z;
        return v;
    }
};

/// Builds a context from P-parameters and a validated premium. The state defaults to x0.
inline PricingContext make_context(const AffineModelParams& params, const SpecAffine& lambda_p,
                                   const RiskPremiumSpec& premium, const SpecAffine& rate,
                                   const MeasureChangeOptions& mopt = {}, const RiccatiOptions& ropt = {}) {
    const ValidationReport adm = validate_admissibility(params);
    if (!adm.ok()) throw ValidationError(adm);
    const ValidationReport lp = validate_spec_affine(lambda_p, params.d, params.m, "intensity-P");
    if (!lp.ok()) throw ValidationError(lp);
    const ValidationReport rr = validate_spec_affine(rate, params.d, params.m, "rate", true);
    if (!rr.ok()) throw ValidationError(rr);

    PricingContext ctx;
    ctx.p_params = params;
    ctx.lambda_p = lambda_p;
    ctx.q = apply_measure_change(params, premium, rate, mopt);
    ctx.x = params.x0;
    ctx.riccati = ropt;
    return ctx;
}

namespace heston {

/// Context for the Heston jump-to-default model with closed-form exponents.
inline PricingContext make_context(const HestonJtdParams& h, const HestonPremium& p,
                                   const MeasureChangeOptions& mopt = {}, const RiccatiOptions& ropt = {},
                                   bool closed_form = true) {
    const ValidationReport r = validate_heston_preserving(h, p, mopt);
    if (!r.ok()) throw ValidationError(r);
    const AffineModel m = to_affine(h);
    PricingContext ctx = affcredit::make_context(m.params, m.lambda_p, full_premium(h, p), m.rate, mopt, ropt);
    if (closed_form) ctx.provider = std::make_shared<ClosedFormProvider>(h, p);
    return ctx;
}

}  // namespace heston
}  // namespace affcredit
