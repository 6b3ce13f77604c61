#pragma once

#include <cmath>
#include <vector>

#include "affcredit/context.hpp"
#include "affcredit/fourier.hpp"
#include "affcredit/quadrature.hpp"

namespace affcredit::credit {

/// Payment dates t = t_0 < t_1 < ... < t_N and the recovery fraction paid on default.
struct CdsSchedule {
    std::vector<double> dates;
    double recovery = 0.4;

    /// Dates t, t + 1/f, ..., up to T (the last date is T).
    static CdsSchedule regular(double t, double T, int payments_per_year, double recovery) {
        if (!(T > t) || payments_per_year < 1) throw InputError("CDS schedule: need T > t and a positive frequency");
        CdsSchedule s;
        s.recovery = recovery;
        const int n = static_cast<int>(std::ceil((T - t) * payments_per_year - 1e-9));
        for (int k = 0; k <= n; ++k) s.dates.push_back(std::min(T, t + static_cast<double>(k) / payments_per_year));
        return s;
    }

    void validate(double t, double T) const {
        if (dates.size() < 2) throw InputError("CDS schedule needs at least two dates");
        if (std::abs(dates.front() - t) > 1e-12) throw InputError("CDS schedule must start at the valuation time");
        for (std::size_t k = 1; k < dates.size(); ++k) {
            if (!(dates[k] > dates[k - 1])) throw InputError("CDS payment dates must be strictly increasing");
        }
        if (dates.back() > T + 1e-12) throw InputError("CDS payment dates must not exceed the maturity");
        if (!(recovery > 0.0 && recovery < 1.0)) throw InputError("recovery fraction must lie in (0, 1)");
    }
};

/// Exponential-affine payoff G(x) = sum_k c_k exp(z_k^T x).
struct PayoffBundle {
    struct Term {
        double c;
        CVector z;
    };
    std::vector<Term> terms;

    static PayoffBundle one(int d) { return {{{1.0, CVector::Zero(d)}}}; }
};

namespace detail {
inline double horizon(const PricingContext& ctx, double T) {
    const double tau = T - ctx.t;
    if (tau < 0.0) throw InputError("maturity precedes the valuation time");
    return tau;
}

inline void note(Diagnostics* diag, const PricingContext& ctx, std::size_t nodes = 0) {
    if (!diag) return;
    diag->quadrature_nodes += nodes;
    diag->riccati_tol = ctx.riccati.ode.rel_tol;
}
}  // namespace detail

/// P(tau > T | survival at t) = exp(Phi^P(T - t, 0) + Psi^P(T - t, 0)^T x).
inline double survival_probability(const PricingContext& ctx, double T, Diagnostics* diag = nullptr) {
    const double tau = detail::horizon(ctx, T);
    detail::note(diag, ctx);
    return std::exp(ctx.log_transform(Measure::P, CVector::Zero(ctx.dim()), tau).real());
}

/// Price of a zero-recovery payoff G(X_T) paid at T on survival. Exponents outside the
/// guaranteed domain (e.g. G = exp(L_T)) are admitted and checked for explosion.
inline double zero_recovery_value(const PricingContext& ctx, double T, const PayoffBundle& G,
                                  Diagnostics* diag = nullptr) {
    const double tau = detail::horizon(ctx, T);
    detail::note(diag, ctx);
    double acc = 0.0;
    for (const auto& term : G.terms) {
        if (term.z.size() != ctx.dim()) throw StructuralError("payoff exponent must have length d");
        acc += term.c * std::exp(ctx.log_transform(Measure::Q, term.z, tau)).real();
    }
    return acc;
}

/// Defaultable zero-coupon bond with zero recovery.
inline double defaultable_bond(const PricingContext& ctx, double T, Diagnostics* diag = nullptr) {
    return zero_recovery_value(ctx, T, PayoffBundle::one(ctx.dim()), diag);
}

inline double riskfree_bond(const PricingContext& ctx, double T, Diagnostics* diag = nullptr) {
    const double tau = detail::horizon(ctx, T);
    detail::note(diag, ctx);
    return ctx.riskfree_discount(tau);
}

struct TimeQuadrature {
    /// Breakpoints of the composite rule; each segment gets the same number of 8-node panels.
    std::vector<double> breakpoints;
    double tol = 1e-9;
    int max_refinements = 12;
};

namespace detail {

/// Composite 8-node Gauss-Legendre over the breakpoints, doubling panels per segment until
/// two successive estimates differ by less than tol.
template <class F>
double time_integral(F&& f, const TimeQuadrature& tq, std::size_t* nodes) {
    const auto& rule = quad::GaussLegendre<8>::get();
    auto estimate = [&](int panels) {
        std::vector<double> terms;
        for (std::size_t s = 1; s < tq.breakpoints.size(); ++s) {
            const double a = tq.breakpoints[s - 1];
            const double width = (tq.breakpoints[s] - a) / panels;
            for (int p = 0; p < panels; ++p) {
                const double mid = a + (p + 0.5) * width;
                for (int i = 0; i < 8; ++i) terms.push_back(0.5 * width * rule.w[i] * f(mid + 0.5 * width * rule.x[i]));
            }
        }
        if (nodes) *nodes += terms.size();
        return quad::pairwise_sum(terms);
    };
    double prev = estimate(1);
    for (int r = 1, panels = 2; r <= tq.max_refinements; ++r, panels *= 2) {
        const double cur = estimate(panels);
        if (std::abs(cur - prev) < tq.tol) return cur;
        prev = cur;
    }
    throw NumericalError("time quadrature did not converge");
}

inline TimeQuadrature default_grid(double t, double T) {
    TimeQuadrature tq;
    for (int k = 0; k <= 4; ++k) tq.breakpoints.push_back(t + (T - t) * k / 4.0);
    return tq;
}

}  // namespace detail

/// Price of G(X_tau) paid at default if tau <= T: int_t^T Pi(t,u) E^{Q^u}[lambda^Q_u G(X_u)] du.
/// The expectation of lambda^Q G is assembled from the transform and its derivative along Lambda^Q,
/// both read from one Riccati solve with dense output.
inline double pure_recovery_value(const PricingContext& ctx, double T, const PayoffBundle& G,
                                  const TimeQuadrature* grid = nullptr, Diagnostics* diag = nullptr) {
    const double tau = detail::horizon(ctx, T);
    if (tau == 0.0) return 0.0;
    const int d = ctx.dim();
    const SpecAffine& lq = ctx.q.lambda_q;
    if (lq.is_zero()) return 0.0;
    const CVector dir = lq.vec.cast<Complex>();
    const Vector& x = ctx.x;
    const CVector xc = x.cast<Complex>();

    std::size_t nodes = 0;
    double total = 0.0;
    for (const auto& term : G.terms) {
        if (term.z.size() != d) throw StructuralError("payoff exponent must have length d");
        const RiccatiSolution sol = solve(ctx.q.model, MeasureFlavor::risk_neutral(lq), ctx.q.rate, term.z, tau,
                                          ctx.riccati, {dir});
        auto integrand = [&](double u) {
            const double s = u - ctx.t;
            const ode::State y = sol.state(s);
            const Complex e = y(0) + (y.segment(1, d).transpose() * xc).value();
            const Complex de = y(d + 1) + (y.segment(d + 2, d).transpose() * xc).value();
            return (std::exp(e) * (lq.bar + de)).real();
        };
        const TimeQuadrature tq = grid ? *grid : detail::default_grid(ctx.t, T);
        total += term.c * detail::time_integral(integrand, tq, &nodes);
    }
    detail::note(diag, ctx, nodes);
    return total;
}

struct CdsLegs {
    double protection = 0.0;  // recovery-weighted pure-recovery value of 1
    double annuity = 0.0;     // sum (t_k - t_{k-1}) Pi(t, t_k)
    double spread() const { return protection / annuity; }
};

inline CdsLegs cds_legs(const PricingContext& ctx, const CdsSchedule& schedule, double T,
                        Diagnostics* diag = nullptr) {
    schedule.validate(ctx.t, T);
    TimeQuadrature tq;
    tq.breakpoints = schedule.dates;
    if (schedule.dates.back() < T) tq.breakpoints.push_back(T);
    CdsLegs legs;
    legs.protection = schedule.recovery * pure_recovery_value(ctx, T, PayoffBundle::one(ctx.dim()), &tq, diag);
    std::vector<double> terms;
    for (std::size_t k = 1; k < schedule.dates.size(); ++k) {
        terms.push_back((schedule.dates[k] - schedule.dates[k - 1]) * defaultable_bond(ctx, schedule.dates[k]));
    }
    legs.annuity = quad::pairwise_sum(terms);
    return legs;
}

/// Fair CDS spread: protection leg over the premium annuity.
inline double cds_spread(const PricingContext& ctx, const CdsSchedule& schedule, double T,
                         Diagnostics* diag = nullptr) {
    return cds_legs(ctx, schedule, T, diag).spread();
}

/// C - P - S_t + K Pi_rf(t, T); zero up to quadrature error when the discounted price is a martingale.
inline double parity_residual(const PricingContext& ctx, double K, double T,
                              const fourier::DampingConfig& damping = {}, const fourier::QuadratureConfig& qc = {}) {
    const double C = fourier::call_price(ctx, K, T, damping, qc);
    const double P = fourier::put_price(ctx, K, T, damping, qc);
    return C - P - ctx.spot() + K * riskfree_bond(ctx, T);
}

/// Coupon bond as a sum of zero-recovery zeros.
inline double coupon_bond(const PricingContext& ctx, const std::vector<double>& dates, const std::vector<double>& cash) {
    if (dates.size() != cash.size()) throw InputError("coupon dates and amounts differ in length");
    double v = 0.0;
    for (std::size_t k = 0; k < dates.size(); ++k) v += cash[k] * defaultable_bond(ctx, dates[k]);
    return v;
}

}  // namespace affcredit::credit
