#pragma once

#include <cmath>
#include <numbers>

#include "affcredit/errors.hpp"

namespace affcredit::bs {

enum class OptionType { Call, Put };

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

/// Black-Scholes price with the discount factor D = exp(-rT) given directly; no dividends.
inline double price(OptionType type, double S0, double K, double T, double discount_factor, double vol) {
    const double F = S0 / discount_factor;
    const double sd = vol * std::sqrt(T);
    const double d1 = (std::log(F / K) + 0.5 * sd * sd) / sd;
    const double d2 = d1 - sd;
    if (type == OptionType::Call) return discount_factor * (F * norm_cdf(d1) - K * norm_cdf(d2));
    return discount_factor * (K * norm_cdf(-d2) - F * norm_cdf(-d1));
}

inline double vega(double S0, double K, double T, double discount_factor, double vol) {
    const double F = S0 / discount_factor;
    const double sd = vol * std::sqrt(T);
    const double d1 = (std::log(F / K) + 0.5 * sd * sd) / sd;
    return discount_factor * F * norm_pdf(d1) * std::sqrt(T);
}

/// Implied volatility on [1e-6, 5] by Newton steps kept inside a shrinking bisection bracket.
inline double implied_vol(double target, double S0, double K, double T, double discount_factor,
                          OptionType type = OptionType::Put) {
    if (!(S0 > 0.0) || !(K > 0.0) || !(T > 0.0) || !(discount_factor > 0.0)) {
        throw InputError("no implied vol: spot, strike, maturity and discount factor must be positive");
    }
    const double lower_bound = type == OptionType::Call ? std::max(0.0, S0 - K * discount_factor)
                                                        : std::max(0.0, K * discount_factor - S0);
    const double upper_bound = type == OptionType::Call ? S0 : K * discount_factor;
    if (!(target > lower_bound) || !(target < upper_bound)) {
        throw InputError("no implied vol: price outside the Black-Scholes no-arbitrage bounds");
    }
    double lo = 1e-6;
    double hi = 5.0;
    const double f_lo = price(type, S0, K, T, discount_factor, lo) - target;
    const double f_hi = price(type, S0, K, T, discount_factor, hi) - target;
    if (f_lo > 0.0 || f_hi < 0.0) throw InputError("no implied vol: price not attained for vol in [1e-6, 5]");

    double vol = 0.2;
    const double ftol = 1e-15 * std::max(1.0, target);
    for (int it = 0; it < 200; ++it) {
        const double f = price(type, S0, K, T, discount_factor, vol) - target;
        if (std::abs(f) <= ftol) return vol;
        (f > 0.0 ? hi : lo) = vol;
        const double v = vega(S0, K, T, discount_factor, vol);
        double next = v > 0.0 ? vol - f / v : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - vol) <= 1e-15 * vol || hi - lo <= 1e-15) return next;
        vol = next;
    }
    return vol;
}

}  // namespace affcredit::bs
