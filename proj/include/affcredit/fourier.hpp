#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>
#include <vector>

#include "affcredit/black_scholes.hpp"
#include "affcredit/context.hpp"
#include "affcredit/quadrature.hpp"

namespace affcredit::fourier {

struct QuadratureConfig {
    double tol = 1e-9;
    double u_cap = 65536.0;
};

/// Damping exponents for the call (w > 1) and put (y < 0) integrals.
struct DampingConfig {
    double w = 1.5;
    double y = -0.5;
    /// On a moment explosion at w (resp. y), retry once with 1.25 (resp. -0.25).
    bool fallback = true;
};

namespace detail {

inline double horizon(const PricingContext& ctx, double T) {
    const double tau = T - ctx.t;
    if (!(tau > 0.0)) throw InputError("maturity must exceed the valuation time");
    return tau;
}

inline bool moment_exists(const PricingContext& ctx, double value, double tau) {
    RiccatiOptions opt = ctx.riccati;
    opt.allow_outside_domain = true;
    try {
        solve(ctx.q.model, MeasureFlavor::risk_neutral(ctx.q.lambda_q), ctx.q.rate, ctx.log_price_argument(value),
              tau, opt);
        return true;
    } catch (const MomentExplosion&) {
        return false;
    }
}

}  // namespace detail

/// Checks the Riccati system at the real argument (0, ..., 0, value) up to `tau`, falling back
/// once if allowed. Returns the damping actually usable.
inline double resolve_damping(const PricingContext& ctx, double value, double fallback_value, bool fallback,
                              double tau) {
    if (detail::moment_exists(ctx, value, tau)) return value;
    if (fallback && value != fallback_value && detail::moment_exists(ctx, fallback_value, tau)) return fallback_value;
    throw NumericalError("damping parameter outside moment domain");
}

/// P(S_T <= x_level, tau > T | survival at t) by Fourier inversion of the survival-measure
/// characteristic function of the log-price.
inline double survival_distribution(const PricingContext& ctx, double x_level, double T,
                                    const QuadratureConfig& qc = {}, Diagnostics* diag = nullptr) {
    if (!(x_level > 0.0)) throw InputError("distribution level must be positive");
    const double tau = detail::horizon(ctx, T);
    const int d = ctx.dim();
    const Complex e0 = ctx.log_transform(Measure::P, CVector::Zero(d), tau);
    const double surv = std::exp(e0.real());
    const double logx = std::log(x_level);

    auto f = [&](double y) {
        // The integrand has a removable singularity at 0; near it the value at 1e-6 is used.
        const double yy = std::max(y, 1e-6);
        const Complex e = ctx.log_transform(Measure::P, ctx.log_price_argument(Complex(0.0, yy)), tau);
        return std::exp(e - e0 + Complex(0.0, -yy * logx)).imag() / yy;
    };
    const quad::SemiInfiniteResult r = quad::integrate_half_line(f, qc.tol, qc.u_cap);
    if (diag) {
        diag->quadrature_nodes += r.evaluations;
        diag->u_max = r.u_max;
        diag->riccati_tol = ctx.riccati.ode.rel_tol;
    }
    const double value = surv * (0.5 - r.value / std::numbers::pi);
    return std::clamp(value, 0.0, surv);
}

namespace detail {

/// (1/pi) * int_0^inf Re(exp(E(a + iu)) K^{-(a - 1 + iu)} / ((a + iu)(a - 1 + iu))) du.
inline double damped_integral(const PricingContext& ctx, double K, double tau, double a, const QuadratureConfig& qc,
                              Diagnostics* diag) {
    const double logK = std::log(K);
    auto f = [&](double u) {
        const Complex z(a, u);
        const Complex e = ctx.log_transform(Measure::Q, ctx.log_price_argument(z), tau);
        return (std::exp(e - (z - 1.0) * logK) / (z * (z - 1.0))).real();
    };
    const quad::SemiInfiniteResult r = quad::integrate_half_line(f, qc.tol, qc.u_cap);
    if (diag) {
        diag->quadrature_nodes += r.evaluations;
        diag->u_max = r.u_max;
        diag->damping = a;
        diag->riccati_tol = ctx.riccati.ode.rel_tol;
    }
    return r.value / std::numbers::pi;
}

}  // namespace detail

/// Defaultable call: pays (S_T - K)^+ on survival, nothing after default.
inline double call_price(const PricingContext& ctx, double K, double T, const DampingConfig& damping = {},
                         const QuadratureConfig& qc = {}, Diagnostics* diag = nullptr) {
    if (!(K > 0.0)) throw InputError("strike must be positive");
    if (!(damping.w > 1.0)) throw InputError("call damping w must exceed 1");
    const double tau = detail::horizon(ctx, T);
    const double w = resolve_damping(ctx, damping.w, 1.25, damping.fallback, tau);
    return std::max(0.0, detail::damped_integral(ctx, K, tau, w, qc, diag));
}

/// Put on the defaultable stock; after default it pays K, which gives the K (P_rf - P) floor.
inline double put_price(const PricingContext& ctx, double K, double T, const DampingConfig& damping = {},
                        const QuadratureConfig& qc = {}, Diagnostics* diag = nullptr) {
    if (!(K > 0.0)) throw InputError("strike must be positive");
    if (!(damping.y < 0.0)) throw InputError("put damping y must be negative");
    const double tau = detail::horizon(ctx, T);
    const double y = resolve_damping(ctx, damping.y, -0.25, damping.fallback, tau);
    const double bond = std::exp(ctx.log_transform(Measure::Q, CVector::Zero(ctx.dim()), tau).real());
    const double rf = ctx.riskfree_discount(tau);
    const double floor = K * (rf - bond);
    const double integral = std::max(0.0, detail::damped_integral(ctx, K, tau, y, qc, diag));
    return std::min(floor + integral, K * rf);
}

inline double implied_vol(double price, double S0, double K, double T, double discount_factor,
                          bs::OptionType type = bs::OptionType::Put) {
    return bs::implied_vol(price, S0, K, T, discount_factor, type);
}

// ---------------------------------------------------------------------------------------------
// FFT batch over a log-strike grid.

struct FftConfig {
    int n = 4096;
    double eta = 0.1;  // spacing of the frequency grid
};

struct FftSlice {
    double maturity = 0.0;
    double damping = 0.0;
    std::vector<double> log_strikes;
    std::vector<double> prices;

    /// Cubic Lagrange interpolation in log-strike.
    double at(double K) const {
        const double k = std::log(K);
        const double dk = log_strikes[1] - log_strikes[0];
        const double pos = (k - log_strikes.front()) / dk;
        const auto n = static_cast<long>(log_strikes.size());
        long i0 = static_cast<long>(std::floor(pos)) - 1;
        if (i0 < 0 || i0 + 3 >= n) throw InputError("strike outside the FFT grid");
        double acc = 0.0;
        for (long a = 0; a < 4; ++a) {
            double l = 1.0;
            for (long b = 0; b < 4; ++b) {
                if (a != b) l *= (pos - static_cast<double>(i0 + b)) / static_cast<double>(a - b);
            }
            acc += l * prices[static_cast<std::size_t>(i0 + a)];
        }
        return acc;
    }
};

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Carr-Madan transform with Simpson weights on a grid centered at the current log-price.
inline FftSlice option_prices_fft(const PricingContext& ctx, double T, bs::OptionType type,
                                  const DampingConfig& damping = {}, const FftConfig& cfg = {}) {
    const double tau = detail::horizon(ctx, T);
    const int n = cfg.n;
    if (n < 16 || (n & (n - 1)) != 0) throw InputError("FFT size must be a power of two >= 16");
    const double a = type == bs::OptionType::Call ? resolve_damping(ctx, damping.w, 1.25, damping.fallback, tau)
                                                  : resolve_damping(ctx, damping.y, -0.25, damping.fallback, tau);
    const double eta = cfg.eta;
    const double lambda = 2.0 * std::numbers::pi / (n * eta);
    const double k0 = ctx.x(ctx.dim() - 1) - 0.5 * n * lambda;

    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double v = j * eta;
        const Complex z(a, v);
        const Complex e = ctx.log_transform(Measure::Q, ctx.log_price_argument(z), tau);
        const double simpson = j == 0 ? 1.0 / 3.0 : (j % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0);
        const Complex term = std::exp(e - Complex(0.0, v * k0)) / (z * (z - 1.0)) * (eta * simpson);
        buf[j][0] = term.real();
        buf[j][1] = term.imag();
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);

    FftSlice out;
    out.maturity = T;
    out.damping = a;
    out.log_strikes.resize(static_cast<std::size_t>(n));
    out.prices.resize(static_cast<std::size_t>(n));
    double floor = 0.0;
    if (type == bs::OptionType::Put) {
        const double bond = std::exp(ctx.log_transform(Measure::Q, CVector::Zero(ctx.dim()), tau).real());
        floor = ctx.riskfree_discount(tau) - bond;
    }
    for (int m = 0; m < n; ++m) {
        const double k = k0 + m * lambda;
        out.log_strikes[static_cast<std::size_t>(m)] = k;
        out.prices[static_cast<std::size_t>(m)] = std::exp(-(a - 1.0) * k) / std::numbers::pi * buf[m][0] +
                                                  floor * std::exp(k);
    }
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Price and implied-volatility surfaces.

enum class Method { Quadrature, Fft };

struct SurfaceRow {
    double maturity = 0.0;
    double moneyness = 0.0;
    double put = 0.0;
    double call = 0.0;
    double implied_vol = 0.0;
    std::optional<double> reference_vol;  // same node under the reference (e.g. default-free) context
};

struct SurfaceConfig {
    std::vector<double> maturities;
    std::vector<double> moneyness;
    DampingConfig damping;
    QuadratureConfig quadrature;
    Method method = Method::Quadrature;
    int threads = 1;
};

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

namespace detail {

struct NodePrices {
    double put;
    double call;
    double vol;
};

inline std::vector<NodePrices> price_grid(const PricingContext& ctx, const SurfaceConfig& cfg) {
    const std::size_t nt = cfg.maturities.size();
    const std::size_t nk = cfg.moneyness.size();
    std::vector<NodePrices> out(nt * nk);
    const double S = ctx.spot();

    if (cfg.method == Method::Fft) {
        for (std::size_t i = 0; i < nt; ++i) {
            const double T = cfg.maturities[i];
            const FftSlice puts = option_prices_fft(ctx, T, bs::OptionType::Put, cfg.damping);
            const FftSlice calls = option_prices_fft(ctx, T, bs::OptionType::Call, cfg.damping);
            const double df = ctx.riskfree_discount(T - ctx.t);
            for (std::size_t j = 0; j < nk; ++j) {
                const double K = cfg.moneyness[j] * S;
                NodePrices& np = out[i * nk + j];
                np.put = puts.at(K);
                np.call = calls.at(K);
                np.vol = implied_vol(np.put, S, K, T - ctx.t, df);
            }
        }
        return out;
    }

    const std::size_t total = nt * nk;
    const int threads = std::max(1, cfg.threads);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const double T = cfg.maturities[idx / nk];
            const double K = cfg.moneyness[idx % nk] * S;
            NodePrices& np = out[idx];
            np.put = put_price(ctx, K, T, cfg.damping, cfg.quadrature);
            np.call = call_price(ctx, K, T, cfg.damping, cfg.quadrature);
            np.vol = implied_vol(np.put, S, K, T - ctx.t, ctx.riskfree_discount(T - ctx.t));
        }
    };
    if (threads == 1) {
        work(0, total);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    const std::size_t chunk = (total + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const std::size_t b = std::min(total, chunk * w);
        const std::size_t e = std::min(total, b + chunk);
        pool.emplace_back([&, b, e, w] {
            try {
                work(b, e);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace detail

/// Put, call and put-implied volatility on the maturity x moneyness grid, maturity-major.
/// When `reference` is given, its implied vols are added as a separate column.
inline std::vector<SurfaceRow> surface(const PricingContext& ctx, const SurfaceConfig& cfg,
                                       const PricingContext* reference = nullptr) {
    const auto main = detail::price_grid(ctx, cfg);
    std::vector<detail::NodePrices> ref;
    if (reference) ref = detail::price_grid(*reference, cfg);
    std::vector<SurfaceRow> rows;
    rows.reserve(main.size());
    const std::size_t nk = cfg.moneyness.size();
    for (std::size_t idx = 0; idx < main.size(); ++idx) {
        SurfaceRow r;
        r.maturity = cfg.maturities[idx / nk];
        r.moneyness = cfg.moneyness[idx % nk];
        r.put = main[idx].put;
        r.call = main[idx].call;
        r.implied_vol = main[idx].vol;
        if (reference) r.reference_vol = ref[idx].vol;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace affcredit::fourier
