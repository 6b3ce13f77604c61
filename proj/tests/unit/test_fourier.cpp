#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace affcredit;

namespace {

const PricingContext& ctx() {
    static const PricingContext c = fixtures::calibrated_context();
    return c;
}

const PricingContext& free_ctx() {
    static const PricingContext c = fixtures::default_free_context();
    return c;
}

// Textbook default-free Heston call (zero rate) from the characteristic function in the
// rotation-free form, integrated with composite Simpson on a long fine grid.
double textbook_heston_call(double S0, double K, double T, double kappa, double theta, double sigma, double rho,
                            double v0) {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    auto cf = [&](C u) {
        const C beta = kappa - rho * sigma * i * u;
        const C d = std::sqrt(beta * beta + sigma * sigma * (i * u + u * u));
        const C g = (beta - d) / (beta + d);
        const C e = std::exp(-d * T);
        const C A = kappa * theta / (sigma * sigma) * ((beta - d) * T - 2.0 * std::log((1.0 - g * e) / (1.0 - g)));
        const C B = (beta - d) / (sigma * sigma) * (1.0 - e) / (1.0 - g * e);
        return std::exp(i * u * std::log(S0) + A + B * v0);
    };
    const double k = std::log(K);
    auto p1 = [&](double u) { return (std::exp(-i * u * k) * cf(C(u, -1.0)) / (i * u * cf(C(0.0, -1.0)))).real(); };
    auto p2 = [&](double u) { return (std::exp(-i * u * k) * cf(C(u, 0.0)) / (i * u)).real(); };
    const int n = 200000;
    const double a = 1e-8, b = 400.0, h = (b - a) / n;
    double s1 = p1(a) + p1(b), s2 = p2(a) + p2(b);
    for (int j = 1; j < n; ++j) {
        const double w = (j % 2) ? 4.0 : 2.0;
        s1 += w * p1(a + j * h);
        s2 += w * p2(a + j * h);
    }
    const double P1 = 0.5 + s1 * h / 3.0 / std::numbers::pi;
    const double P2 = 0.5 + s2 * h / 3.0 / std::numbers::pi;
    return S0 * P1 - K * P2;
}

}  // namespace

TEST(Distribution, TotalMassIsSurvival) {
    for (double T : {0.5, 1.0, 3.0}) {
        const double surv = credit::survival_probability(ctx(), T);
        EXPECT_NEAR(fourier::survival_distribution(ctx(), std::exp(30.0), T), surv, 1e-6);
        EXPECT_NEAR(fourier::survival_distribution(ctx(), std::exp(-30.0), T), 0.0, 1e-6);
    }
}

TEST(Distribution, NondecreasingInLevel) {
    for (double T : {0.5, 1.75}) {
        double prev = -1.0;
        for (int i = 0; i < 100; ++i) {
            const double x = 0.3 + 1.4 * i / 99.0;
            const double v = fourier::survival_distribution(ctx(), x, T);
            EXPECT_GE(v, prev - 1e-9) << "x=" << x;
            prev = v;
        }
    }
}

TEST(Distribution, RejectsNonpositiveLevel) {
    EXPECT_THROW(fourier::survival_distribution(ctx(), 0.0, 1.0), InputError);
}

TEST(Distribution, InsufficientDecayReported) {
    fourier::QuadratureConfig qc;
    qc.u_cap = 2.0;
    EXPECT_THROW(fourier::survival_distribution(ctx(), 1.0, 0.01, qc), NumericalError);
}

TEST(Options, ZeroStrikeLimits) {
    EXPECT_NEAR(fourier::call_price(ctx(), 1e-8, 1.0), ctx().spot(), 1e-4 * ctx().spot());
    EXPECT_NEAR(fourier::put_price(ctx(), 1e-8, 1.0), 0.0, 1e-8);
}

TEST(Options, DefaultFreeMatchesTextbookHeston) {
    const auto h = fixtures::calibrated_heston();
    const auto p = fixtures::calibrated_premium();
    const double kq = h.k - h.sigmabar * p.Theta11;
    const double thq = (h.k * h.vhat + h.sigmabar * p.theta1hat) / kq;
    for (double K : {0.8, 1.0, 1.25}) {
        for (double T : {0.5, 2.0}) {
            const double ref = textbook_heston_call(1.0, K, T, kq, thq, h.sigmabar, h.rho, h.v0);
            EXPECT_NEAR(fourier::call_price(free_ctx(), K, T), ref, 1e-7) << K << " " << T;
        }
    }
}

TEST(Options, ClosedFormAndNumericExponentsAgree) {
    auto p = fixtures::calibrated_premium();
    p.lambda_q = {0.0, 0.0, 0.0};
    const auto numeric = heston::make_context(fixtures::calibrated_heston(), p, {true}, {}, false);
    for (double K : {0.7, 1.0, 1.3}) {
        EXPECT_NEAR(fourier::call_price(free_ctx(), K, 1.0), fourier::call_price(numeric, K, 1.0), 1e-8);
    }
}

TEST(Options, PutCallParityOnGrid) {
    for (double T : fourier::linspace(0.5, 3.0, 7)) {
        for (int j = 0; j <= 12; ++j) {
            const double K = 0.7 + 0.05 * j;
            EXPECT_LT(std::abs(credit::parity_residual(ctx(), K, T)), 1e-5 * ctx().spot()) << K << " " << T;
        }
    }
}

TEST(Options, DeepOutOfTheMoneyPutAboveDefaultFloor) {
    const double K = 0.7, T = 0.5;
    const double floor = K * (credit::riskfree_bond(ctx(), T) - credit::defaultable_bond(ctx(), T));
    EXPECT_GE(fourier::put_price(ctx(), K, T), floor);
    EXPECT_GT(floor, 0.0);
}

TEST(Options, CallMonotoneAndConvexInStrike) {
    std::vector<double> c;
    for (int j = 0; j <= 40; ++j) c.push_back(fourier::call_price(ctx(), 0.6 + 0.02 * j, 1.0));
    for (std::size_t j = 1; j < c.size(); ++j) EXPECT_LE(c[j], c[j - 1] + 1e-12);
    for (std::size_t j = 1; j + 1 < c.size(); ++j) EXPECT_GE(c[j + 1] - 2 * c[j] + c[j - 1], -1e-8);
}

TEST(Options, DampingInvariance) {
    for (double T : {0.5, 2.0}) {
        for (double K : {0.8, 1.0, 1.2}) {
            const double c0 = fourier::call_price(ctx(), K, T, {1.5, -0.5, false});
            for (double w : {1.25, 2.0}) {
                EXPECT_NEAR(fourier::call_price(ctx(), K, T, {w, -0.5, false}), c0, 1e-6 * c0);
            }
            const double p0 = fourier::put_price(ctx(), K, T, {1.5, -0.5, false});
            EXPECT_NEAR(fourier::put_price(ctx(), K, T, {1.5, -1.0, false}), p0, 1e-6 * p0);
        }
    }
}

TEST(Options, DampingValidation) {
    EXPECT_THROW(fourier::call_price(ctx(), 1.0, 1.0, {0.9, -0.5, true}), InputError);
    EXPECT_THROW(fourier::put_price(ctx(), 1.0, 1.0, {1.5, 0.1, true}), InputError);
    EXPECT_THROW(fourier::call_price(ctx(), -1.0, 1.0), InputError);
}

TEST(Options, ExplodingDampingFallsBackOrFails) {
    // A very large damping exponent has no finite moment over three years.
    EXPECT_THROW(fourier::call_price(ctx(), 1.0, 3.0, {40.0, -0.5, false}), NumericalError);
    EXPECT_NO_THROW(fourier::call_price(ctx(), 1.0, 3.0, {40.0, -0.5, true}));
}

TEST(Options, FftMatchesQuadrature) {
    for (double T : {0.5, 1.75}) {
        const auto calls = fourier::option_prices_fft(ctx(), T, bs::OptionType::Call);
        const auto puts = fourier::option_prices_fft(ctx(), T, bs::OptionType::Put);
        for (double K : {0.7, 0.9, 1.0, 1.15, 1.3}) {
            EXPECT_NEAR(calls.at(K), fourier::call_price(ctx(), K, T), 1e-6) << K;
            EXPECT_NEAR(puts.at(K), fourier::put_price(ctx(), K, T), 1e-6) << K;
        }
    }
}

TEST(ImpliedVol, RoundTrip) {
    for (auto type : {bs::OptionType::Call, bs::OptionType::Put}) {
        for (double K : {0.7, 1.0, 1.4}) {
            const double price = bs::price(type, 1.0, K, 1.5, std::exp(-0.03), 0.2);
            EXPECT_NEAR(bs::implied_vol(price, 1.0, K, 1.5, std::exp(-0.03), type), 0.2, 1e-10);
        }
    }
}

TEST(ImpliedVol, IntrinsicBoundIsError) {
    const double df = std::exp(-0.02);
    const double intrinsic = std::max(0.8 * df - 1.0, 0.0);
    EXPECT_THROW(bs::implied_vol(1.2 * df - 1.0, 1.0, 1.2, 1.0, df, bs::OptionType::Put), InputError);
    EXPECT_THROW(bs::implied_vol(intrinsic, 1.0, 0.8, 1.0, df, bs::OptionType::Put), InputError);
}

TEST(Surface, DefaultGridAndDefaultRiskRaisesVols) {
    fourier::SurfaceConfig cfg;
    cfg.maturities = fourier::linspace(0.5, 3.0, 7);
    cfg.moneyness = fourier::linspace(0.7, 1.3, 13);
    const auto rows = fourier::surface(ctx(), cfg, &free_ctx());
    ASSERT_EQ(rows.size(), 91u);
    for (const auto& r : rows) {
        ASSERT_TRUE(r.reference_vol.has_value());
        EXPECT_GE(r.implied_vol, *r.reference_vol) << r.maturity << " " << r.moneyness;
    }
    EXPECT_GT(rows[0].implied_vol - *rows[0].reference_vol, 1e-4);
}

TEST(Surface, ThreadCountDoesNotChangeResult) {
    fourier::SurfaceConfig cfg;
    cfg.maturities = {0.5, 1.0};
    cfg.moneyness = {0.8, 1.0, 1.2};
    const auto a = fourier::surface(ctx(), cfg);
    cfg.threads = 3;
    const auto b = fourier::surface(ctx(), cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].put, b[i].put);
        EXPECT_EQ(a[i].call, b[i].call);
    }
}
