#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace affcredit;
using fixtures::calibrated_heston;

namespace {

AffineModelParams calibrated_affine() { return heston::to_affine(calibrated_heston()).params; }

bool only_clause(const ValidationReport& r, const std::string& clause) {
    if (r.ok()) return false;
    for (const auto& i : r.issues) {
        if (i.clause != clause) return false;
    }
    return true;
}

}  // namespace

TEST(Admissibility, CalibratedParametersAdmissible) {
    const auto r = validate_admissibility(calibrated_affine());
    EXPECT_TRUE(r.ok()) << r.to_string();
    // Feller margins quoted with the parameter set.
    EXPECT_NEAR(0.565 * 0.07, 0.03955, 1e-15);
    EXPECT_NEAR(0.281 * 0.281 / 2.0, 0.0394805, 1e-15);
}

TEST(Admissibility, RaisedVolOfVolViolatesClauseI) {
    auto p = calibrated_affine();
    p.Sigma(0, 0) = 0.3;
    const auto r = validate_admissibility(p);
    ASSERT_TRUE(only_clause(r, "i")) << r.to_string();
    ASSERT_EQ(r.issues.size(), 1u);
    EXPECT_EQ(r.issues[0].indices, std::vector<int>{1});
    EXPECT_NEAR(r.issues[0].lhs, 0.03955, 1e-15);
    EXPECT_NEAR(r.issues[0].rhs, 0.045, 1e-15);
}

TEST(Admissibility, OffDiagonalSigmaViolatesClauseIII) {
    auto p = calibrated_affine();
    p.Sigma(0, 1) = 0.1;
    const auto r = validate_admissibility(p);
    ASSERT_TRUE(only_clause(r, "iii")) << r.to_string();
    EXPECT_EQ(r.issues[0].indices, (std::vector<int>{1, 2}));
}

TEST(Admissibility, BoundaryEqualityPasses) {
    auto p = calibrated_affine();
    p.b(0) = p.Sigma(0, 0) * p.Sigma(0, 0) / 2.0;
    EXPECT_TRUE(validate_admissibility(p).ok());
    p.b(0) = std::nextafter(p.b(0), 0.0);
    EXPECT_TRUE(only_clause(validate_admissibility(p), "i"));
    EXPECT_TRUE(validate_admissibility(p, 1e-12).ok());
}

TEST(Admissibility, ClausesIIIVandV) {
    auto p = calibrated_affine();
    p.A(0, 2) = 0.1;
    EXPECT_TRUE(only_clause(validate_admissibility(p), "ii"));
    p = calibrated_affine();
    p.A(0, 1) = -0.1;
    EXPECT_TRUE(only_clause(validate_admissibility(p), "ii"));
    p = calibrated_affine();
    p.beta(2, 2) = 0.5;
    EXPECT_TRUE(only_clause(validate_admissibility(p), "iv"));
    p = calibrated_affine();
    p.beta(0, 1) = 0.5;
    EXPECT_TRUE(only_clause(validate_admissibility(p), "iv"));
    p = calibrated_affine();
    p.alpha(0) = 0.1;
    EXPECT_TRUE(only_clause(validate_admissibility(p), "v"));
    p = calibrated_affine();
    p.alpha(2) = -1.5;
    EXPECT_TRUE(only_clause(validate_admissibility(p), "v"));
    p = calibrated_affine();
    p.x0(1) = 0.0;
    EXPECT_TRUE(only_clause(validate_admissibility(p), "x0"));
}

TEST(Admissibility, StructuralErrors) {
    auto p = calibrated_affine();
    p.m = 3;
    EXPECT_THROW(validate_admissibility(p), StructuralError);
    p = calibrated_affine();
    p.b = Vector::Zero(2);
    EXPECT_THROW(validate_admissibility(p), StructuralError);
}

TEST(Admissibility, IdempotentAndSideEffectFree) {
    auto p = calibrated_affine();
    p.Sigma(0, 0) = 0.3;
    const AffineModelParams copy = p;
    const auto a = validate_admissibility(p);
    const auto b = validate_admissibility(p);
    EXPECT_EQ(a.to_string(), b.to_string());
    EXPECT_EQ(p.Sigma, copy.Sigma);
    EXPECT_EQ(p.b, copy.b);
}

TEST(Admissibility, SingleParameterPerturbationFlipsOneClause) {
    std::mt19937_64 g(5);
    for (int n = 0; n < 200; ++n) {
        const AffineModelParams base = fixtures::random_admissible(g);
        ASSERT_TRUE(validate_admissibility(base).ok());
        auto p = base;
        p.b(1) = p.Sigma(1, 1) * p.Sigma(1, 1) / 2.0 - 1e-3;
        EXPECT_TRUE(only_clause(validate_admissibility(p), "i"));
        p = base;
        p.A(1, 0) = -0.01;
        EXPECT_TRUE(only_clause(validate_admissibility(p), "ii"));
        p = base;
        p.Sigma(1, 2) = 0.01;
        EXPECT_TRUE(only_clause(validate_admissibility(p), "iii"));
        p = base;
        p.beta(2, 0) = 0.01;
        EXPECT_TRUE(only_clause(validate_admissibility(p), "iv"));
        p = base;
        p.alpha(1) = 0.01;
        EXPECT_TRUE(only_clause(validate_admissibility(p), "v"));
    }
}

TEST(Drift, ZeroMatrix) {
    auto p = calibrated_affine();
    p.A.setZero();
    p.b << 1.0, 0.0, 0.0;
    const Vector x = Vector::Constant(3, 0.7);
    EXPECT_EQ(drift(p, x), (Vector(3) << 1.0, 0.0, 0.0).finished());
}

TEST(Drift, IdentityMatrix) {
    auto p = calibrated_affine();
    p.A = Matrix::Identity(3, 3);
    p.b.setZero();
    const Vector e1 = Vector::Unit(3, 0);
    EXPECT_EQ(drift(p, e1), e1);
}

TEST(Drift, CalibratedStateAtX0) {
    const Vector f = drift(calibrated_affine(), calibrated_affine().x0);
    EXPECT_NEAR(f(0), 0.0, 1e-15);
    EXPECT_NEAR(f(1), 0.0, 1e-15);
    EXPECT_NEAR(f(2), 0.065, 1e-15);
}

TEST(Diffusion, HestonDiagonal) {
    const auto p = calibrated_affine();
    const Vector R = diffusion_squared(p, (Vector(3) << 0.09, 0.004, -0.3).finished());
    EXPECT_DOUBLE_EQ(R(0), 0.09);
    EXPECT_DOUBLE_EQ(R(1), 0.004);
    EXPECT_DOUBLE_EQ(R(2), 0.09);
    const Vector R2 = diffusion_squared(p, (Vector(3) << 0.07, 0.003, 5.0).finished());
    EXPECT_DOUBLE_EQ(R2(0), 0.07);
    EXPECT_DOUBLE_EQ(R2(1), 0.003);
    EXPECT_DOUBLE_EQ(R2(2), 0.07);
}

TEST(Diffusion, IdentityBeta) {
    auto p = fixtures::sv_params();
    const Vector R = diffusion_squared(p, (Vector(2) << 0.25, 1.0).finished());
    EXPECT_DOUBLE_EQ(R(0), 0.25);
}

TEST(Diffusion, PositiveAtInteriorStates) {
    std::mt19937_64 g(9);
    for (int n = 0; n < 500; ++n) {
        const auto p = fixtures::random_admissible(g);
        Vector x(3);
        x << fixtures::uniform(g, 1e-6, 2.0), fixtures::uniform(g, 1e-6, 2.0), fixtures::uniform(g, -5, 5);
        EXPECT_GT(diffusion_squared(p, x).minCoeff(), 0.0);
    }
}

TEST(StockCoefficientsTest, HestonReduction) {
    const auto h = calibrated_heston();
    const auto c = stock_coefficients(calibrated_affine());
    EXPECT_DOUBLE_EQ(c.sbar, h.mu);
    EXPECT_DOUBLE_EQ(c.mu1, 0.0);
    EXPECT_NEAR(c.mu2, 0.0, 1e-16);
    ASSERT_EQ(c.eta.size(), 1);
    EXPECT_DOUBLE_EQ(c.eta(0), 0.0);
    ASSERT_EQ(c.etabar.size(), 1);
    EXPECT_DOUBLE_EQ(c.etabar(0), 0.0);
    EXPECT_DOUBLE_EQ(c.sigma, h.rho);
    // Pre-default drift is mu whatever the state.
    EXPECT_NEAR(stock_drift(c, (Vector(3) << 0.2, 0.01, 1.0).finished()), h.mu, 1e-15);
}

TEST(StockCoefficientsTest, ZeroModel) {
    auto p = fixtures::sv_params();
    p.A.setZero();
    p.b.setZero();
    p.Sigma.row(1).setZero();
    const auto c = stock_coefficients(p);
    EXPECT_EQ(c.sbar, 0.0);
    EXPECT_EQ(c.mu1, 0.0);
    EXPECT_EQ(c.mu2, 0.0);
    EXPECT_EQ(c.sigma, 0.0);
}

// d/dh E[exp(L_h)] at h = 0 equals S_0 times the stock drift; the expectation is taken from the
// transform with zero intensity and no discounting.
TEST(StockCoefficientsTest, DriftMatchesTransformDerivative) {
    std::mt19937_64 g(17);
    for (int n = 0; n < 20; ++n) {
        const auto p = fixtures::random_admissible(g);
        const auto c = stock_coefficients(p);
        const auto flavor = MeasureFlavor::physical(SpecAffine::zero(3));
        CVector z = CVector::Zero(3);
        z(2) = 1.0;
        RiccatiOptions opt;
        opt.allow_outside_domain = true;
        const double h = 1e-4;
        const double ep = transform(p, flavor, SpecAffine::zero(3), z, 0.0, h, p.x0, opt).real();
        const double e2 = transform(p, flavor, SpecAffine::zero(3), z, 0.0, 2 * h, p.x0, opt).real();
        // second-order one-sided difference
        const double deriv = (-3.0 * 1.0 + 4.0 * ep - e2) / (2.0 * h);
        EXPECT_NEAR(deriv, stock_drift(c, p.x0), 1e-6);
    }
}

// Monte Carlo check of the same drift for one random model: (E[S_h] - S_0) / h.
TEST(StockCoefficientsTest, DriftMatchesMonteCarlo) {
    std::mt19937_64 g(23);
    const auto p = fixtures::random_admissible(g);
    const auto c = stock_coefficients(p);
    mc::SimConfig cfg;
    cfg.n_paths = 200000;
    cfg.n_steps_per_year = 2000;
    cfg.seed = 3;
    const double h = 0.01;
    const auto batch = mc::simulate(mc::SimModel::physical(p, SpecAffine::constant(1e-300, 3)), {h}, cfg);
    std::vector<double> v(batch.n_paths);
    for (std::size_t i = 0; i < batch.n_paths; ++i) v[i] = (std::exp(batch.state(i, 0, 2)) - 1.0) / h;
    const auto e = mc::mean_se(v);
    EXPECT_LT(std::abs(e.value - stock_drift(c, p.x0)), 3.0 * e.se + 1e-3) << e.value << " +- " << e.se;
}
