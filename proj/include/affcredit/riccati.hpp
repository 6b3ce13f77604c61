#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "affcredit/affine_core.hpp"
#include "affcredit/ode.hpp"

namespace affcredit {

/// Which exponential-affine expectation the Riccati system computes: the intensity to be
/// killed at, and whether the short rate is discounted as well (risk-neutral flavors).
struct MeasureFlavor {
    bool discount_rate = false;
    SpecAffine intensity;

    static MeasureFlavor physical(SpecAffine lambda_p) { return {false, std::move(lambda_p)}; }
    static MeasureFlavor risk_neutral(SpecAffine lambda_q) { return {true, std::move(lambda_q)}; }
};

struct RiccatiOptions {
    ode::Options ode;
    /// Admit z outside C^m_- x iR^{d-m}; existence is then only checked empirically.
    bool allow_outside_domain = false;
};

/// True when Re z_i <= 0 on I and Re z_j = 0 on J, where existence on any horizon is guaranteed.
inline bool in_transform_domain(const CVector& z, int m) {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (i < m ? z(i).real() > 0.0 : z(i).real() != 0.0) return false;
    }
    return true;
}

/// (Phi, Psi) on [0, T], optionally together with directional derivatives with respect to
/// the initial condition z. Immutable once built.
class RiccatiSolution {
public:
    RiccatiSolution(CVector z, std::vector<CVector> directions, ode::Solution sol)
        : z_(std::move(z)), directions_(std::move(directions)), sol_(std::move(sol)) {}

    int dim() const noexcept { return static_cast<int>(z_.size()); }
    const CVector& z() const noexcept { return z_; }
    double horizon() const noexcept { return sol_.horizon(); }
    const std::vector<double>& grid() const noexcept { return sol_.times(); }
    std::size_t steps() const noexcept { return sol_.steps(); }
    std::size_t n_directions() const noexcept { return directions_.size(); }
    double max_error_estimate() const noexcept { return sol_.max_error_estimate(); }

    /// Full state vector at time t (node values exactly, dense output in between).
    ode::State state(double t) const { return sol_(t); }

    Complex Phi(double t) const { return sol_(t)(0); }
    CVector Psi(double t) const { return sol_(t).segment(1, dim()); }

    /// Derivative of Phi along direction `k` of the sensitivity set.
    Complex dPhi(std::size_t k, double t) const { return sol_(t)(block(k)); }
    CVector dPsi(std::size_t k, double t) const { return sol_(t).segment(block(k) + 1, dim()); }

    /// Exponent Phi(t) + Psi(t)^T x.
    Complex exponent(double t, const Vector& x) const {
        const ode::State s = sol_(t);
        return s(0) + (s.segment(1, dim()).transpose() * x.cast<Complex>()).value();
    }

private:
    Eigen::Index block(std::size_t k) const { return static_cast<Eigen::Index>((k + 1) * (dim() + 1)); }

    CVector z_;
    std::vector<CVector> directions_;
    ode::Solution sol_;
};

namespace detail {

/// Right-hand side of the Riccati system and of its first variation along each direction.
struct RiccatiRhs {
    Eigen::MatrixXcd At;
    Eigen::MatrixXcd SigmaT;
    Eigen::MatrixXcd beta;
    CVector b;
    CVector alpha;
    Complex const_term;
    CVector linear_term;
    int d;
    std::size_t n_dir;

    RiccatiRhs(const AffineModelParams& p, const MeasureFlavor& flavor, const SpecAffine& rate, std::size_t ndir)
        : At(p.A.transpose().cast<Complex>()),
          SigmaT(p.Sigma.transpose().cast<Complex>()),
          beta(p.beta.cast<Complex>()),
          b(p.b.cast<Complex>()),
          alpha(p.alpha.cast<Complex>()),
          d(p.d),
          n_dir(ndir) {
        double c = flavor.intensity.bar;
        Vector lin = flavor.intensity.vec;
        if (flavor.discount_rate) {
            c += rate.bar;
            lin += rate.vec;
        }
        const_term = Complex(-c, 0.0);
        linear_term = (-lin).cast<Complex>();
    }

    ode::State operator()(double, const ode::State& y) const {
        ode::State dy(y.size());
        const auto psi = y.segment(1, d);
        const CVector s = SigmaT * psi;
        const CVector s2 = s.cwiseProduct(s);
        dy(0) = (b.transpose() * psi)(0) + 0.5 * (alpha.transpose() * s2)(0) + const_term;
        dy.segment(1, d) = At * psi + 0.5 * (beta * s2) + linear_term;
        for (std::size_t k = 0; k < n_dir; ++k) {
            const auto off = static_cast<Eigen::Index>((k + 1) * (d + 1));
            const auto g = y.segment(off + 1, d);
            const CVector sg = s.cwiseProduct(SigmaT * g);
            dy(off) = (b.transpose() * g)(0) + (alpha.transpose() * sg)(0);
            dy.segment(off + 1, d) = At * g + beta * sg;
        }
        return dy;
    }
};

}  // namespace detail

/// Integrates the Riccati system for (Phi, Psi) on [0, T] with Psi(0) = z, Phi(0) = 0.
/// Each entry of `directions` adds the first variation of (Phi, Psi) with respect to z
/// along that direction. Throws MomentExplosion when the solution blows up before T.
inline RiccatiSolution solve(const AffineModelParams& params, const MeasureFlavor& flavor, const SpecAffine& rate,
                             const CVector& z, double T, const RiccatiOptions& opt = {},
                             std::vector<CVector> directions = {}) {
    check_structure(params);
    if (z.size() != params.d) throw StructuralError("transform argument must have length d");
    if (flavor.intensity.vec.size() != params.d) throw StructuralError("intensity loading must have length d");
    if (flavor.discount_rate && rate.vec.size() != params.d) throw StructuralError("rate loading must have length d");
    if (T < 0.0) throw InputError("Riccati horizon must be nonnegative");
    if (!opt.allow_outside_domain && !in_transform_domain(z, params.m)) {
        throw InputError("transform argument outside C^m_- x iR^{d-m}; enable allow_outside_domain to probe it");
    }
    const SpecAffine safe_rate = flavor.discount_rate ? rate : SpecAffine::zero(params.d);

    const int d = params.d;
    const std::size_t ndir = directions.size();
    ode::State y0 = ode::State::Zero(static_cast<Eigen::Index>((ndir + 1) * (d + 1)));
    y0.segment(1, d) = z;
    for (std::size_t k = 0; k < ndir; ++k) {
        if (directions[k].size() != d) throw StructuralError("sensitivity direction must have length d");
        y0.segment(static_cast<Eigen::Index>((k + 1) * (d + 1)) + 1, d) = directions[k];
    }

    detail::RiccatiRhs rhs(params, flavor, safe_rate, ndir);
    auto monitor = [d](const ode::State& y) { return y.segment(1, d).cwiseAbs().maxCoeff(); };
    ode::Solution sol = ode::integrate(rhs, std::move(y0), T, opt.ode, monitor);
    return RiccatiSolution(z, std::move(directions), std::move(sol));
}

/// E[exp(-int_t^u (lambda + r 1_{discount}) ds + z^T X_u) | X_t = x].
inline Complex transform(const AffineModelParams& params, const MeasureFlavor& flavor, const SpecAffine& rate,
                         const CVector& z, double t, double u, const Vector& x, const RiccatiOptions& opt = {}) {
    if (u < t) throw InputError("transform requires t <= u");
    const auto sol = solve(params, flavor, rate, z, u - t, opt);
    return std::exp(sol.exponent(u - t, x));
}

/// Derivative of `transform` with respect to z along `direction`, from the variational system.
inline Complex transform_directional(const AffineModelParams& params, const MeasureFlavor& flavor,
                                     const SpecAffine& rate, const CVector& z0, const CVector& direction, double t,
                                     double u, const Vector& x, const RiccatiOptions& opt = {}) {
    if (u < t) throw InputError("transform requires t <= u");
    const double h = u - t;
    const auto sol = solve(params, flavor, rate, z0, h, opt, {direction});
    const Complex value = std::exp(sol.exponent(h, x));
    const Complex dexp = sol.dPhi(0, h) + (sol.dPsi(0, h).transpose() * x.cast<Complex>())(0);
    return value * dexp;
}

/// Partial derivative of `transform` with respect to z_k (0-based component index).
inline Complex transform_gradient(const AffineModelParams& params, const MeasureFlavor& flavor,
                                  const SpecAffine& rate, const CVector& z0, int k, double t, double u,
                                  const Vector& x, const RiccatiOptions& opt = {}) {
    if (k < 0 || k >= params.d) throw InputError("component index out of range");
    CVector e = CVector::Zero(params.d);
    e(k) = 1.0;
    return transform_directional(params, flavor, rate, z0, e, t, u, x, opt);
}

enum class Measure { P, Q };

/// Riccati exponents at a single horizon.
struct Exponents {
    Complex Phi;
    CVector Psi;

    Complex exponent(const Vector& x) const { return Phi + (Psi.transpose() * x.cast<Complex>()).value(); }
};

/// Optional source of closed-form exponents. Returning nullopt defers to numerical integration.
class ExponentProvider {
public:
    virtual ~ExponentProvider() = default;
    virtual std::optional<Exponents> exponents(Measure measure, const CVector& z, double horizon) const = 0;
};

}  // namespace affcredit
