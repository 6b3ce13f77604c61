#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "affcredit/errors.hpp"

namespace affcredit::ode {

using State = Eigen::VectorXcd;

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    /// Declare explosion when the monitored norm exceeds this bound.
    double blowup_norm = 1e8;
    /// Declare explosion when the step falls below this fraction of the horizon.
    double min_step_fraction = 1e-13;
    std::size_t max_steps = 2'000'000;
};

/// One accepted step with the coefficients of the 4th-order continuous extension.
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    State c0, c1, c2, c3, c4;

    State eval(double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        return c0 + s * (c1 + s1 * (c2 + s * (c3 + s1 * c4)));
    }
};

/// Solution on [0, T] with dense output between accepted steps.
class Solution {
public:
    Solution() = default;
    Solution(State y0, double horizon) : horizon_(horizon) {
        times_.push_back(0.0);
        values_.push_back(std::move(y0));
    }

    double horizon() const noexcept { return horizon_; }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<State>& values() const noexcept { return values_; }
    std::size_t steps() const noexcept { return steps_.size(); }
    double max_error_estimate() const noexcept { return max_err_; }

    State operator()(double t) const {
        if (t <= 0.0 || steps_.empty()) return values_.front();
        if (t >= horizon_) return values_.back();
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const auto k = static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
        if (times_[k] == t) return values_[k];
        return steps_[std::min(k, steps_.size() - 1)].eval(t);
    }

    void push(DenseStep step, State y1, double err) {
        times_.push_back(step.t0 + step.h);
        values_.push_back(std::move(y1));
        steps_.push_back(std::move(step));
        max_err_ = std::max(max_err_, err);
    }

    void set_horizon_end(double t) { times_.back() = t; }

private:
    double horizon_ = 0.0;
    double max_err_ = 0.0;
    std::vector<double> times_;
    std::vector<State> values_;
    std::vector<DenseStep> steps_;
};

namespace detail {
// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace detail

/// Integrates y' = f(t, y) on [0, T] with an adaptive Dormand-Prince 5(4) scheme.
/// `monitor` returns the norm that is checked against the blow-up bound after every step.
template <class Rhs, class Monitor>
Solution integrate(Rhs&& f, State y0, double T, const Options& opt, Monitor&& monitor) {
    using namespace detail;
    Solution sol(y0, T);
    if (T <= 0.0) return sol;

    const auto n = y0.size();
    State y = std::move(y0);
    State k1 = f(0.0, y), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n), err(n);

    auto error_norm = [&](const State& e, const State& ya, const State& yb) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(ya(i)), std::abs(yb(i)));
            const double r = std::abs(e(i)) / sc;
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(n, 1)));
    };

    // Initial step from the usual two-derivative heuristic.
    double h;
    {
        const double d0 = error_norm(y, y, y);
        const double dd1 = error_norm(k1, y, y);
        double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
        h0 = std::min(h0, T);
        ytmp = y + h0 * k1;
        const State f1 = f(h0, ytmp);
        const double dd2 = error_norm(f1 - k1, y, y) / h0;
        const double dm = std::max(dd1, dd2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        h = std::min({100.0 * h0, h1, T});
    }

    const double h_min = opt.min_step_fraction * T;
    double t = 0.0;
    std::size_t count = 0;
    bool rejected_last = false;

    while (t < T) {
        if (++count > opt.max_steps) {
            throw NumericalError("ODE integration exceeded the maximum number of steps");
        }
        bool last = false;
        if (t + h >= T) {
            h = T - t;
            last = true;
        }
        if (h < h_min && !last) {
            throw MomentExplosion("step size underflow before the horizon", t);
        }

        ytmp = y + h * (a21 * k1);
        k2 = f(t + c2 * h, ytmp);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        k3 = f(t + c3 * h, ytmp);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        k4 = f(t + c4 * h, ytmp);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        k5 = f(t + c5 * h, ytmp);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        k6 = f(t + h, ytmp);
        y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        k7 = f(t + h, y1);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double en = error_norm(err, y, y1);
        if (!std::isfinite(en)) {
            if (h < h_min) throw MomentExplosion("non-finite Riccati state", t);
            h *= 0.25;
            rejected_last = true;
            continue;
        }

        if (en <= 1.0) {
            DenseStep step;
            step.t0 = t;
            step.h = h;
            step.c0 = y;
            step.c1 = y1 - y;
            step.c2 = h * k1 - step.c1;
            step.c3 = step.c1 - h * k7 - step.c2;
            step.c4 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            const double tn = last ? T : t + h;
            y = y1;
            k1 = k7;
            sol.push(std::move(step), y, en);
            t = tn;
            if (last) sol.set_horizon_end(T);

            if (!(monitor(y) <= opt.blowup_norm)) {
                throw MomentExplosion("Riccati solution exceeded the blow-up threshold", t);
            }

            double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
            fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 10.0);
            h *= fac;
            rejected_last = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            rejected_last = true;
        }
    }
    return sol;
}

template <class Rhs>
Solution integrate(Rhs&& f, State y0, double T, const Options& opt = {}) {
    return integrate(std::forward<Rhs>(f), std::move(y0), T, opt,
                     [](const State& y) { return y.cwiseAbs().maxCoeff(); });
}

}  // namespace affcredit::ode
