#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "affcredit/errors.hpp"

namespace affcredit::quad {

/// Pairwise summation: a fixed reduction tree, so the result depends only on the input order.
template <class T>
T pairwise_sum(std::span<const T> v) {
    if (v.empty()) return T{};
    if (v.size() <= 8) {
        T acc = v[0];
        for (std::size_t i = 1; i < v.size(); ++i) acc += v[i];
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(std::span<const T>(v.data(), v.size()));
}

/// Gauss-Legendre nodes and weights on [-1, 1].
template <int N>
struct GaussLegendre {
    std::array<double, N> x{};
    std::array<double, N> w{};

    GaussLegendre() {
        for (int i = 0; i < (N + 1) / 2; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = -z;
            x[N - 1 - i] = z;
            w[i] = w[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }

    static const GaussLegendre& get() {
        static const GaussLegendre rule;
        return rule;
    }
};

struct PanelResult {
    double value = 0.0;
    double abs_value = 0.0;  // integral of |f|, used for tail checks
    std::size_t evaluations = 0;
};

/// One fixed-order Gauss-Legendre panel on [a, b].
template <int N, class F>
PanelResult gauss_panel(F&& f, double a, double b) {
    const auto& rule = GaussLegendre<N>::get();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, N> terms{};
    std::array<double, N> abs_terms{};
    for (int i = 0; i < N; ++i) {
        const double fx = f(mid + half * rule.x[i]);
        terms[i] = rule.w[i] * fx;
        abs_terms[i] = rule.w[i] * std::abs(fx);
    }
    PanelResult r;
    r.value = half * pairwise_sum(std::span<const double>(terms));
    r.abs_value = half * pairwise_sum(std::span<const double>(abs_terms));
    r.evaluations = N;
    return r;
}

namespace detail {
template <int N, class F>
PanelResult adaptive(F& f, double a, double b, const PanelResult& whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    PanelResult left = gauss_panel<N>(f, a, mid);
    PanelResult right = gauss_panel<N>(f, mid, b);
    PanelResult both;
    both.value = left.value + right.value;
    both.abs_value = left.abs_value + right.abs_value;
    both.evaluations = left.evaluations + right.evaluations;
    if (std::abs(both.value - whole.value) <= tol || depth <= 0) return both;
    left = adaptive<N>(f, a, mid, left, tol / 2, depth - 1);
    right = adaptive<N>(f, mid, b, right, tol / 2, depth - 1);
    PanelResult out;
    out.value = left.value + right.value;
    out.abs_value = left.abs_value + right.abs_value;
    out.evaluations = both.evaluations + left.evaluations + right.evaluations;
    return out;
}
}  // namespace detail

/// Adaptive Gauss-Legendre on [a, b]: a panel is accepted when it agrees with the sum of its
/// two halves to `tol`, otherwise both halves are refined recursively.
template <int N = 64, class F>
PanelResult integrate(F&& f, double a, double b, double tol, int max_depth = 30) {
    const PanelResult whole = gauss_panel<N>(f, a, b);
    return detail::adaptive<N>(f, a, b, whole, tol, max_depth);
}

struct SemiInfiniteResult {
    double value = 0.0;
    double u_max = 0.0;
    std::size_t evaluations = 0;
    std::size_t panels = 0;
};

/// Integral over [0, inf) on panels [0,1], [1,2], [2,4], ... The truncation point doubles until
/// the last panel contributes less than tol/10 in absolute value; beyond `u_cap` the integrand
/// is declared to decay too slowly.
template <int N = 64, class F>
SemiInfiniteResult integrate_half_line(F&& f, double tol, double u_cap = 65536.0) {
    SemiInfiniteResult out;
    std::vector<double> parts;
    double a = 0.0;
    double b = 1.0;
    double last_abs = 0.0;
    while (true) {
        const PanelResult p = integrate<N>(f, a, b, tol);
        parts.push_back(p.value);
        out.evaluations += p.evaluations;
        ++out.panels;
        last_abs = p.abs_value;
        out.u_max = b;
        if (!std::isfinite(p.value)) throw NumericalError("quadrature: non-finite integrand");
        if (b >= 2.0 && last_abs < tol / 10.0) break;
        if (b >= u_cap) {
            throw NumericalError("insufficient decay: integrand mass " + std::to_string(last_abs) + " on [" +
                                 std::to_string(a) + ", " + std::to_string(b) + "] exceeds tol/10 = " +
                                 std::to_string(tol / 10.0));
        }
        a = b;
        b = (b < 2.0) ? 2.0 : 2.0 * b;
    }
    out.value = pairwise_sum(parts);
    return out;
}

}  // namespace affcredit::quad
