#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "affcredit/affine_core.hpp"
#include "affcredit/measures.hpp"
#include "affcredit/quadrature.hpp"
#include "affcredit/riccati.hpp"

namespace affcredit::mc {

enum class Scheme { Euler, ExactCir };

struct SimConfig {
    std::size_t n_paths = 100000;
    int n_steps_per_year = 1024;
    std::uint64_t seed = 42;
    Scheme scheme = Scheme::Euler;
    int threads = 1;
};

/// Dynamics to simulate: P-dynamics killed at lambda^P, or Q-dynamics with lambda^Q and r.
struct SimModel {
    AffineModelParams params;
    SpecAffine intensity;
    SpecAffine rate;
    Measure measure = Measure::P;

    static SimModel physical(const AffineModelParams& p, const SpecAffine& lambda_p) {
        return {p, lambda_p, SpecAffine::zero(p.d), Measure::P};
    }
    static SimModel risk_neutral(const QModelParams& q) { return {q.model, q.lambda_q, q.rate, Measure::Q}; }
};

/// Counter-based generator: output n of substream `key` is a SplitMix64 finalizer of key + n*gamma,
/// so every path owns an independent, random-access stream.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    std::uint64_t key() const noexcept { return key_; }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Simulated paths, stored at the observation times only.
struct PathBatch {
    Measure measure = Measure::P;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::Euler;
    int steps_per_year = 0;
    int d = 0;
    std::size_t n_paths = 0;
    std::vector<double> obs_times;
    std::vector<double> states;                // [path][obs][component]
    std::vector<double> int_intensity;         // [path][obs]
    std::vector<double> int_rate;              // [path][obs]
    std::vector<double> default_time;          // +inf when no default before the last observation
    std::vector<double> int_rate_at_default;   // integrated rate up to the default time, NaN without default
    std::vector<std::uint64_t> substream;      // RNG key of each path
    std::uint64_t truncation_events = 0;

    std::size_t n_obs() const noexcept { return obs_times.size(); }
    double horizon() const { return obs_times.back(); }

    double state(std::size_t path, std::size_t obs, int k) const {
        return states[(path * n_obs() + obs) * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)];
    }

    std::size_t obs_index(double T) const {
        for (std::size_t o = 0; o < obs_times.size(); ++o) {
            if (std::abs(obs_times[o] - T) <= 1e-12 * std::max(1.0, T)) return o;
        }
        throw InputError("time " + std::to_string(T) + " is not an observation time of the batch");
    }

    bool survives(std::size_t path, double T) const { return default_time[path] > T; }
};

namespace detail {

/// Noncentral chi-square draw with `df` degrees of freedom and noncentrality `lam`.
template <class Rng>
double noncentral_chi2(double df, double lam, Rng& rng) {
    if (df > 1.0) {
        std::normal_distribution<double> normal;
        std::gamma_distribution<double> chi2((df - 1.0) / 2.0, 2.0);
        const double z = normal(rng) + std::sqrt(lam);
        return z * z + chi2(rng);
    }
    std::poisson_distribution<long> pois(lam / 2.0);
    const long n = lam > 0.0 ? pois(rng) : 0;
    std::gamma_distribution<double> chi2((df + 2.0 * static_cast<double>(n)) / 2.0, 2.0);
    return chi2(rng);
}

struct StepGrid {
    std::vector<double> times;           // all step boundaries, starting at 0
    std::vector<std::size_t> obs_steps;  // index into `times` of each observation
};

inline StepGrid make_grid(const std::vector<double>& obs, int steps_per_year) {
    StepGrid g;
    g.times.push_back(0.0);
    double prev = 0.0;
    for (double o : obs) {
        const int n = std::max(1, static_cast<int>(std::ceil((o - prev) * steps_per_year - 1e-9)));
        for (int k = 1; k <= n; ++k) g.times.push_back(k == n ? o : prev + (o - prev) * k / n);
        g.obs_steps.push_back(g.times.size() - 1);
        prev = o;
    }
    return g;
}

inline void check_exact_cir(const AffineModelParams& p) {
    for (int i = 0; i < p.m; ++i) {
        for (int j = 0; j < p.m; ++j) {
            if (i != j && p.A(i, j) != 0.0) {
                throw InputError("exact-CIR scheme requires a diagonal drift matrix on the positive block");
            }
        }
        if (!(p.Sigma(i, i) > 0.0) || !(p.beta(i, i) > 0.0)) {
            throw InputError("exact-CIR scheme requires Sigma_ii > 0 and beta_ii > 0 on the positive block");
        }
    }
}

/// One path. Writes into the batch slots of `path`.
class PathSimulator {
public:
    PathSimulator(const SimModel& model, const StepGrid& grid, const SimConfig& cfg)
        : p_(model.params), lam_(model.intensity), rate_(model.rate), grid_(grid), cfg_(cfg),
          d_(model.params.d), m_(model.params.m) {
        const auto d = static_cast<std::size_t>(d_);
        A_.resize(d * d);
        S_.resize(d * d);
        betaT_.resize(d * d);
        for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j) {
                A_[idx(i, j)] = p_.A(i, j);
                S_[idx(i, j)] = p_.Sigma(i, j);
                betaT_[idx(i, j)] = p_.beta(j, i);
            }
        }
    }

    std::uint64_t run(std::size_t path, PathBatch& out) const {
        const int d = d_;
        const auto du = static_cast<std::size_t>(d);
        CounterRng rng(cfg_.seed, path);
        out.substream[path] = rng.key();
        std::exponential_distribution<double> expo(1.0);
        std::normal_distribution<double> normal;
        const double threshold = expo(rng);

        std::vector<double> buf(6 * du);
        double* x = buf.data();
        double* xn = x + du;
        double* xp = xn + du;
        double* z = xp + du;
        double* R = z + du;
        double* tmp = R + du;
        for (int k = 0; k < d; ++k) x[k] = p_.x0(k);
        positive_part(x, xp);

        std::uint64_t truncations = 0;
        double cum_l = 0.0;
        double cum_r = 0.0;
        double tau = std::numeric_limits<double>::infinity();
        double r_at_tau = std::numeric_limits<double>::quiet_NaN();
        double l_prev = affine(lam_, xp);
        double r_prev = affine(rate_, xp);
        std::size_t next_obs = 0;

        for (std::size_t s = 1; s < grid_.times.size(); ++s) {
            const double t0 = grid_.times[s - 1];
            const double h = grid_.times[s] - t0;
            if (cfg_.scheme == Scheme::Euler) {
                diffusion(xp, R);
                for (int k = 0; k < d; ++k) z[k] = normal(rng) * std::sqrt(std::max(R[k], 0.0) * h);
                for (int i = 0; i < d; ++i) {
                    double v = x[i] + h * p_.b(i);
                    for (int j = 0; j < d; ++j) v += h * A_[idx(i, j)] * xp[j] + S_[idx(i, j)] * z[j];
                    xn[i] = v;
                }
                for (int i = 0; i < m_; ++i) {
                    if (xn[i] <= 0.0) ++truncations;
                }
            } else {
                exact_step(x, xn, h, rng, normal, R, z, tmp);
            }
            positive_part(xn, xp);
            const double l_new = affine(lam_, xp);
            const double r_new = affine(rate_, xp);
            const double cum_l_new = cum_l + 0.5 * h * (l_prev + l_new);
            const double cum_r_new = cum_r + 0.5 * h * (r_prev + r_new);
            if (std::isinf(tau) && cum_l_new >= threshold) {
                const double frac = cum_l_new > cum_l ? (threshold - cum_l) / (cum_l_new - cum_l) : 1.0;
                tau = t0 + frac * h;
                r_at_tau = cum_r + frac * (cum_r_new - cum_r);
            }
            std::swap(x, xn);
            cum_l = cum_l_new;
            cum_r = cum_r_new;
            l_prev = l_new;
            r_prev = r_new;
            if (next_obs < grid_.obs_steps.size() && grid_.obs_steps[next_obs] == s) {
                const std::size_t no = grid_.obs_steps.size();
                std::copy(xp, xp + d, out.states.begin() + static_cast<std::ptrdiff_t>((path * no + next_obs) * du));
                out.int_intensity[path * no + next_obs] = cum_l;
                out.int_rate[path * no + next_obs] = cum_r;
                ++next_obs;
            }
        }
        out.default_time[path] = tau;
        out.int_rate_at_default[path] = r_at_tau;
        return truncations;
    }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(j);
    }

    void positive_part(const double* x, double* y) const {
        for (int i = 0; i < d_; ++i) y[i] = i < m_ ? std::max(x[i], 0.0) : x[i];
    }

    double affine(const SpecAffine& s, const double* x) const {
        double v = s.bar;
        for (int i = 0; i < d_; ++i) v += s.vec(i) * x[i];
        return v;
    }

    // R_k = alpha_k + sum_i beta(i, k) x_i
    void diffusion(const double* x, double* R) const {
        for (int k = 0; k < d_; ++k) {
            double v = p_.alpha(k);
            for (int i = 0; i < d_; ++i) v += betaT_[idx(k, i)] * x[i];
            R[k] = v;
        }
    }

    // Exact transition for the square-root block; the remaining components are driven by the
    // implied Brownian increments of that block plus independent Gaussian increments with
    // trapezoidal variance.
    void exact_step(const double* x, double* xn, double h, CounterRng& rng, std::normal_distribution<double>& normal,
                    double* R0, double* shock, double* tmp) const {
        const int d = d_;
        const int m = m_;
        for (int i = 0; i < m; ++i) {
            const double kappa = -A_[idx(i, i)];
            const double s2 = S_[idx(i, i)] * S_[idx(i, i)] * p_.beta(i, i);
            const double ekh = std::exp(-kappa * h);
            const double c = kappa != 0.0 ? s2 * (1.0 - ekh) / (4.0 * kappa) : s2 * h / 4.0;
            const double df = 4.0 * p_.b(i) / s2;
            xn[i] = c * noncentral_chi2(df, x[i] * ekh / c, rng);
            const double drift_int = h * (A_[idx(i, i)] * 0.5 * (x[i] + xn[i]) + p_.b(i));
            shock[i] = (xn[i] - x[i] - drift_int) / S_[idx(i, i)];
        }
        diffusion(x, R0);
        // tmp holds x with its positive block replaced by the new values
        for (int i = 0; i < d; ++i) tmp[i] = i < m ? xn[i] : x[i];
        for (int k = m; k < d; ++k) {
            double r1 = p_.alpha(k);
            for (int i = 0; i < d; ++i) r1 += betaT_[idx(k, i)] * tmp[i];
            const double var = std::max(0.0, 0.5 * (R0[k] + r1)) * h;
            shock[k] = normal(rng) * std::sqrt(var);
        }
        for (int i = 0; i < m; ++i) tmp[i] = 0.5 * (x[i] + xn[i]);
        for (int j = m; j < d; ++j) {
            double v = x[j] + h * p_.b(j);
            for (int i = 0; i < d; ++i) v += h * A_[idx(j, i)] * tmp[i] + S_[idx(j, i)] * shock[i];
            xn[j] = v;
        }
    }

    const AffineModelParams& p_;
    const SpecAffine& lam_;
    const SpecAffine& rate_;
    const StepGrid& grid_;
    const SimConfig& cfg_;
    int d_;
    int m_;
    std::vector<double> A_, S_, betaT_;
};

}  // namespace detail

/// Simulates `model` on [0, max(obs)] and records states and integrals at each observation time.
/// The result does not depend on the number of threads.
inline PathBatch simulate(const SimModel& model, std::vector<double> obs_times, const SimConfig& cfg) {
    check_structure(model.params);
    if (cfg.n_paths < 1) throw InputError("n_paths must be >= 1");
    if (cfg.n_steps_per_year < 1) throw InputError("n_steps_per_year must be >= 1");
    if (obs_times.empty()) throw InputError("at least one observation time is required");
    std::sort(obs_times.begin(), obs_times.end());
    obs_times.erase(std::unique(obs_times.begin(), obs_times.end()), obs_times.end());
    if (!(obs_times.front() > 0.0)) throw InputError("observation times must be positive");
    const ValidationReport adm = validate_admissibility(model.params);
    if (!adm.ok()) throw ValidationError(adm);
    if (model.intensity.vec.size() != model.params.d || model.rate.vec.size() != model.params.d) {
        throw StructuralError("intensity and rate loadings must have length d");
    }
    if (cfg.scheme == Scheme::ExactCir) detail::check_exact_cir(model.params);

    const detail::StepGrid grid = detail::make_grid(obs_times, cfg.n_steps_per_year);
    PathBatch out;
    out.measure = model.measure;
    out.seed = cfg.seed;
    out.scheme = cfg.scheme;
    out.steps_per_year = cfg.n_steps_per_year;
    out.d = model.params.d;
    out.n_paths = cfg.n_paths;
    out.obs_times = obs_times;
    const std::size_t no = obs_times.size();
    out.states.resize(cfg.n_paths * no * static_cast<std::size_t>(out.d));
    out.int_intensity.resize(cfg.n_paths * no);
    out.int_rate.resize(cfg.n_paths * no);
    out.default_time.resize(cfg.n_paths);
    out.int_rate_at_default.resize(cfg.n_paths);
    out.substream.resize(cfg.n_paths);

    const detail::PathSimulator sim(model, grid, cfg);
    const int threads = std::max(1, cfg.threads);
    std::vector<std::uint64_t> trunc(static_cast<std::size_t>(threads), 0);
    const std::size_t chunk = (cfg.n_paths + threads - 1) / threads;
    auto work = [&](int w) {
        const std::size_t b = std::min(cfg.n_paths, chunk * static_cast<std::size_t>(w));
        const std::size_t e = std::min(cfg.n_paths, b + chunk);
        for (std::size_t p = b; p < e; ++p) trunc[static_cast<std::size_t>(w)] += sim.run(p, out);
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto c : trunc) out.truncation_events += c;
    return out;
}

// ---------------------------------------------------------------------------------------------
// Estimators.

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct ComplexEstimate {
    Complex value;
    double se_re = 0.0;
    double se_im = 0.0;
};

struct CdsEstimate {
    Estimate protection;
    Estimate annuity;
    Estimate spread;
};

/// Sample mean and standard error of per-path values, summed pairwise.
inline Estimate mean_se(const std::vector<double>& v) {
    Estimate e;
    const double n = static_cast<double>(v.size());
    e.value = quad::pairwise_sum(v) / n;
    if (v.size() < 2) return e;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - e.value) * (v[i] - e.value);
    e.se = std::sqrt(quad::pairwise_sum(sq) / (n - 1.0) / n);
    return e;
}

struct Survival {
    double T;
};
struct Cdf {
    double x;
    double T;
};
struct Bond {
    double T;
};
struct Call {
    double K;
    double T;
};
struct Put {
    double K;
    double T;
};
/// exp(z^T X_T) paid at T on survival.
struct ZeroRecovery {
    Vector z;
    double T;
};
/// 1 paid at default if tau <= T.
struct PureRecovery {
    double T;
};

using Functional = std::variant<Survival, Cdf, Bond, Call, Put, ZeroRecovery, PureRecovery>;

namespace detail {

inline void require(const PathBatch& b, Measure m, const char* what) {
    if (b.measure != m) {
        throw InputError(std::string(what) + (m == Measure::P ? " requires a P-measure batch" : " requires a Q-measure batch"));
    }
}

template <class F>
std::vector<double> per_path(const PathBatch& b, F&& f) {
    std::vector<double> v(b.n_paths);
    for (std::size_t p = 0; p < b.n_paths; ++p) v[p] = f(p);
    return v;
}

inline double log_price(const PathBatch& b, std::size_t p, std::size_t o) { return b.state(p, o, b.d - 1); }

}  // namespace detail

inline Estimate estimate(const PathBatch& b, const Survival& f) {
    detail::require(b, Measure::P, "survival");
    b.obs_index(f.T);
    return mean_se(detail::per_path(b, [&](std::size_t p) { return b.survives(p, f.T) ? 1.0 : 0.0; }));
}

/// Joint probability P(S_T <= x, tau > T); the standard error is binomial.
inline Estimate estimate(const PathBatch& b, const Cdf& f) {
    detail::require(b, Measure::P, "distribution");
    const std::size_t o = b.obs_index(f.T);
    const double lx = std::log(f.x);
    return mean_se(detail::per_path(
        b, [&](std::size_t p) { return b.survives(p, f.T) && detail::log_price(b, p, o) <= lx ? 1.0 : 0.0; }));
}

inline Estimate estimate(const PathBatch& b, const Bond& f) {
    detail::require(b, Measure::Q, "bond");
    const std::size_t o = b.obs_index(f.T);
    const std::size_t no = b.n_obs();
    return mean_se(detail::per_path(
        b, [&](std::size_t p) { return b.survives(p, f.T) ? std::exp(-b.int_rate[p * no + o]) : 0.0; }));
}

inline Estimate estimate(const PathBatch& b, const Call& f) {
    detail::require(b, Measure::Q, "call");
    const std::size_t o = b.obs_index(f.T);
    const std::size_t no = b.n_obs();
    return mean_se(detail::per_path(b, [&](std::size_t p) {
        if (!b.survives(p, f.T)) return 0.0;
        return std::exp(-b.int_rate[p * no + o]) * std::max(std::exp(detail::log_price(b, p, o)) - f.K, 0.0);
    }));
}

/// After default the stock is worth 0, so the put pays K.
inline Estimate estimate(const PathBatch& b, const Put& f) {
    detail::require(b, Measure::Q, "put");
    const std::size_t o = b.obs_index(f.T);
    const std::size_t no = b.n_obs();
    return mean_se(detail::per_path(b, [&](std::size_t p) {
        const double S = b.survives(p, f.T) ? std::exp(detail::log_price(b, p, o)) : 0.0;
        return std::exp(-b.int_rate[p * no + o]) * std::max(f.K - S, 0.0);
    }));
}

inline Estimate estimate(const PathBatch& b, const ZeroRecovery& f) {
    detail::require(b, Measure::Q, "zero-recovery claim");
    if (f.z.size() != b.d) throw StructuralError("claim exponent must have length d");
    const std::size_t o = b.obs_index(f.T);
    const std::size_t no = b.n_obs();
    return mean_se(detail::per_path(b, [&](std::size_t p) {
        if (!b.survives(p, f.T)) return 0.0;
        double e = -b.int_rate[p * no + o];
        for (int k = 0; k < b.d; ++k) e += f.z(k) * b.state(p, o, k);
        return std::exp(e);
    }));
}

inline Estimate estimate(const PathBatch& b, const PureRecovery& f) {
    detail::require(b, Measure::Q, "recovery claim");
    b.obs_index(f.T);
    return mean_se(detail::per_path(
        b, [&](std::size_t p) { return b.survives(p, f.T) ? 0.0 : std::exp(-b.int_rate_at_default[p]); }));
}

inline Estimate estimate(const PathBatch& b, const Functional& f) {
    return std::visit([&](const auto& g) { return estimate(b, g); }, f);
}

/// E[exp(-int lambda (- int r under Q)) exp(z^T X_T)], matching the Riccati transform flavor.
inline ComplexEstimate estimate_transform(const PathBatch& b, const CVector& z, double T) {
    if (z.size() != b.d) throw StructuralError("transform argument must have length d");
    const std::size_t o = b.obs_index(T);
    const std::size_t no = b.n_obs();
    std::vector<double> re(b.n_paths), im(b.n_paths);
    for (std::size_t p = 0; p < b.n_paths; ++p) {
        Complex e = -b.int_intensity[p * no + o];
        if (b.measure == Measure::Q) e -= b.int_rate[p * no + o];
        for (int k = 0; k < b.d; ++k) e += z(k) * b.state(p, o, k);
        const Complex v = std::exp(e);
        re[p] = v.real();
        im[p] = v.imag();
    }
    const Estimate r = mean_se(re);
    const Estimate i = mean_se(im);
    return {Complex(r.value, i.value), r.se, i.se};
}

/// Both CDS legs and the spread with a delta-method standard error. Payment dates must be
/// observation times of the batch.
inline CdsEstimate estimate_cds(const PathBatch& b, const std::vector<double>& dates, double recovery, double T) {
    detail::require(b, Measure::Q, "CDS");
    if (dates.size() < 2) throw InputError("CDS schedule needs at least two dates");
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k < dates.size(); ++k) idx.push_back(b.obs_index(dates[k]));
    b.obs_index(T);
    const std::size_t no = b.n_obs();
    std::vector<double> prot(b.n_paths), ann(b.n_paths);
    for (std::size_t p = 0; p < b.n_paths; ++p) {
        prot[p] = b.survives(p, T) ? 0.0 : recovery * std::exp(-b.int_rate_at_default[p]);
        double a = 0.0;
        for (std::size_t k = 1; k < dates.size(); ++k) {
            if (b.survives(p, dates[k])) a += (dates[k] - dates[k - 1]) * std::exp(-b.int_rate[p * no + idx[k - 1]]);
        }
        ann[p] = a;
    }
    CdsEstimate out;
    out.protection = mean_se(prot);
    out.annuity = mean_se(ann);
    out.spread.value = out.protection.value / out.annuity.value;
    std::vector<double> resid(b.n_paths);
    for (std::size_t p = 0; p < b.n_paths; ++p) resid[p] = prot[p] - out.spread.value * ann[p];
    out.spread.se = mean_se(resid).se / out.annuity.value;
    return out;
}

// ---------------------------------------------------------------------------------------------
// Binary dump: little-endian, fixed header followed by the arrays in declaration order.

namespace detail {
template <class T>
void put_le(std::ostream& os, T v) {
    std::uint64_t bits;
    if constexpr (std::is_same_v<T, double>) {
        bits = std::bit_cast<std::uint64_t>(v);
    } else {
        bits = static_cast<std::uint64_t>(v);
    }
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    os.write(buf, 8);
}
}  // namespace detail

inline void write_binary(const PathBatch& b, std::ostream& os) {
    os.write("AFFCPB01", 8);
    detail::put_le<std::uint64_t>(os, b.seed);
    detail::put_le<std::uint64_t>(os, b.n_paths);
    detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(b.d));
    detail::put_le<std::uint64_t>(os, b.n_obs());
    detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(b.steps_per_year));
    detail::put_le<std::uint64_t>(os, b.scheme == Scheme::Euler ? 0 : 1);
    detail::put_le<std::uint64_t>(os, b.measure == Measure::P ? 0 : 1);
    detail::put_le<std::uint64_t>(os, b.truncation_events);
    for (double t : b.obs_times) detail::put_le(os, t);
    for (double v : b.states) detail::put_le(os, v);
    for (double v : b.int_intensity) detail::put_le(os, v);
    for (double v : b.int_rate) detail::put_le(os, v);
    for (double v : b.default_time) detail::put_le(os, v);
    for (double v : b.int_rate_at_default) detail::put_le(os, v);
    for (auto v : b.substream) detail::put_le<std::uint64_t>(os, v);
}

inline void write_binary(const PathBatch& b, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open " + path + " for writing");
    write_binary(b, os);
}

}  // namespace affcredit::mc
