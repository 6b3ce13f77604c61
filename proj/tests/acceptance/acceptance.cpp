// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit when any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "../unit/fixtures.hpp"
#include "cli_app.hpp"

using namespace affcredit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0 && secs > budget_s) {
        o.pass = false;
        o.detail += "; over runtime budget";
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s [%.1fs%s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs,
                budget_s > 0 ? (" of " + std::to_string(static_cast<int>(budget_s)) + "s").c_str() : "");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

int threads() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

mc::SimConfig mc_config(std::uint64_t seed) {
    mc::SimConfig cfg;
    cfg.n_paths = 1000000;
    cfg.n_steps_per_year = 64;
    cfg.scheme = mc::Scheme::ExactCir;
    cfg.seed = seed;
    cfg.threads = threads();
    return cfg;
}

// Tracks the worst |z| over a set of analytic vs MC comparisons.
struct ZTracker {
    double worst = 0.0;
    std::string where;
    int count = 0;
    void add(double analytic, const mc::Estimate& e, const std::string& label) {
        const double z = e.se > 0 ? std::abs(analytic - e.value) / e.se : (analytic == e.value ? 0.0 : 1e300);
        ++count;
        if (z > worst) {
            worst = z;
            where = label;
        }
    }
    Outcome outcome() const {
        return {worst <= 3.0, std::to_string(count) + " comparisons, max |z| " + fmt("%.2f", worst) + " at " + where};
    }
};

Outcome closed_form_vs_numeric() {
    const auto h = fixtures::calibrated_heston();
    const auto pr = fixtures::calibrated_premium();
    const PricingContext c = fixtures::calibrated_context(false);
    std::mt19937_64 g(2024);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
        CVector z(3);
        z << Complex(-fixtures::uniform(g, 0, 2), fixtures::uniform(g, -5, 5)),
            Complex(-fixtures::uniform(g, 0, 2), fixtures::uniform(g, -5, 5)), Complex(0.0, fixtures::uniform(g, -10, 10));
        const auto s = solve(c.q.model, MeasureFlavor::risk_neutral(c.q.lambda_q), c.q.rate, z, 3.0);
        std::vector<double> times = s.grid();
        for (int k = 0; k <= 60; ++k) times.push_back(0.05 * k);
        for (double t : times) {
            const auto e = heston::closed_form_riccati(h, pr, z, t);
            worst = std::max({worst, std::abs(e.Phi - s.Phi(t)), (e.Psi - s.Psi(t)).cwiseAbs().maxCoeff()});
        }
    }
    return {worst < 1e-7, fmt("sup error %.3e over 50 arguments", worst)};
}

Outcome p_side_mc() {
    const PricingContext c = fixtures::calibrated_context();
    const std::vector<double> mats{0.5, 1.0, 1.75, 3.0};
    const auto b = mc::simulate(mc::SimModel::physical(c.p_params, c.lambda_p), mats, mc_config(20240601));
    ZTracker z;
    for (double T : mats) {
        z.add(credit::survival_probability(c, T), mc::estimate(b, mc::Survival{T}), "survival T=" + fmt("%g", T));
        for (double x : {0.7, 1.0, 1.3}) {
            z.add(fourier::survival_distribution(c, x * c.spot(), T), mc::estimate(b, mc::Cdf{x * c.spot(), T}),
                  "distribution T=" + fmt("%g x=%g", T, x));
        }
    }
    return z.outcome();
}

Outcome q_side_mc() {
    const PricingContext c = fixtures::calibrated_context();
    const auto sched = credit::CdsSchedule::regular(0.0, 1.0, 4, 0.6);
    const std::vector<double> obs(sched.dates.begin() + 1, sched.dates.end());
    const auto b = mc::simulate(mc::SimModel::risk_neutral(c.q), obs, mc_config(20240602));
    ZTracker z;
    z.add(credit::defaultable_bond(c, 1.0), mc::estimate(b, mc::Bond{1.0}), "bond");
    for (double K : {0.8, 1.0, 1.2}) {
        z.add(fourier::call_price(c, K, 1.0), mc::estimate(b, mc::Call{K, 1.0}), "call K=" + fmt("%g", K));
        z.add(fourier::put_price(c, K, 1.0), mc::estimate(b, mc::Put{K, 1.0}), "put K=" + fmt("%g", K));
    }
    const auto e = mc::estimate_cds(b, sched.dates, 0.6, 1.0);
    z.add(credit::cds_spread(c, sched, 1.0), e.spread, "cds spread");
    return z.outcome();
}

Outcome parity() {
    const PricingContext c = fixtures::calibrated_context();
    double worst = 0.0;
    for (double T : fourier::linspace(0.5, 3.0, 7)) {
        for (double m : fourier::linspace(0.7, 1.3, 13)) {
            worst = std::max(worst, std::abs(credit::parity_residual(c, m * c.spot(), T)));
        }
    }
    return {worst < 1e-5 * c.spot(), fmt("max |residual| %.3e on 7x13 grid", worst)};
}

Outcome constant_hazard() {
    double worst = 0.0;
    for (const auto& [l, r] : std::vector<std::pair<double, double>>{{0.02, 0.01}, {0.1, 0.0}, {0.05, 0.03}}) {
        const auto c = fixtures::constant_hazard_context(l, r);
        for (double T : {0.5, 1.0, 5.0}) {
            worst = std::max(worst, std::abs(credit::survival_probability(c, T) - std::exp(-l * T)));
            worst = std::max(worst, std::abs(credit::defaultable_bond(c, T) - std::exp(-(l + r) * T)));
        }
        const double delta = 0.6;
        const auto sched = credit::CdsSchedule::regular(0.0, 5.0, 4, delta);
        const auto legs = credit::cds_legs(c, sched, 5.0);
        const double prot = delta * l / (l + r) * (1.0 - std::exp(-(l + r) * 5.0));
        double ann = 0.0;
        for (int k = 1; k <= 20; ++k) ann += 0.25 * std::exp(-(l + r) * 0.25 * k);
        worst = std::max({worst, std::abs(legs.protection - prot), std::abs(legs.annuity - ann),
                          std::abs(legs.spread() - prot / ann)});
    }
    return {worst < 1e-8, fmt("max deviation %.3e", worst)};
}

fourier::SurfaceConfig grid(std::vector<double> maturities) {
    fourier::SurfaceConfig cfg;
    cfg.maturities = std::move(maturities);
    cfg.moneyness = fourier::linspace(0.7, 1.3, 13);
    cfg.threads = threads();
    return cfg;
}

Outcome figure_claims() {
    const PricingContext c = fixtures::calibrated_context();
    const PricingContext ref = fixtures::default_free_context();
    const auto rows = fourier::surface(c, grid(fourier::linspace(0.5, 3.0, 7)), &ref);
    double min_gap = 1e300, corner_gap = 0.0;
    for (const auto& r : rows) {
        const double gap = r.implied_vol - *r.reference_vol;
        min_gap = std::min(min_gap, gap);
        if (r.maturity == 0.5 && std::abs(r.moneyness - 0.7) < 1e-12) corner_gap = gap;
    }
    const bool a = rows.size() == 91 && min_gap >= 0.0 && corner_gap > 1e-4;

    double min_step = 1e300;
    std::vector<double> prev;
    for (double lq : {0.0, 0.05, 0.1, 0.2}) {
        const auto ctx = heston::make_context(fixtures::calibrated_heston(), fixtures::calibrated_premium(lq));
        const auto slice = fourier::surface(ctx, grid({1.75}));
        std::vector<double> vols;
        for (const auto& r : slice) vols.push_back(r.implied_vol);
        for (std::size_t i = 0; i < prev.size(); ++i) min_step = std::min(min_step, vols[i] - prev[i]);
        prev = vols;
    }
    const bool b = min_step >= 0.0;
    return {a && b, fmt("(a) min gap %.3e, gap at 0.7/0.5 %.3e", min_gap, corner_gap) +
                        fmt("; (b) min increment over intensity ladder %.3e", min_step)};
}

bool only_clause(const ValidationReport& r, const std::string& clause) {
    if (r.ok()) return false;
    for (const auto& i : r.issues) {
        if (i.clause != clause) return false;
    }
    return true;
}

Outcome measure_soundness() {
    std::mt19937_64 g(31337);
    int admissible = 0;
    for (int n = 0; n < 1000; ++n) {
        const auto p = fixtures::random_admissible(g);
        const auto pr = fixtures::random_valid_premium(p, g);
        try {
            const auto q = apply_measure_change(p, pr, SpecAffine::zero(3));
            if (validate_admissibility(q.model).ok()) ++admissible;
        } catch (const ValidationError&) {
        }
    }
    int rejected = 0, total = 0;
    for (int n = 0; n < 250; ++n) {
        const auto p = fixtures::random_admissible(g);
        const auto base = fixtures::random_valid_premium(p, g);
        std::vector<std::pair<RiskPremiumSpec, std::string>> cases;
        auto pr = base;
        pr.thetahat(n % 2) = (p.Sigma(n % 2, n % 2) * p.Sigma(n % 2, n % 2) / 2.0 - p.b(n % 2)) / p.Sigma(n % 2, n % 2) -
                             fixtures::uniform(g, 1e-4, 0.5);
        cases.emplace_back(pr, "premium-i");
        pr = base;
        pr.Theta(n % 2, 2) = fixtures::uniform(g, 0.01, 1.0);
        cases.emplace_back(pr, "premium-ii");
        pr = base;
        pr.Theta(0, 1) = (-p.A(0, 1) - fixtures::uniform(g, 1e-3, 0.5)) / p.Sigma(0, 0);
        cases.emplace_back(pr, "premium-ii");
        pr = base;
        pr.lambda_q.vec(2) = fixtures::uniform(g, 0.01, 1.0) * (n % 2 ? 1.0 : -1.0);
        cases.emplace_back(pr, "intensity");
        for (const auto& [bad, clause] : cases) {
            ++total;
            if (!only_clause(validate_premium(p, bad), clause)) continue;
            try {
                apply_measure_change(p, bad, SpecAffine::zero(3));
            } catch (const ValidationError& e) {
                if (e.report().has(clause)) ++rejected;
            }
        }
    }
    return {admissible == 1000 && rejected == total,
            std::to_string(admissible) + "/1000 valid premia admissible, " + std::to_string(rejected) + "/" +
                std::to_string(total) + " violations rejected with the right clause"};
}

Outcome drift_validator() {
    const auto h = fixtures::calibrated_heston();
    const auto m = heston::to_affine(h);
    const auto pr = heston::full_premium(h, fixtures::calibrated_premium());
    const auto base = verify_drift_condition(m.params, pr, m.rate, m.lambda_p);
    double smallest = 1e300;
    for (double eps : {1e-3, -1e-3}) {
        auto bad = pr;
        bad.thetahat(2) += eps;
        const auto r = verify_drift_condition(m.params, bad, m.rate, m.lambda_p);
        smallest = std::min(smallest, r.pass() ? 0.0 : r.max_abs());
    }
    return {base.pass() && smallest > 1e-6,
            fmt("closed-form residual %.3e, perturbed residual %.3e", base.max_abs(), smallest)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "affcredit_acceptance_determinism";
    fs::remove_all(root);
    const std::string scen = std::string(AFFCREDIT_SOURCE_DIR) + "/scenarios/";
    std::vector<std::string> dirs;
    int files = 0;
    bool same = true;
    for (const std::string name : {"simulate.json", "surface.json", "compare_p.json"}) {
        std::string first;
        for (const char* th : {"1", "4", "1", "3"}) {
            const fs::path out = root / (name + "_" + th + "_" + std::to_string(dirs.size()));
            dirs.push_back(out.string());
            std::vector<std::string> args{"affcredit_cli", "--threads", th, "--output-dir", out.string(), "run", scen + name};
            std::vector<char*> argv;
            for (auto& a : args) argv.push_back(a.data());
            std::ostringstream o, e;
            if (cli::main(static_cast<int>(argv.size()), argv.data(), o, e) != 0) return {false, name + ": " + e.str()};
            std::string all;
            std::vector<fs::path> paths;
            for (const auto& f : fs::directory_iterator(out)) paths.push_back(f.path());
            std::sort(paths.begin(), paths.end());
            for (const auto& p : paths) all += p.filename().string() + "\n" + slurp(p);
            if (first.empty()) {
                first = all;
                files += static_cast<int>(paths.size());
            } else if (all != first) {
                same = false;
            }
        }
    }
    fs::remove_all(root);
    return {same, std::to_string(files) + " output files compared across 4 runs each (threads 1, 4, 1, 3)"};
}

}  // namespace

int main() {
    criterion(1, "closed-form vs numerical Riccati", 5, closed_form_vs_numeric);
    criterion(2, "P-side analytic vs Monte Carlo", 180, p_side_mc);
    criterion(3, "Q-side analytic vs Monte Carlo", 300, q_side_mc);
    criterion(4, "put-call parity", 30, parity);
    criterion(5, "constant-hazard closed forms", 0, constant_hazard);
    criterion(6, "implied-vol figure claims", 120, figure_claims);
    criterion(7, "measure-change soundness", 0, measure_soundness);
    criterion(8, "drift-condition validator", 0, drift_validator);
    criterion(9, "determinism", 0, determinism);
    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
