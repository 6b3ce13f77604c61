#include "cli_app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "affcredit/affcredit.hpp"

namespace affcredit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double tidy(double v) { return std::round(v * 1e12) / 1e12; }

std::vector<double> grid_param(const json& params, const std::string& key, std::vector<double> fallback) {
    if (!params.contains(key)) return fallback;
    const json& v = params.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw InputError("\"" + key + "\" must contain numbers");
            out.push_back(e.get<double>());
        }
        if (out.empty()) throw InputError("\"" + key + "\" must not be empty");
        return out;
    }
    if (v.is_object()) {
        const double from = io::detail::number(v, "from");
        const double to = io::detail::number(v, "to");
        if (v.contains("count")) {
            auto g = fourier::linspace(from, to, static_cast<int>(io::detail::number(v, "count")));
            for (auto& x : g) x = tidy(x);
            return g;
        }
        const double step = io::detail::number(v, "step");
        if (!(step > 0.0) || to < from) throw InputError("\"" + key + "\" needs from <= to and step > 0");
        std::vector<double> out;
        const int n = static_cast<int>(std::floor((to - from) / step + 1e-9));
        for (int i = 0; i <= n; ++i) out.push_back(tidy(from + step * i));
        return out;
    }
    throw InputError("\"" + key + "\" must be a number, a list or {from, to, count|step}");
}

double number_param(const json& params, const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (params.contains(key)) return io::detail::number(params, key);
    if (fallback) return *fallback;
    throw InputError("task parameter \"" + key + "\" is required");
}

std::string string_param(const json& params, const std::string& key, const std::string& fallback) {
    if (!params.contains(key)) return fallback;
    if (!params.at(key).is_string()) throw InputError("task parameter \"" + key + "\" must be a string");
    return params.at(key).get<std::string>();
}

Measure measure_param(const json& params, Measure fallback) {
    const std::string m = string_param(params, "measure", fallback == Measure::P ? "P" : "Q");
    if (m == "P") return Measure::P;
    if (m == "Q") return Measure::Q;
    throw InputError("measure must be \"P\" or \"Q\"");
}

mc::Scheme scheme_param(const json& params, mc::Scheme fallback) {
    const std::string s = string_param(params, "scheme", fallback == mc::Scheme::Euler ? "euler" : "exact");
    if (s == "euler") return mc::Scheme::Euler;
    if (s == "exact") return mc::Scheme::ExactCir;
    throw InputError("scheme must be \"euler\" or \"exact\"");
}

json diagnostics_json(const Diagnostics& d) {
    json j;
    j["quadrature_nodes"] = d.quadrature_nodes;
    j["riccati_tol"] = d.riccati_tol;
    if (d.u_max > 0.0) j["u_max"] = d.u_max;
    if (d.damping != 0.0) j["damping"] = d.damping;
    return j;
}

Artifact json_artifact(const json& j) { return {"json", j.dump(2) + "\n", {}}; }

std::string module_of(const std::string& kind) {
    if (kind == "validate" || kind == "verify-measure") return "measures";
    if (kind == "solve") return "riccati";
    if (kind == "survival" || kind == "bond" || kind == "cds") return "credit_pricing";
    if (kind == "option" || kind == "surface" || kind == "distribution") return "fourier";
    if (kind == "simulate" || kind == "compare") return "montecarlo";
    return "cli";
}

const json& model_part(const json& root) { return root.contains("model") ? root.at("model") : root; }

const json* premium_part(const json& root) {
    if (root.contains("premium")) return &root.at("premium");
    const json& m = model_part(root);
    return m.contains("premium") ? &m.at("premium") : nullptr;
}

// --- tasks ----------------------------------------------------------------------------------

Artifact task_validate(const json& root) { return json_artifact(validate_document(root)); }

Artifact task_verify_measure(const io::LoadedModel& m) {
    const auto& doc = m.generic;
    const RiskPremiumSpec& p = *m.premium;
    const ValidationReport clauses = validate_premium(doc.params, p, {true});
    const ResidualReport r = verify_drift_condition(doc.params, p, doc.rate, doc.lambda_p);
    json j;
    j["clauses"] = clauses.to_string();
    j["premium_ok"] = clauses.ok();
    j["residual"]["constant"] = r.constant;
    j["residual"]["state"] = std::vector<double>(r.state.data(), r.state.data() + r.state.size());
    j["residual"]["max_abs"] = r.max_abs();
    j["residual"]["pass"] = r.pass();
    j["residual"]["notes"] = r.notes;
    return json_artifact(j);
}

Artifact task_solve(const json& params, const io::LoadedModel& m) {
    const PricingContext& ctx = m.ctx;
    const int d = ctx.dim();
    const json& zj = io::detail::field(params, "z");
    if (!zj.is_array() || static_cast<int>(zj.size()) != d) throw StructuralError("z must have d entries");
    CVector z(d);
    for (int k = 0; k < d; ++k) {
        const json& e = zj[static_cast<std::size_t>(k)];
        if (e.is_number()) {
            z(k) = e.get<double>();
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            z(k) = Complex(e[0].get<double>(), e[1].get<double>());
        } else {
            throw InputError("z entries must be numbers or [re, im] pairs");
        }
    }
    const double T = number_param(params, "T");
    const Measure meas = measure_param(params, Measure::Q);
    RiccatiOptions opt = ctx.riccati;
    opt.allow_outside_domain = params.value("allow_outside_domain", false);
    const RiccatiSolution s = meas == Measure::P
                                  ? solve(ctx.p_params, MeasureFlavor::physical(ctx.lambda_p), ctx.q.rate, z, T, opt)
                                  : solve(ctx.q.model, MeasureFlavor::risk_neutral(ctx.q.lambda_q), ctx.q.rate, z, T, opt);
    std::ostringstream os;
    os << "t,re_phi,im_phi";
    for (int k = 1; k <= d; ++k) os << ",re_psi" << k << ",im_psi" << k;
    os << "\n";
    for (double t : s.grid()) {
        const ode::State y = s.state(t);
        os << num(t);
        for (int k = 0; k <= d; ++k) os << "," << num(y(k).real()) << "," << num(y(k).imag());
        os << "\n";
    }
    return {"csv", os.str(), {}};
}

Artifact task_survival(const json& params, const io::LoadedModel& m) {
    Diagnostics diag;
    json j;
    j["value"] = credit::survival_probability(m.ctx, number_param(params, "T"), &diag);
    j["diagnostics"] = diagnostics_json(diag);
    return json_artifact(j);
}

Artifact task_bond(const json& params, const io::LoadedModel& m) {
    Diagnostics diag;
    const double T = number_param(params, "T");
    json j;
    j["value"] = params.value("riskfree", false) ? credit::riskfree_bond(m.ctx, T, &diag)
                                                 : credit::defaultable_bond(m.ctx, T, &diag);
    j["diagnostics"] = diagnostics_json(diag);
    return json_artifact(j);
}

Artifact task_cds(const json& params, const io::LoadedModel& m) {
    Diagnostics diag;
    const double T = number_param(params, "T");
    const auto sched = credit::CdsSchedule::regular(m.ctx.t, T, static_cast<int>(number_param(params, "frequency", 4.0)),
                                                    number_param(params, "recovery", 0.6));
    const credit::CdsLegs legs = credit::cds_legs(m.ctx, sched, T, &diag);
    json j;
    j["value"] = legs.spread();
    j["protection_leg"] = legs.protection;
    j["premium_annuity"] = legs.annuity;
    j["diagnostics"] = diagnostics_json(diag);
    return json_artifact(j);
}

fourier::DampingConfig damping_param(const json& params) {
    fourier::DampingConfig d;
    d.w = number_param(params, "w", d.w);
    d.y = number_param(params, "y", d.y);
    return d;
}

Artifact task_option(const json& params, const io::LoadedModel& m, const GlobalOptions& g) {
    const double K = number_param(params, "K");
    const double T = number_param(params, "T");
    const std::string type = string_param(params, "type", "call");
    if (type != "call" && type != "put") throw InputError("option type must be \"call\" or \"put\"");
    fourier::QuadratureConfig qc;
    qc.tol = g.tol;
    Diagnostics diag;
    const bool call = type == "call";
    const double price = call ? fourier::call_price(m.ctx, K, T, damping_param(params), qc, &diag)
                              : fourier::put_price(m.ctx, K, T, damping_param(params), qc, &diag);
    json j;
    j["value"] = price;
    try {
        j["implied_vol"] = bs::implied_vol(price, m.ctx.spot(), K, T - m.ctx.t, m.ctx.riskfree_discount(T - m.ctx.t),
                                           call ? bs::OptionType::Call : bs::OptionType::Put);
    } catch (const InputError&) {
        j["implied_vol"] = nullptr;
    }
    j["diagnostics"] = diagnostics_json(diag);
    return json_artifact(j);
}

std::optional<PricingContext> default_free_reference(const io::LoadedModel& m) {
    if (!m.heston) return std::nullopt;
    heston::HestonPremium ref = *m.heston_premium;
    ref.lambda_q = {0.0, 0.0, 0.0};
    return heston::make_context(*m.heston, ref, {true}, m.ctx.riccati);
}

Artifact task_surface(const json& params, const io::LoadedModel& m, const GlobalOptions& g) {
    fourier::SurfaceConfig cfg;
    cfg.maturities = grid_param(params, "maturities", grid_param(json{{"m", {{"from", 0.5}, {"to", 3.0}, {"count", 7}}}}, "m", {}));
    cfg.moneyness = grid_param(params, "moneyness", grid_param(json{{"m", {{"from", 0.7}, {"to", 1.3}, {"step", 0.05}}}}, "m", {}));
    cfg.damping = damping_param(params);
    cfg.quadrature.tol = g.tol;
    cfg.threads = g.threads;
    const std::string method = string_param(params, "method", "quadrature");
    if (method == "fft") {
        cfg.method = fourier::Method::Fft;
    } else if (method != "quadrature") {
        throw InputError("method must be \"quadrature\" or \"fft\"");
    }
    std::optional<PricingContext> ref;
    if (params.value("reference", true)) ref = default_free_reference(m);
    const auto rows = fourier::surface(m.ctx, cfg, ref ? &*ref : nullptr);
    std::ostringstream os;
    os << "T,moneyness,put_price,call_price,implied_vol" << (ref ? ",implied_vol_default_free" : "") << "\n";
    for (const auto& r : rows) {
        os << num(r.maturity) << "," << num(r.moneyness) << "," << num(r.put) << "," << num(r.call) << ","
           << num(r.implied_vol);
        if (r.reference_vol) os << "," << num(*r.reference_vol);
        os << "\n";
    }
    return {"csv", os.str(), {}};
}

Artifact task_distribution(const json& params, const io::LoadedModel& m, const GlobalOptions& g) {
    const auto maturities = grid_param(params, "maturities", {0.5, 1.0, 1.75, 3.0});
    const auto levels = grid_param(params, "levels", grid_param(json{{"m", {{"from", 0.7}, {"to", 1.3}, {"step", 0.05}}}}, "m", {}));
    fourier::QuadratureConfig qc;
    qc.tol = g.tol;
    std::ostringstream os;
    os << "T,x,probability,survival\n";
    for (double T : maturities) {
        const double surv = credit::survival_probability(m.ctx, T);
        for (double x : levels) {
            os << num(T) << "," << num(x) << "," << num(fourier::survival_distribution(m.ctx, x * m.ctx.spot(), T, qc))
               << "," << num(surv) << "\n";
        }
    }
    return {"csv", os.str(), {}};
}

mc::SimConfig sim_config(const json& params, const GlobalOptions& g, int default_steps, mc::Scheme default_scheme) {
    mc::SimConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(number_param(params, "paths", 100000.0));
    cfg.n_steps_per_year = static_cast<int>(number_param(params, "steps_per_year", default_steps));
    cfg.seed = params.contains("seed") ? params.at("seed").get<std::uint64_t>() : g.seed;
    cfg.scheme = scheme_param(params, default_scheme);
    cfg.threads = g.threads;
    return cfg;
}

mc::SimModel sim_model(const io::LoadedModel& m, Measure meas) {
    return meas == Measure::P ? mc::SimModel::physical(m.ctx.p_params, m.ctx.lambda_p) : mc::SimModel::risk_neutral(m.ctx.q);
}

Artifact task_simulate(const json& params, const io::LoadedModel& m, const GlobalOptions& g) {
    const auto obs = grid_param(params, "observation_times", {number_param(params, "T", 1.0)});
    const Measure meas = measure_param(params, Measure::P);
    const mc::SimConfig cfg = sim_config(params, g, 1024, mc::Scheme::Euler);
    const mc::PathBatch b = mc::simulate(sim_model(m, meas), obs, cfg);
    const int d = b.d;
    std::ostringstream os;
    os << "t,survival,survival_se,killed_transform,killed_transform_se";
    for (int k = 1; k <= d; ++k) os << ",mean_x" << k;
    os << ",truncation_events\n";
    for (std::size_t o = 0; o < b.n_obs(); ++o) {
        const double t = b.obs_times[o];
        std::vector<double> alive(b.n_paths);
        for (std::size_t p = 0; p < b.n_paths; ++p) alive[p] = b.survives(p, t) ? 1.0 : 0.0;
        const mc::Estimate s = mc::mean_se(alive);
        const mc::ComplexEstimate kt = mc::estimate_transform(b, CVector::Zero(d), t);
        os << num(t) << "," << num(s.value) << "," << num(s.se) << "," << num(kt.value.real()) << "," << num(kt.se_re);
        for (int k = 0; k < d; ++k) {
            std::vector<double> xs(b.n_paths);
            for (std::size_t p = 0; p < b.n_paths; ++p) xs[p] = b.state(p, o, k);
            os << "," << num(quad::pairwise_sum(xs) / static_cast<double>(b.n_paths));
        }
        os << "," << b.truncation_events << "\n";
    }
    Artifact a{"csv", os.str(), {}};
    if (params.contains("dump")) {
        std::ostringstream bin(std::ios::binary);
        mc::write_binary(b, bin);
        a.side_files.emplace_back(string_param(params, "dump", "paths.bin"), bin.str());
    }
    return a;
}

Artifact task_compare(const json& params, const io::LoadedModel& m, const GlobalOptions& g) {
    const Measure meas = measure_param(params, Measure::P);
    const mc::SimConfig cfg = sim_config(params, g, 64, mc::Scheme::ExactCir);
    const PricingContext& ctx = m.ctx;
    fourier::QuadratureConfig qc;
    qc.tol = g.tol;
    std::ostringstream os;
    os << "quantity,T,parameter,analytic,mc,se,z,pass\n";
    auto row = [&](const std::string& q, double T, double param, double analytic, const mc::Estimate& e) {
        const double z = e.se > 0.0 ? (analytic - e.value) / e.se : (analytic == e.value ? 0.0 : INFINITY);
        os << q << "," << num(T) << "," << num(param) << "," << num(analytic) << "," << num(e.value) << ","
           << num(e.se) << "," << num(z) << "," << (std::abs(z) <= 3.0 ? "pass" : "fail") << "\n";
    };
    if (meas == Measure::P) {
        const auto maturities = grid_param(params, "maturities", {0.5, 1.0, 1.75, 3.0});
        const auto levels = grid_param(params, "levels", {0.7, 1.0, 1.3});
        const mc::PathBatch b = mc::simulate(sim_model(m, meas), maturities, cfg);
        for (double T : maturities) {
            row("survival", T, 0.0, credit::survival_probability(ctx, T), mc::estimate(b, mc::Survival{T}));
            for (double x : levels) {
                const double level = x * ctx.spot();
                row("distribution", T, x, fourier::survival_distribution(ctx, level, T, qc), mc::estimate(b, mc::Cdf{level, T}));
            }
        }
    } else {
        const auto maturities = grid_param(params, "maturities", {1.0});
        const auto strikes = grid_param(params, "strikes", {0.8, 1.0, 1.2});
        const int freq = static_cast<int>(number_param(params, "frequency", 4.0));
        const double recovery = number_param(params, "recovery", 0.6);
        std::set<double> obs(maturities.begin(), maturities.end());
        std::vector<credit::CdsSchedule> schedules;
        for (double T : maturities) {
            schedules.push_back(credit::CdsSchedule::regular(ctx.t, T, freq, recovery));
            for (std::size_t k = 1; k < schedules.back().dates.size(); ++k) obs.insert(schedules.back().dates[k]);
        }
        const mc::PathBatch b = mc::simulate(sim_model(m, meas), {obs.begin(), obs.end()}, cfg);
        for (std::size_t i = 0; i < maturities.size(); ++i) {
            const double T = maturities[i];
            row("bond", T, 0.0, credit::defaultable_bond(ctx, T), mc::estimate(b, mc::Bond{T}));
            for (double k : strikes) {
                const double K = k * ctx.spot();
                row("call", T, k, fourier::call_price(ctx, K, T, {}, qc), mc::estimate(b, mc::Call{K, T}));
                row("put", T, k, fourier::put_price(ctx, K, T, {}, qc), mc::estimate(b, mc::Put{K, T}));
            }
            row("recovery", T, 0.0, credit::pure_recovery_value(ctx, T, credit::PayoffBundle::one(ctx.dim())),
                mc::estimate(b, mc::PureRecovery{T}));
            const mc::CdsEstimate ce = mc::estimate_cds(b, schedules[i].dates, recovery, T);
            row("cds_spread", T, recovery, credit::cds_spread(ctx, schedules[i], T), ce.spread);
        }
    }
    return {"csv", os.str(), {}};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path.string());
    os << content;
}

}  // namespace

json validate_document(const json& root) {
    const json& model = model_part(root);
    const json* premium = premium_part(root);
    ValidationReport report;
    json out;
    if (io::is_heston_document(model)) {
        const heston::HestonJtdParams h = io::parse_heston(model);
        report = heston::validate_params(h);
        if (report.ok()) {
            report.append(validate_admissibility(heston::to_affine(h).params));
            heston::HestonPremium hp;
            if (premium) {
                hp = io::parse_heston_premium(*premium);
            } else {
                hp.lambda_q = h.lambda_p;
            }
            report.append(heston::validate_heston_preserving(h, hp));
        }
        out["model"] = "heston_jtd";
    } else {
        json merged = model;
        if (premium && !model.contains("premium")) merged["premium"] = *premium;
        const io::ModelDocument doc = io::parse_affine_document(merged);
        report = validate_admissibility(doc.params);
        report.append(validate_spec_affine(doc.lambda_p, doc.params.d, doc.params.m, "intensity-P"));
        report.append(validate_spec_affine(doc.rate, doc.params.d, doc.params.m, "rate", true));
        if (doc.premium) {
            report.append(validate_premium(doc.params, *doc.premium));
            const ResidualReport r = verify_drift_condition(doc.params, *doc.premium, doc.rate, doc.lambda_p);
            if (!r.pass()) report.add("drift", {}, r.max_abs(), 0.0, "drift restriction residual is nonzero");
        }
        out["model"] = "affine";
    }
    if (!report.ok()) throw ValidationError(report);
    out["report"] = report.to_string();
    return out;
}

Artifact run_task(const std::string& kind, const json& params, const json& root, const io::LoadedModel& model,
                  const GlobalOptions& g) {
    if (!params.is_object()) throw InputError("task parameters must be an object");
    if (kind == "validate") return task_validate(root);
    if (kind == "verify-measure") return task_verify_measure(model);
    if (kind == "solve") return task_solve(params, model);
    if (kind == "survival") return task_survival(params, model);
    if (kind == "bond") return task_bond(params, model);
    if (kind == "cds") return task_cds(params, model);
    if (kind == "option") return task_option(params, model, g);
    if (kind == "surface") return task_surface(params, model, g);
    if (kind == "distribution") return task_distribution(params, model, g);
    if (kind == "simulate") return task_simulate(params, model, g);
    if (kind == "compare") return task_compare(params, model, g);
    throw InputError("unknown task kind \"" + kind + "\"");
}

Artifact run_task(const std::string& kind, const json& params, const io::LoadedModel& model, const GlobalOptions& g) {
    return run_task(kind, params, json::object(), model, g);
}

namespace {

io::LoadedModel load(const json& root) {
    MeasureChangeOptions mopt;
    // A zero risk-neutral intensity is the default-free limit; accept it when asked for explicitly.
    mopt.allow_default_free = root.value("allow_default_free", false);
    return io::load_model(root, mopt);
}

void emit(const Artifact& a, const std::string& kind, std::size_t index, const GlobalOptions& g, std::ostream& out) {
    if (g.output_dir.empty()) {
        out << a.content;
        for (const auto& [name, bytes] : a.side_files) write_file(name, bytes);
        return;
    }
    fs::create_directories(g.output_dir);
    const fs::path p = fs::path(g.output_dir) / (kind + "_" + std::to_string(index) + "." + a.extension);
    write_file(p, a.content);
    for (const auto& [name, bytes] : a.side_files) write_file(fs::path(g.output_dir) / name, bytes);
    out << p.string() << "\n";
}

}  // namespace

void run_scenario(const std::string& scenario_path, const GlobalOptions& g_in, std::ostream& log) {
    GlobalOptions g = g_in;
    if (g.output_dir.empty()) g.output_dir = ".";
    const json root = io::read_file(scenario_path);
    if (!root.is_object() || !root.contains("model")) throw InputError("scenario must be an object with a \"model\"");
    const json tasks = root.value("tasks", json::array());
    if (!tasks.is_array()) throw InputError("\"tasks\" must be an array");
    if (root.contains("seed")) g.seed = root.at("seed").get<std::uint64_t>();
    const io::LoadedModel model = load(root);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const json& t = tasks[i];
        if (!t.is_object() || !t.contains("kind") || !t.at("kind").is_string()) {
            throw InputError("task " + std::to_string(i) + " needs a string \"kind\"");
        }
        const std::string kind = t.at("kind").get<std::string>();
        const json params = t.value("parameters", json::object());
        try {
            emit(run_task(kind, params, root, model, g), kind, i, g, log);
        } catch (const NumericalError& e) {
            throw NumericalError("task " + std::to_string(i) + " (" + kind + ", module " + module_of(kind) +
                                 "): " + e.what());
        }
    }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Affine default-risk pricing engine"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--tol", g.tol, "Absolute quadrature tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Monte Carlo seed");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--output-dir", g.output_dir, "Directory for output files");

    std::string model_path;
    json params = json::object();
    std::string kind;

    struct Spec {
        std::string name;
        std::string help;
    };
    const std::vector<Spec> specs = {
        {"validate", "Check admissibility, premium and drift conditions"},
        {"verify-measure", "Print drift-restriction residuals and premium clause checks"},
        {"solve", "Integrate the Riccati system and dump (Phi, Psi) as CSV"},
        {"survival", "Survival probability under P"},
        {"bond", "Defaultable (or default-free) zero-coupon bond"},
        {"cds", "Fair CDS spread"},
        {"option", "Call or put price by Fourier inversion"},
        {"surface", "Put/call/implied-vol surface as CSV"},
        {"distribution", "Survival-conditional distribution function grid as CSV"},
        {"simulate", "Monte Carlo simulation summary as CSV"},
        {"compare", "Analytic vs Monte Carlo table with 3-SE flags"},
    };

    // Option storage shared by all subcommands; only those given are copied into `params`.
    double T = 0, K = 0, w = 0, y = 0, recovery = 0, paths = 0, steps = 0, frequency = 0;
    std::string z, measure, scheme, type, method, dump;
    std::vector<double> maturities, moneyness, levels, strikes, obs;
    bool riskfree = false, no_reference = false, outside = false;

    std::vector<CLI::App*> subs;
    for (const auto& s : specs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--model", model_path, "Model JSON (bare model or {model, premium})")->required();
        subs.push_back(sub);
    }
    auto sub = [&](const std::string& name) { return app.get_subcommand(name); };
    sub("solve")->add_option("--z", z, "Transform argument, entries re[:im] separated by commas")->required();
    sub("solve")->add_option("--T", T, "Horizon")->required();
    sub("solve")->add_option("--measure", measure, "P or Q");
    sub("solve")->add_flag("--allow-outside-domain", outside, "Admit arguments outside the guaranteed domain");
    sub("survival")->add_option("--T", T, "Maturity")->required();
    sub("bond")->add_option("--T", T, "Maturity")->required();
    sub("bond")->add_flag("--riskfree", riskfree, "Price the default-free bond");
    sub("cds")->add_option("--T", T, "Maturity")->required();
    sub("cds")->add_option("--frequency", frequency, "Payments per year");
    sub("cds")->add_option("--recovery", recovery, "Recovery fraction");
    sub("option")->add_option("--K", K, "Strike")->required();
    sub("option")->add_option("--T", T, "Maturity")->required();
    sub("option")->add_option("--type", type, "call or put");
    sub("option")->add_option("--w", w, "Call damping");
    sub("option")->add_option("--y", y, "Put damping");
    sub("surface")->add_option("--maturities", maturities, "Maturities")->delimiter(',');
    sub("surface")->add_option("--moneyness", moneyness, "Strike/spot ratios")->delimiter(',');
    sub("surface")->add_option("--method", method, "quadrature or fft");
    sub("surface")->add_flag("--no-reference", no_reference, "Omit the default-free reference column");
    sub("distribution")->add_option("--maturities", maturities, "Maturities")->delimiter(',');
    sub("distribution")->add_option("--levels", levels, "Levels relative to spot")->delimiter(',');
    for (const char* name : {"simulate", "compare"}) {
        sub(name)->add_option("--paths", paths, "Number of paths");
        sub(name)->add_option("--steps-per-year", steps, "Time steps per year");
        sub(name)->add_option("--measure", measure, "P or Q");
        sub(name)->add_option("--scheme", scheme, "euler or exact");
    }
    sub("simulate")->add_option("--T", obs, "Observation times")->delimiter(',');
    sub("simulate")->add_option("--dump", dump, "Binary path dump file name");
    sub("compare")->add_option("--maturities", maturities, "Maturities")->delimiter(',');
    sub("compare")->add_option("--levels", levels, "Distribution levels relative to spot")->delimiter(',');
    sub("compare")->add_option("--strikes", strikes, "Strikes relative to spot")->delimiter(',');

    std::string scenario;
    CLI::App* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario, "Scenario JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            run_scenario(scenario, g, out);
            return 0;
        }
        for (CLI::App* s : subs) {
            if (s->parsed()) kind = s->get_name();
        }
        auto given = [&](const std::string& opt) {
            const CLI::App* s = sub(kind);
            return s->get_option_no_throw(opt) != nullptr && s->count(opt) > 0;
        };
        if (given("--T")) params["T"] = kind == "simulate" ? json(obs) : json(T);
        if (kind == "simulate" && given("--T")) params["observation_times"] = obs;
        if (given("--K")) params["K"] = K;
        if (given("--w")) params["w"] = w;
        if (given("--y")) params["y"] = y;
        if (given("--recovery")) params["recovery"] = recovery;
        if (given("--frequency")) params["frequency"] = frequency;
        if (given("--paths")) params["paths"] = paths;
        if (given("--steps-per-year")) params["steps_per_year"] = steps;
        if (given("--measure")) params["measure"] = measure;
        if (given("--scheme")) params["scheme"] = scheme;
        if (given("--type")) params["type"] = type;
        if (given("--method")) params["method"] = method;
        if (given("--dump")) params["dump"] = dump;
        if (given("--maturities")) params["maturities"] = maturities;
        if (given("--moneyness")) params["moneyness"] = moneyness;
        if (given("--levels")) params["levels"] = levels;
        if (given("--strikes")) params["strikes"] = strikes;
        if (riskfree) params["riskfree"] = true;
        if (no_reference) params["reference"] = false;
        if (outside) params["allow_outside_domain"] = true;
        if (kind == "simulate") params.erase("T");
        if (given("--z")) {
            json arr = json::array();
            std::stringstream ss(z);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto colon = item.find(':');
                const double re = std::stod(item.substr(0, colon));
                const double im = colon == std::string::npos ? 0.0 : std::stod(item.substr(colon + 1));
                arr.push_back({re, im});
            }
            params["z"] = arr;
        }

        const json root = io::read_file(model_path);
        if (kind == "validate") {
            emit(task_validate(root), kind, 0, g, out);
            return 0;
        }
        const io::LoadedModel model = load(root);
        emit(run_task(kind, params, root, model, g), kind, 0, g, out);
        return 0;
    } catch (const ValidationError& e) {
        err << e.report().to_string();
        return 2;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure in " << module_of(kind) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace affcredit::cli
