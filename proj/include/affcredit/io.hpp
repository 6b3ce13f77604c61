#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "affcredit/context.hpp"
#include "affcredit/heston_jtd.hpp"
#include "affcredit/measures.hpp"

namespace affcredit::io {

using nlohmann::json;

namespace detail {

inline const json& field(const json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key)) throw InputError("missing field \"" + key + "\"");
    return j.at(key);
}

inline double number(const json& j, const std::string& key) {
    const json& v = field(j, key);
    if (!v.is_number()) throw InputError("field \"" + key + "\" must be a number");
    return v.get<double>();
}

inline double number_or(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

inline Vector vector(const json& v, const std::string& what) {
    if (!v.is_array()) throw InputError(what + " must be an array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw InputError(what + " must contain numbers");
        out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
}

inline Matrix matrix(const json& v, const std::string& what) {
    if (!v.is_array() || v.empty()) throw InputError(what + " must be a nonempty array of rows");
    const std::size_t rows = v.size();
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!v[i].is_array() || v[i].size() != cols) throw StructuralError(what + " rows must have equal length");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!v[i][j].is_number()) throw InputError(what + " must contain numbers");
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
        }
    }
    return out;
}

inline SpecAffine spec_affine(const json& v, const std::string& what, int d) {
    if (!v.is_object()) throw InputError(what + " must be an object {bar, vec}");
    SpecAffine s{number(v, "bar"), v.contains("vec") ? vector(v.at("vec"), what + ".vec") : Vector::Zero(d)};
    if (s.vec.size() != d) throw StructuralError(what + ".vec must have length d");
    return s;
}

inline std::array<double, 3> triple(const json& v, const std::string& what) {
    const Vector t = vector(v, what);
    if (t.size() != 3) throw StructuralError(what + " must have three entries");
    return {t(0), t(1), t(2)};
}

}  // namespace detail

/// Generic affine model document, optionally with a premium block.
struct ModelDocument {
    AffineModelParams params;
    SpecAffine lambda_p;
    std::optional<SpecAffine> lambda_q;
    SpecAffine rate;
    std::optional<RiskPremiumSpec> premium;
};

inline bool is_heston_document(const json& j) { return j.is_object() && j.contains("k") && j.contains("vhat"); }

inline ModelDocument parse_affine_document(const json& j) {
    using namespace detail;
    ModelDocument doc;
    auto& p = doc.params;
    p.d = static_cast<int>(number(j, "d"));
    p.m = static_cast<int>(number(j, "m"));
    p.A = matrix(field(j, "A"), "A");
    p.b = vector(field(j, "b"), "b");
    p.Sigma = matrix(field(j, "Sigma"), "Sigma");
    p.alpha = j.contains("alpha") ? vector(j.at("alpha"), "alpha") : Vector::Zero(p.d);
    p.beta = matrix(field(j, "beta"), "beta");
    p.x0 = vector(field(j, "x0"), "x0");
    check_structure(p);
    doc.lambda_p = spec_affine(field(j, "intensity_P"), "intensity_P", p.d);
    if (j.contains("intensity_Q")) doc.lambda_q = spec_affine(j.at("intensity_Q"), "intensity_Q", p.d);
    doc.rate = j.contains("rate") ? spec_affine(j.at("rate"), "rate", p.d) : SpecAffine::zero(p.d);
    if (j.contains("premium")) {
        const json& pr = j.at("premium");
        RiskPremiumSpec rp;
        rp.thetahat = pr.contains("thetahat") ? vector(pr.at("thetahat"), "premium.thetahat") : Vector::Zero(p.d);
        rp.Theta = pr.contains("Theta") ? matrix(pr.at("Theta"), "premium.Theta") : Matrix::Zero(p.d, p.d);
        rp.lambda_q = doc.lambda_q.value_or(doc.lambda_p);
        doc.premium = rp;
    }
    return doc;
}

inline heston::HestonJtdParams parse_heston(const json& j) {
    using namespace detail;
    heston::HestonJtdParams h;
    h.k = number(j, "k");
    h.vhat = number(j, "vhat");
    h.sigmabar = number(j, "sigmabar");
    h.k0 = number(j, "k0");
    h.yhat = number(j, "yhat");
    h.sigma0 = number(j, "sigma0");
    h.mu = number(j, "mu");
    h.rho = number(j, "rho");
    h.rbar = number_or(j, "rbar", 0.0);
    h.lambda_p = triple(field(j, "lambdaP"), "lambdaP");
    h.v0 = number_or(j, "v0", h.vhat);
    h.y0 = number_or(j, "y0", h.yhat);
    h.s0 = number_or(j, "s0", 1.0);
    return h;
}

inline heston::HestonPremium parse_heston_premium(const json& j) {
    using namespace detail;
    heston::HestonPremium p;
    p.theta1hat = number_or(j, "theta1hat", 0.0);
    p.theta2hat = number_or(j, "theta2hat", 0.0);
    p.Theta11 = number_or(j, "Theta11", 0.0);
    p.Theta22 = number_or(j, "Theta22", 0.0);
    p.lambda_q = triple(field(j, "lambdaQ"), "lambdaQ");
    return p;
}

/// A model ready for pricing, with the Heston inputs kept when the document used that form.
struct LoadedModel {
    PricingContext ctx;
    std::optional<heston::HestonJtdParams> heston;
    std::optional<heston::HestonPremium> heston_premium;
    std::optional<RiskPremiumSpec> premium;
    ModelDocument generic;
};

/// Accepts either {"model": ..., "premium": ...} or a bare model object with an optional
/// "premium" member. Without a premium the physical parameters are used under Q as well.
inline LoadedModel load_model(const json& root, const MeasureChangeOptions& mopt = {}, const RiccatiOptions& ropt = {}) {
    const json& model = root.contains("model") ? root.at("model") : root;
    const json* premium = root.contains("premium") ? &root.at("premium")
                          : (model.contains("premium") ? &model.at("premium") : nullptr);
    LoadedModel out;
    if (is_heston_document(model)) {
        const heston::HestonJtdParams h = parse_heston(model);
        heston::HestonPremium hp;
        if (premium) {
            hp = parse_heston_premium(*premium);
        } else {
            hp.lambda_q = h.lambda_p;
        }
        out.heston = h;
        out.heston_premium = hp;
        out.ctx = heston::make_context(h, hp, mopt, ropt);
        const auto am = heston::to_affine(h);
        out.generic = {am.params, am.lambda_p, heston::intensity_q(hp), am.rate, heston::full_premium(h, hp)};
        out.premium = out.generic.premium;
        return out;
    }
    ModelDocument doc = parse_affine_document(model);
    if (premium && !doc.premium) {
        json merged = model;
        merged["premium"] = *premium;
        doc = parse_affine_document(merged);
    }
    RiskPremiumSpec rp = doc.premium.value_or(
        RiskPremiumSpec::zero(doc.params.d, doc.lambda_q.value_or(doc.lambda_p)));
    out.ctx = make_context(doc.params, doc.lambda_p, rp, doc.rate, mopt, ropt);
    out.premium = rp;
    out.generic = doc;
    return out;
}

/// Parses text, reporting the byte offset of a syntax error.
inline json parse_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in " + source + " at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

}  // namespace affcredit::io
