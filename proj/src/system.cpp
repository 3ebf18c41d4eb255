#include "csimplex/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace csimplex {

using nlohmann::json;

std::string family_name(Family f) {
    switch (f) {
        case Family::lv_smooth: return "lv_smooth";
        case Family::lv_seasonal: return "lv_seasonal";
        case Family::custom_piecewise: return "custom_piecewise";
    }
    return "?";
}

SystemSpec::SystemSpec(int d, double T, std::vector<double> interior_breakpoints,
                       std::vector<Piece> pieces, Family family,
                       std::map<std::string, double> params)
    : d_(d), T_(T), pieces_(std::move(pieces)), family_(family), params_(std::move(params)) {
    if (d < 1) throw InputError("species count must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T)) throw InputError("period must be positive and finite");
    omega_ = 2.0 * std::numbers::pi / T;

    breakpoints_.push_back(0.0);
    for (double b : interior_breakpoints) breakpoints_.push_back(b);
    breakpoints_.push_back(T);
    for (size_t k = 0; k + 1 < breakpoints_.size(); ++k)
        if (!(breakpoints_[k] < breakpoints_[k + 1]))
            throw InputError("breakpoints must be strictly increasing in (0, T)");

    if (pieces_.size() != breakpoints_.size() - 1)
        throw InputError("piece count must match breakpoint intervals");
    for (const auto& p : pieces_) {
        if (p.r.size() != static_cast<size_t>(d)) throw InputError("piece r size != d");
        if (p.a.size() != static_cast<size_t>(d)) throw InputError("piece a rows != d");
        for (const auto& row : p.a)
            if (row.size() != static_cast<size_t>(d)) throw InputError("piece a cols != d");
    }
}

int SystemSpec::piece_index(double s) const {
    // s in [0, T); first interval whose right endpoint exceeds s
    int lo = 0, hi = static_cast<int>(pieces_.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (s < breakpoints_[static_cast<size_t>(mid) + 1]) hi = mid; else lo = mid + 1;
    }
    return lo;
}

void SystemSpec::validate_xt(double t, const Vec& x) const {
    if (!std::isfinite(t)) throw InputError("non-finite time");
    if (x.size() != static_cast<size_t>(d_)) throw InputError("state dimension mismatch");
    for (double v : x) {
        if (!std::isfinite(v)) throw InputError("non-finite state");
        if (v < 0.0) throw InputError("state must be componentwise nonnegative");
    }
}

double SystemSpec::eval_g_i(int i, double s, const Vec& x) const {
    const Piece& p = pieces_[static_cast<size_t>(piece_index(s))];
    double g = p.r[static_cast<size_t>(i)].value(s, omega_);
    for (int j = 0; j < d_; ++j) {
        const TrigPoly& aij = p.a[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (aij.is_constant()) {
            if (aij.c0 != 0.0) g -= aij.c0 * x[static_cast<size_t>(j)];
        } else {
            g -= aij.value(s, omega_) * x[static_cast<size_t>(j)];
        }
    }
    return g;
}

Vec SystemSpec::eval_g(double t, const Vec& x) const {
    validate_xt(t, x);
    const double s = reduce_time(t);
    Vec g(static_cast<size_t>(d_));
    for (int i = 0; i < d_; ++i) g[static_cast<size_t>(i)] = eval_g_i(i, s, x);
    return g;
}

Vec SystemSpec::eval_G(double t, const Vec& x) const {
    validate_xt(t, x);
    const double s = reduce_time(t);
    Vec G(static_cast<size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        const double xi = x[static_cast<size_t>(i)];
        G[static_cast<size_t>(i)] = (xi == 0.0) ? 0.0 : xi * eval_g_i(i, s, x);
    }
    return G;
}

SystemSpec SystemSpec::rescaled(const Vec& xhat) const {
    if (xhat.size() != static_cast<size_t>(d_)) throw InputError("axis fixed point dimension mismatch");
    for (double v : xhat)
        if (!(v > 0.0) || !std::isfinite(v)) throw InputError("axis fixed points must be positive");

    // new g(t, x) = old g(t, diag(xhat) x):  r unchanged, a_ij scaled by xhat_j
    std::vector<Piece> scaled = pieces_;
    for (auto& p : scaled)
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) {
                TrigPoly& aij = p.a[static_cast<size_t>(i)][static_cast<size_t>(j)];
                const double f = xhat[static_cast<size_t>(j)];
                aij.c0 *= f;
                for (auto& c : aij.cos_c) c *= f;
                for (auto& c : aij.sin_c) c *= f;
            }
    std::vector<double> interior(breakpoints_.begin() + 1, breakpoints_.end() - 1);
    SystemSpec out(d_, T_, interior, std::move(scaled), family_, params_);
    out.normalized_ = true;
    return out;
}

SystemSpec normalize(const SystemSpec& spec, const Vec& axis_fixed_points) {
    return spec.rescaled(axis_fixed_points);
}

// ---------------------------------------------------------------- factories

SystemSpec make_lv_smooth(double T, std::vector<TrigPoly> r,
                          std::vector<std::vector<TrigPoly>> a) {
    const int d = static_cast<int>(r.size());
    Piece p{std::move(r), std::move(a)};
    return SystemSpec(d, T, {}, {std::move(p)}, Family::lv_smooth);
}

SystemSpec make_lv_seasonal(double T, const Vec& lambda, double phi, const Vec& r,
                            const std::vector<Vec>& a) {
    const int d = static_cast<int>(lambda.size());
    if (!(phi > 0.0 && phi < 1.0)) throw InputError("phi must lie in (0,1)");
    if (r.size() != lambda.size() || a.size() != lambda.size())
        throw InputError("lv_seasonal parameter dimensions disagree");

    Piece dormant, growth;
    dormant.r.resize(static_cast<size_t>(d));
    dormant.a.assign(static_cast<size_t>(d), std::vector<TrigPoly>(static_cast<size_t>(d)));
    growth.r.resize(static_cast<size_t>(d));
    growth.a.assign(static_cast<size_t>(d), std::vector<TrigPoly>(static_cast<size_t>(d)));
    for (int i = 0; i < d; ++i) {
        dormant.r[static_cast<size_t>(i)] = TrigPoly(-lambda[static_cast<size_t>(i)]);
        growth.r[static_cast<size_t>(i)] = TrigPoly(r[static_cast<size_t>(i)]);
        for (int j = 0; j < d; ++j)
            growth.a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                TrigPoly(a[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    }
    std::map<std::string, double> params{{"phi", phi}};
    return SystemSpec(static_cast<int>(lambda.size()), T, {(1.0 - phi) * T},
                      {std::move(dormant), std::move(growth)}, Family::lv_seasonal, params);
}

SystemSpec make_custom_piecewise(double T, std::vector<double> interior_breakpoints,
                                 std::vector<Piece> pieces) {
    if (pieces.empty()) throw InputError("custom_piecewise needs at least one piece");
    const int d = static_cast<int>(pieces.front().r.size());
    return SystemSpec(d, T, std::move(interior_breakpoints), std::move(pieces),
                      Family::custom_piecewise);
}

SystemSpec make_decoupled_logistic(int d, double T) {
    std::vector<TrigPoly> r(static_cast<size_t>(d), TrigPoly(1.0));
    std::vector<std::vector<TrigPoly>> a(static_cast<size_t>(d),
                                         std::vector<TrigPoly>(static_cast<size_t>(d)));
    for (int i = 0; i < d; ++i) a[static_cast<size_t>(i)][static_cast<size_t>(i)] = TrigPoly(1.0);
    return make_lv_smooth(T, std::move(r), std::move(a));
}

SystemSpec make_lv_constant(double T, const Vec& r, const std::vector<Vec>& a) {
    const int d = static_cast<int>(r.size());
    std::vector<TrigPoly> rp(static_cast<size_t>(d));
    std::vector<std::vector<TrigPoly>> ap(static_cast<size_t>(d),
                                          std::vector<TrigPoly>(static_cast<size_t>(d)));
    for (int i = 0; i < d; ++i) {
        rp[static_cast<size_t>(i)] = TrigPoly(r[static_cast<size_t>(i)]);
        for (int j = 0; j < d; ++j)
            ap[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                TrigPoly(a[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    }
    return make_lv_smooth(T, std::move(rp), std::move(ap));
}

// ---------------------------------------------------------------- JSON schema

namespace {

TrigPoly trigpoly_from_json(const json& j) {
    TrigPoly p;
    if (j.is_number()) {
        p.c0 = j.get<double>();
        return p;
    }
    if (!j.is_object()) throw InputError("coefficient must be a number or an object");
    p.c0 = j.value("const", 0.0);
    if (j.contains("cos")) p.cos_c = j.at("cos").get<std::vector<double>>();
    if (j.contains("sin")) p.sin_c = j.at("sin").get<std::vector<double>>();
    return p;
}

json trigpoly_to_json(const TrigPoly& p) {
    if (p.is_constant()) return json(p.c0);
    json j;
    j["const"] = p.c0;
    if (!p.cos_c.empty()) j["cos"] = p.cos_c;
    if (!p.sin_c.empty()) j["sin"] = p.sin_c;
    return j;
}

Piece piece_from_json(const json& j, int d) {
    Piece p;
    const json& jr = j.at("r");
    const json& ja = j.at("a");
    if (static_cast<int>(jr.size()) != d || static_cast<int>(ja.size()) != d)
        throw InputError("piece coefficient dimensions must equal d");
    for (const auto& e : jr) p.r.push_back(trigpoly_from_json(e));
    for (const auto& row : ja) {
        if (static_cast<int>(row.size()) != d) throw InputError("piece 'a' must be d x d");
        std::vector<TrigPoly> prow;
        for (const auto& e : row) prow.push_back(trigpoly_from_json(e));
        p.a.push_back(std::move(prow));
    }
    return p;
}

}  // namespace

SystemSpec load_system_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed spec JSON: ") + e.what());
    }
    try {
        const int d = j.at("d").get<int>();
        const double T = j.at("T").get<double>();
        const std::string fam = j.at("family").get<std::string>();
        const json& params = j.at("params");

        if (fam == "lv_smooth") {
            std::vector<TrigPoly> r;
            std::vector<std::vector<TrigPoly>> a;
            for (const auto& e : params.at("r")) r.push_back(trigpoly_from_json(e));
            for (const auto& row : params.at("a")) {
                std::vector<TrigPoly> prow;
                for (const auto& e : row) prow.push_back(trigpoly_from_json(e));
                a.push_back(std::move(prow));
            }
            if (static_cast<int>(r.size()) != d) throw InputError("r size != d");
            return make_lv_smooth(T, std::move(r), std::move(a));
        }
        if (fam == "lv_seasonal") {
            const Vec lambda = params.at("lambda").get<Vec>();
            const double phi = params.at("phi").get<double>();
            const Vec r = params.at("r").get<Vec>();
            const std::vector<Vec> a = params.at("a").get<std::vector<Vec>>();
            if (static_cast<int>(lambda.size()) != d) throw InputError("lambda size != d");
            return make_lv_seasonal(T, lambda, phi, r, a);
        }
        if (fam == "custom_piecewise") {
            std::vector<double> interior;
            if (params.contains("breakpoints"))
                interior = params.at("breakpoints").get<std::vector<double>>();
            std::vector<Piece> pieces;
            for (const auto& e : params.at("pieces")) pieces.push_back(piece_from_json(e, d));
            return make_custom_piecewise(T, std::move(interior), std::move(pieces));
        }
        throw InputError("unknown family: " + fam);
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid spec JSON: ") + e.what());
    }
}

SystemSpec load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_system_json(ss.str());
}

std::string system_to_json(const SystemSpec& spec) {
    json j;
    j["d"] = spec.dim();
    j["T"] = spec.period();
    json params;
    if (spec.family() == Family::lv_seasonal && spec.pieces().size() == 2 && !spec.normalized()) {
        j["family"] = "lv_seasonal";
        const Piece& dormant = spec.pieces()[0];
        const Piece& growth = spec.pieces()[1];
        Vec lambda, r;
        std::vector<Vec> a;
        for (int i = 0; i < spec.dim(); ++i) {
            lambda.push_back(-dormant.r[static_cast<size_t>(i)].c0);
            r.push_back(growth.r[static_cast<size_t>(i)].c0);
            Vec row;
            for (int k = 0; k < spec.dim(); ++k)
                row.push_back(growth.a[static_cast<size_t>(i)][static_cast<size_t>(k)].c0);
            a.push_back(row);
        }
        params["lambda"] = lambda;
        params["phi"] = spec.params().at("phi");
        params["r"] = r;
        params["a"] = a;
    } else if (spec.family() == Family::lv_smooth && !spec.normalized()) {
        j["family"] = "lv_smooth";
        json r = json::array(), a = json::array();
        const Piece& p = spec.pieces().front();
        for (const auto& e : p.r) r.push_back(trigpoly_to_json(e));
        for (const auto& row : p.a) {
            json jrow = json::array();
            for (const auto& e : row) jrow.push_back(trigpoly_to_json(e));
            a.push_back(jrow);
        }
        params["r"] = r;
        params["a"] = a;
    } else {
        // normalization rescales coefficients piecewise, so emit the lowered form
        j["family"] = "custom_piecewise";
        std::vector<double> interior(spec.breakpoints().begin() + 1, spec.breakpoints().end() - 1);
        params["breakpoints"] = interior;
        json pieces = json::array();
        for (const auto& p : spec.pieces()) {
            json jp;
            json r = json::array(), a = json::array();
            for (const auto& e : p.r) r.push_back(trigpoly_to_json(e));
            for (const auto& row : p.a) {
                json jrow = json::array();
                for (const auto& e : row) jrow.push_back(trigpoly_to_json(e));
                a.push_back(jrow);
            }
            jp["r"] = r;
            jp["a"] = a;
            pieces.push_back(jp);
        }
        params["pieces"] = pieces;
    }
    j["params"] = params;
    j["normalized"] = spec.normalized();
    return j.dump(2);
}

}  // namespace csimplex
