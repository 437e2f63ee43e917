#include "lkt/report.hpp"

#include <algorithm>
#include <ctime>
#include <sstream>

namespace lkt::report {

Json intJson(const Int& x) {
    if (x.fits_slong_p()) return x.get_si();
    return x.get_str();
}

Json vecJson(const Vec& v) {
    Json a = Json::array();
    for (auto& x : v) a.push_back(intJson(x));
    return a;
}

Json matrixJson(const IntegerMatrix& m) {
    Json a = Json::array();
    for (std::size_t i = 0; i < m.rows; ++i) a.push_back(vecJson(m.row(i)));
    return a;
}

Json checksJson(const Report& r) {
    Json a = Json::array();
    for (auto& c : r.checks) {
        Json o{{"check", c.name}, {"ok", c.ok}};
        if (!c.detail.empty()) o["detail"] = c.detail;
        a.push_back(o);
    }
    return a;
}

Json latticeJson(const FiniteLattice& L) {
    Json covers = Json::array();
    for (std::size_t a = 0; a < L.size(); ++a)
        for (std::size_t b = 0; b < L.size(); ++b)
            if (L.covers(a, b)) covers.push_back(Json::array({L.names[a], L.names[b]}));
    return Json{{"ideals", L.names}, {"bottom", L.names[L.bottom]}, {"top", L.names[L.top]}, {"covers", covers}};
}

Json moduleJson(const LatticedKModule& X) {
    Json fibers = Json::object();
    for (std::size_t i = 0; i < X.lattice.size(); ++i) {
        const auto& F = X.fibers[i];
        Json pieces = Json::object();
        for (std::size_t p = 0; p < F.pieceCount(); ++p) pieces[F.pieceName(p)] = groupToSyntax(F.pieces[p]);
        Json o{{"pieces", pieces}, {"layer", X.layers[i].str()}};
        if (X.infiniteAllowed[i]) o["layer_holds_zero_class"] = true;
        fibers[X.lattice.names[i]] = o;
    }
    Json scale{{"kind", X.scale.kind == Scale::Kind::None   ? "none"
                        : X.scale.kind == Scale::Kind::Unit ? "unit"
                                                            : "generators"}};
    Json gens = Json::array();
    for (auto& g : X.scale.gens) gens.push_back(vElemStr(X, g));
    if (!gens.empty()) scale["elements"] = gens;
    return Json{{"coefficients", X.N.moduli}, {"lattice", latticeJson(X.lattice)}, {"fibers", fibers}, {"scale", scale}};
}

Json recoveryJson(const GrRecovery& g) {
    Json pieces = Json::object();
    for (std::size_t p = 0; p < g.fiber.pieceCount(); ++p) pieces[g.fiber.pieceName(p)] = groupToSyntax(g.fiber.pieces[p]);
    Json scale = Json::array();
    for (auto& v : g.scaleImage) scale.push_back(vecJson(v));
    return Json{{"fiber", pieces},
                {"positive_cone", g.positiveCone.str()},
                {"scale_image", scale},
                {"scale_image_cut_at_bound", g.scaleBounded},
                {"generates_top", g.generatesTop}};
}

Json detectionJson(const Detection& d) {
    Json o{{"verdict", d.verdict}, {"exact", d.exact}};
    if (!d.witness.empty()) o["witness"] = d.witness;
    if (!d.quotientInfinite.empty()) {
        Json q = Json::object();
        for (auto& [name, inf] : d.quotientInfinite) q[name] = inf;
        o["quotient_infinite"] = q;
    }
    return o;
}

Json witnessJson(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f) {
    Json lm = Json::object();
    Json maps = Json::object();
    for (std::size_t i = 0; i < X.lattice.size(); ++i) {
        lm[X.lattice.names[i]] = Y.lattice.names[f.latticeMap[i]];
        Json per = Json::object();
        const auto& F = X.fibers[i];
        for (std::size_t p = 0; p < F.pieceCount(); ++p) {
            const auto& m = f.fiberMaps[i].comp[p].mat;
            if (m.rows == 0 || m.cols == 0) continue;
            per[F.pieceName(p)] = matrixJson(m);
        }
        maps[X.lattice.names[i]] = per;
    }
    return Json{{"lattice_map", lm}, {"fiber_matrices", maps}};
}

void Document::notePresets(const std::vector<std::string>& ps) {
    for (auto& p : ps)
        if (std::find(presets.begin(), presets.end(), p) == presets.end()) presets.push_back(p);
}

Json Document::toJson(const std::string& generated) const {
    Json o{{"schema", kSchema}, {"generated", generated}, {"command", command}, {"presets", presets}};
    if (!warnings.empty()) o["warnings"] = warnings;
    o["results"] = results;
    return o;
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string renderJson(const Document& d, const std::string& generated) { return d.toJson(generated).dump(2) + "\n"; }

namespace {

std::string scalarText(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    return v.dump();
}

bool flat(const Json& v) {
    if (!v.is_array()) return !v.is_object();
    return std::all_of(v.begin(), v.end(), [](const Json& x) { return !x.is_object(); });
}

void render(std::ostringstream& os, const Json& v, int indent) {
    std::string pad(indent, ' ');
    if (v.is_object()) {
        std::size_t w = 0;
        for (auto& [k, x] : v.items()) w = std::max(w, k.size());
        for (auto& [k, x] : v.items()) {
            if (flat(x)) {
                os << pad << k << std::string(w - k.size(), ' ') << "  " << (x.is_array() ? x.dump() : scalarText(x)) << "\n";
            } else {
                os << pad << k << "\n";
                render(os, x, indent + 2);
            }
        }
    } else if (v.is_array()) {
        for (auto& x : v) {
            if (x.is_object() && x.contains("check") && x.contains("ok")) {
                os << pad << (x["ok"].get<bool>() ? "ok    " : "FAIL  ") << x["check"].get<std::string>();
                if (x.contains("detail")) os << "  (" << x["detail"].get<std::string>() << ")";
                os << "\n";
            } else if (x.is_object()) {
                render(os, x, indent);
                os << "\n";
            } else {
                os << pad << "- " << scalarText(x) << "\n";
            }
        }
    } else {
        os << pad << scalarText(v) << "\n";
    }
}

}  // namespace

std::string renderText(const Document& d, const std::string& generated) {
    std::ostringstream os;
    Json head{{"schema", kSchema}, {"generated", generated}, {"command", d.command.dump()}};
    render(os, head, 0);
    if (!d.presets.empty()) {
        os << "presets\n";
        for (auto& p : d.presets) os << "  - " << p << "\n";
    }
    for (auto& w : d.warnings) os << "warning: " << w << "\n";
    os << "\n";
    for (auto& r : d.results) {
        render(os, r, 0);
        os << "\n";
    }
    return os.str();
}

}  // namespace lkt::report
