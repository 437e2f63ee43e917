#include "lkt/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace lkt::cli {

using report::Json;
namespace fs = std::filesystem;

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ------------------------------------------------------------------ beta pair fixture

Json betaPairJson(const BetaPair& p) {
    Json members = Json::array();
    for (const LambdaModule* M : {&p.first, &p.second}) {
        Json beta = Json::object();
        for (int j = 0; j < 2; ++j) {
            Json per = Json::object();
            for (auto& [n, f] : M->beta[j]) per[std::to_string(n)] = report::matrixJson(f.mat);
            beta[std::to_string(j)] = per;
        }
        Json pieces = Json::object();
        for (std::size_t q = 0; q < M->pieceCount(); ++q) pieces[M->pieceName(q)] = groupToSyntax(M->pieces[q]);
        members.push_back(Json{{"pieces", pieces}, {"beta", beta}});
    }
    return Json{{"schema", "lkt-beta-pair/1"},
                {"G0", groupToSyntax(p.G0)},
                {"G1", groupToSyntax(p.G1)},
                {"coefficients", p.N.moduli},
                {"tried", p.tried},
                {"members", members}};
}

LambdaModule betaPairMember(const Json& j, int which) {
    CoefficientSet N(j.at("coefficients").get<std::vector<long>>());
    LambdaModule M = standardLambdaModule(parseGroup(j.at("G0").get<std::string>()),
                                          parseGroup(j.at("G1").get<std::string>()), N);
    const Json& m = j.at("members").at(which);
    for (std::size_t q = 0; q < M.pieceCount(); ++q)
        if (!M.pieces[q].sameType(parseGroup(m.at("pieces").at(M.pieceName(q)).get<std::string>())))
            throw std::invalid_argument("stored piece " + M.pieceName(q) + " differs from the standard one");
    for (int jj = 0; jj < 2; ++jj)
        for (auto& [n, f] : M.beta[jj]) {
            const Json& rows = m.at("beta").at(std::to_string(jj)).at(std::to_string(n));
            IntegerMatrix mat(f.mat.rows, f.mat.cols);
            if (rows.size() != mat.rows) throw std::invalid_argument("stored beta has the wrong shape");
            for (std::size_t r = 0; r < mat.rows; ++r) {
                if (rows[r].size() != mat.cols) throw std::invalid_argument("stored beta has the wrong shape");
                for (std::size_t c = 0; c < mat.cols; ++c) mat(r, c) = rows[r][c].get<long>();
            }
            f = AbHom(f.src, f.dst, mat);
        }
    return M;
}

// ------------------------------------------------------------------ sources

namespace {

struct Source {
    std::string path, label;
    std::unique_ptr<dsl::Evaluator> eval;
};

struct InputError : std::runtime_error {
    Json detail;
    InputError(const std::string& msg, Json d) : std::runtime_error(msg), detail(std::move(d)) {}
};

Json dslErrorJson(const dsl::DslError& e, const std::string& file) {
    Json o{{"code", dsl::codeName(e.code)}, {"file", file}, {"line", e.pos.line}, {"column", e.pos.col}, {"message", e.what()}};
    if (!e.expected.empty()) o["expected"] = e.expected;
    return o;
}

class Workspace {
public:
    Workspace(const std::vector<std::string>& files, const CoefficientSet& N) {
        for (auto& f : files) {
            Source s;
            s.path = f;
            s.label = fs::path(f).filename().string();
            std::string text;
            try {
                text = readFile(f);
            } catch (const std::exception& e) {
                throw InputError(e.what(), Json{{"code", "io"}, {"file", s.label}, {"message", e.what()}});
            }
            try {
                s.eval = std::make_unique<dsl::Evaluator>(dsl::parse(text), N);
            } catch (const dsl::DslError& e) {
                throw InputError(e.what(), dslErrorJson(e, s.label));
            }
            sources.push_back(std::move(s));
        }
    }

    struct Named {
        Source* src;
        const dsl::Evaluated* value;
    };

    // a file named after the value wins, then the first file defining it
    Named get(const std::string& name) {
        for (auto& s : sources)
            if (fs::path(s.label).stem() == name && s.eval->defines(name)) return {&s, &eval(s, name)};
        for (auto& s : sources)
            if (s.eval->defines(name)) return {&s, &eval(s, name)};
        throw InputError("undefined name " + name, Json{{"code", "reference"}, {"message", "undefined name " + name}});
    }

    const dsl::Evaluated& eval(Source& s, const std::string& name) {
        try {
            return s.eval->get(name);
        } catch (const dsl::DslError& e) {
            throw InputError(e.what(), dslErrorJson(e, s.label));
        }
    }

    std::vector<Source> sources;
};

std::vector<std::string> corpusFiles(const std::string& dir) {
    std::vector<std::string> out;
    if (dir.empty() || !fs::is_directory(dir)) return out;
    for (auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".lkt") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

bool isLkt(const std::string& a) { return a.size() > 4 && a.substr(a.size() - 4) == ".lkt"; }

// ------------------------------------------------------------------ commands

struct Ctx {
    const RunOptions& opt;
    RunResult& res;
    Workspace& ws;
    std::optional<CompareMode> mode;

    void raise(int code) { res.exitCode = std::max(res.exitCode, code); }
};

Json validateOne(Ctx& c, const std::string& name) {
    auto n = c.ws.get(name);
    const auto& X = n.value->module;
    c.res.doc.notePresets(X.presets);
    auto r = validateLatticedKModule(X);
    Json fails = Json::array();
    for (auto& ch : r.checks)
        if (!ch.ok) fails.push_back(ch.detail.empty() ? ch.name : ch.name + " (" + ch.detail + ")");
    if (!r.ok()) c.raise(kDistinct);
    Json o{{"result", "validate"}, {"name", name}, {"file", n.src->label}, {"valid", r.ok()},
           {"checks", r.checks.size()}, {"failures", fails}};
    if (n.value->extension) {
        auto m = canonicalMorphisms(*n.value->extension);
        const auto& e = *n.value->extension;
        auto ex = checkVExactness(e.B, e.E, e.A, m.iota, m.pi);
        o["canonical_sequence_exact"] = ex.ok();
        if (!ex.ok()) c.raise(kDistinct);
    }
    return o;
}

Json computeOne(Ctx& c, const std::string& name) {
    auto n = c.ws.get(name);
    const auto& X = n.value->module;
    c.res.doc.notePresets(X.presets);
    Json o{{"result", "compute"}, {"name", name}, {"file", n.src->label}};
    o["valid"] = validateLatticedKModule(X).ok();
    o["invariant"] = report::moduleJson(X);
    o["ideal_count"] = idealsOfLatticed(X).size();
    o["grothendieck"] = report::recoveryJson(grothendieckRecover(X));
    o["infinite"] = report::detectionJson(detectInfinite(X));
    o["cancellation"] = report::detectionJson(detectCancellation(X));
    return o;
}

Json compareOne(Ctx& c, const std::string& a, const std::string& b, CompareMode mode) {
    auto na = c.ws.get(a);
    auto nb = c.ws.get(b);
    const auto& X = na.value->module;
    const auto& Y = nb.value->module;
    c.res.doc.notePresets(X.presets);
    c.res.doc.notePresets(Y.presets);
    auto r = isoSearchLatticed(X, Y, mode, c.opt.search);
    Json o{{"result", "compare"}, {"first", a}, {"second", b}, {"mode", modeName(mode)}};
    switch (r.outcome) {
        case SearchOutcome::Found: o["verdict"] = "isomorphic"; break;
        case SearchOutcome::Absent: o["verdict"] = "distinguishable"; break;
        default: o["verdict"] = "budget exceeded";
    }
    if (!r.reason.empty()) o["reason"] = r.reason;
    o["search_complete"] = r.complete;
    o["nodes"] = r.nodes;
    if (r.outcome == SearchOutcome::Found) {
        bool scaled = mode == CompareMode::Latticed, lambda = mode != CompareMode::Graded;
        auto fw = checkVMorphism(X, Y, *r.witness, scaled, lambda);
        auto bw = checkVMorphism(Y, X, inverseV(X, Y, *r.witness), scaled, lambda);
        o["certified_forward"] = fw.ok();
        o["certified_backward"] = bw.ok();
        o["witness"] = report::witnessJson(X, Y, *r.witness);
        if (!fw.ok() || !bw.ok()) c.raise(kDistinct);
    } else if (r.outcome == SearchOutcome::Absent) {
        c.raise(kDistinct);
    } else {
        c.raise(kBudget);
    }
    return o;
}

Json oracleOne(Ctx& c, const std::string& name) {
    auto n = c.ws.get(name);
    const auto& X = n.value->module;
    c.res.doc.notePresets(X.presets);
    bool finite = X.allFinite();
    auto F = finitizeV(X, finite ? 0 : c.opt.cap);
    auto G = grothendieckFinite(F.monoid).group;
    const auto& top = X.K0(X.lattice.top);
    FgAbGroup expected = F.modulus == 0 ? top : tensorZn(top, F.modulus).group;
    bool grOk = G.sameType(expected);
    auto rec = grothendieckRecover(X);
    bool recOk = rec.fiber.pieces[0].sameType(top);
    Json o{{"result", "oracle"}, {"name", name}, {"file", n.src->label}};
    o["finitized_elements"] = F.monoid.size();
    if (F.modulus) o["modulus"] = F.modulus;
    o["gr_from_finite_monoid"] = groupToSyntax(G);
    o["gr_from_invariant"] = groupToSyntax(F.modulus == 0 ? rec.fiber.pieces[0] : tensorZn(rec.fiber.pieces[0], F.modulus).group);
    o["k0_of_top"] = groupToSyntax(top);
    o["grothendieck_agrees"] = grOk && recOk;
    bool ok = grOk && recOk;
    if (F.modulus == 0) {
        auto ideals = idealsOf(F.monoid).size();
        o["ideals_from_finite_monoid"] = ideals;
        o["ideals_from_invariant"] = idealsOfLatticed(X).size();
        o["lattice_size"] = X.lattice.size();
        bool idOk = ideals == X.lattice.size() && idealsOfLatticed(X).size() == X.lattice.size();
        o["ideals_agree"] = idOk;
        ok = ok && idOk;
        o["cancellation_agrees"] = hasCancellation(F.monoid) == detectCancellation(X).verdict;
        o["infinite_agrees"] = hasInfiniteElement(F.monoid) == detectInfinite(X).verdict;
        ok = ok && o["cancellation_agrees"].get<bool>() && o["infinite_agrees"].get<bool>();
    }
    if (!ok) c.raise(kDistinct);
    return o;
}

// names given on the command line, or the matching directives of the given files
std::vector<const dsl::Stmt*> directives(Workspace& ws, dsl::Stmt::Kind k) {
    std::vector<const dsl::Stmt*> out;
    for (auto& s : ws.sources)
        for (auto& st : s.eval->program().stmts)
            if (st.kind == k) out.push_back(&st);
    return out;
}

void corpusSuite(Ctx& c) {
    auto& doc = c.res.doc;
    std::string dir = c.opt.corpusDir;
    Json files = Json::array();
    bool ok = true;
    for (auto& s : c.ws.sources) {
        const auto& prog = s.eval->program();
        Json f{{"file", s.label}};
        bool rt = false;
        try {
            rt = dsl::parse(dsl::serialize(prog)) == prog;
        } catch (const dsl::DslError&) {
        }
        f["round_trip"] = rt;
        ok = ok && rt;
        Json models = Json::array();
        for (auto& name : s.eval->names()) {
            const auto& X = c.ws.eval(s, name).module;
            doc.notePresets(X.presets);
            Json m{{"name", name}, {"valid", validateLatticedKModule(X).ok()}};
            ok = ok && m["valid"].get<bool>();
            auto t = transport(X, c.opt.seed);
            auto r = isoSearchLatticed(X, t.copy, CompareMode::Latticed, c.opt.search);
            bool agree = detectInfinite(X).verdict == detectInfinite(t.copy).verdict &&
                         detectCancellation(X).verdict == detectCancellation(t.copy).verdict;
            m["transported_copy_found"] = r.outcome == SearchOutcome::Found;
            m["transported_verdicts_agree"] = agree;
            if (r.outcome == SearchOutcome::BudgetExceeded) c.raise(kBudget);
            ok = ok && r.outcome == SearchOutcome::Found && agree;
            models.push_back(m);
        }
        f["models"] = models;
        files.push_back(f);
    }
    doc.results.push_back(Json{{"result", "corpus"}, {"seed", c.opt.seed}, {"files", files}});

    // expected verdicts of the shipped compare directives
    std::string expPath = (fs::path(dir) / "expectations.json").string();
    if (fs::exists(expPath)) {
        Json exp = Json::parse(readFile(expPath));
        Json rows = Json::array();
        for (auto& e : exp.at("compare")) {
            Json row = compareOne(c, e.at("first"), e.at("second"), parseMode(e.at("mode")));
            bool match = row["verdict"] == e.at("verdict") && (!e.contains("reason") || row["reason"] == e["reason"]);
            rows.push_back(Json{{"first", e["first"]},
                                {"second", e["second"]},
                                {"mode", e["mode"]},
                                {"verdict", row["verdict"]},
                                {"expected", e["verdict"]},
                                {"matches", match}});
            ok = ok && match;
        }
        // compareOne raises the exit code for distinguishable pairs; the suite only cares about matches
        if (c.res.exitCode == kDistinct) c.res.exitCode = kOk;
        doc.results.push_back(Json{{"result", "expected comparisons"}, {"rows", rows}});
    }

    std::string pairPath = (fs::path(dir) / "beta-variant-pair.json").string();
    if (fs::exists(pairPath)) {
        Json pj = Json::parse(readFile(pairPath));
        auto A = betaPairMember(pj, 0), B = betaPairMember(pj, 1);
        auto g = gradedIsoSearch(A, B, c.opt.search);
        auto l = lambdaIsoSearch(A, B, c.opt.search);
        bool vA = validateLambdaModule(A).ok(), vB = validateLambdaModule(B).ok();
        bool match = vA && vB && g.outcome == SearchOutcome::Found && l.outcome == SearchOutcome::Absent;
        if (g.outcome == SearchOutcome::BudgetExceeded || l.outcome == SearchOutcome::BudgetExceeded) c.raise(kBudget);
        doc.results.push_back(Json{{"result", "beta variant pair"},
                                   {"groups", pj["G0"].get<std::string>() + " | " + pj["G1"].get<std::string>()},
                                   {"both_valid", vA && vB},
                                   {"graded", outcomeName(g.outcome)},
                                   {"lambda", outcomeName(l.outcome)},
                                   {"matches", match}});
        ok = ok && match;
    }
    if (!ok) c.raise(kDistinct);
}

}  // namespace

RunResult run(const RunOptions& opt) {
    RunResult res;
    auto& doc = res.doc;
    std::vector<std::string> files, names;
    std::optional<CompareMode> mode = opt.mode;
    Json cmd{{"command", opt.command}};
    try {
        for (std::size_t i = 0; i < opt.args.size(); ++i) {
            const auto& a = opt.args[i];
            if (a == "mode" && i + 1 < opt.args.size()) {
                mode = parseMode(opt.args[++i]);
            } else if (isLkt(a)) {
                files.push_back(a);
            } else {
                names.push_back(a);
            }
        }
    } catch (const std::exception& e) {
        doc.command = cmd;
        doc.results.push_back(Json{{"error", Json{{"code", "usage"}, {"message", e.what()}}}});
        res.exitCode = kInputError;
        return res;
    }
    Json fl = Json::array();
    for (auto& f : files) fl.push_back(fs::path(f).filename().string());
    cmd["files"] = fl;
    cmd["names"] = names;
    if (mode) cmd["mode"] = modeName(*mode);
    cmd["coefficients"] = opt.N.moduli;
    cmd["budget"] = opt.search.budget;
    if (opt.command == "oracle") cmd["cap"] = opt.cap;
    if (opt.command == "corpus") cmd["seed"] = opt.seed;
    doc.command = cmd;

    const std::vector<std::string> known{"validate", "compute", "compare", "oracle", "corpus"};
    if (std::find(known.begin(), known.end(), opt.command) == known.end()) {
        doc.results.push_back(Json{{"error", Json{{"code", "usage"}, {"message", "unknown command " + opt.command}}}});
        res.exitCode = kInputError;
        return res;
    }
    if (files.empty() || opt.command == "corpus") {
        auto cf = corpusFiles(opt.corpusDir);
        if (opt.command == "corpus" && !files.empty()) cf = files;
        files = cf;
    }
    try {
        Workspace ws(files, opt.N);
        Ctx c{opt, res, ws, mode};
        if (opt.command == "corpus") {
            corpusSuite(c);
        } else if (opt.command == "compare") {
            if (!names.empty()) {
                if (names.size() != 2) throw InputError("compare needs two names", Json{{"code", "usage"}, {"message", "compare needs two names"}});
                doc.results.push_back(compareOne(c, names[0], names[1], mode.value_or(CompareMode::Latticed)));
            } else {
                for (auto* st : directives(ws, dsl::Stmt::Kind::Compare))
                    doc.results.push_back(compareOne(c, st->name, st->other, mode.value_or(st->mode)));
            }
        } else {
            if (names.empty()) {
                auto k = opt.command == "compute" ? dsl::Stmt::Kind::Report : dsl::Stmt::Kind::Check;
                for (auto* st : directives(ws, k)) names.push_back(st->name);
                if (names.empty())
                    for (auto& s : ws.sources)
                        for (auto& n : s.eval->names()) names.push_back(n);
            }
            for (auto& n : names) {
                if (opt.command == "validate") doc.results.push_back(validateOne(c, n));
                if (opt.command == "compute") doc.results.push_back(computeOne(c, n));
                if (opt.command == "oracle") doc.results.push_back(oracleOne(c, n));
            }
        }
        if (doc.results.empty()) throw InputError("nothing to do", Json{{"code", "usage"}, {"message", "no names or directives given"}});
    } catch (const InputError& e) {
        doc.results.push_back(Json{{"error", e.detail}});
        res.exitCode = kInputError;
    } catch (const BudgetExceeded& e) {
        doc.results.push_back(Json{{"error", Json{{"code", "budget"}, {"message", e.what()}}}});
        res.exitCode = kBudget;
    } catch (const std::invalid_argument& e) {
        doc.results.push_back(Json{{"error", Json{{"code", "type"}, {"message", e.what()}}}});
        res.exitCode = kInputError;
    }
    return res;
}

}  // namespace lkt::cli
