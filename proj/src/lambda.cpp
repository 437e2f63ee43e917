#include "lkt/lambda.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "lkt/smallsearch.hpp"

namespace lkt {

// ---------------------------------------------------------------- coefficient sets

CoefficientSet::CoefficientSet(std::vector<long> ms) : moduli(std::move(ms)) {
    std::sort(moduli.begin(), moduli.end());
    moduli.erase(std::unique(moduli.begin(), moduli.end()), moduli.end());
    for (long n : moduli)
        if (n < 2) throw std::invalid_argument("coefficient moduli must be >= 2");
}

CoefficientSet CoefficientSet::parse(const std::string& csv) {
    std::vector<long> ms;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        long v = std::stol(tok, &used);
        if (tok.find_first_not_of(" \t", used) != std::string::npos)
            throw std::invalid_argument("bad coefficient modulus '" + tok + "'");
        ms.push_back(v);
    }
    CoefficientSet c(ms);
    if (c.moduli.empty()) throw std::invalid_argument("empty coefficient set");
    if (!c.divisorClosed()) throw std::invalid_argument("coefficient set " + c.str() + " is not divisor-closed");
    return c;
}

bool CoefficientSet::contains(long n) const { return std::binary_search(moduli.begin(), moduli.end(), n); }

bool CoefficientSet::divisorClosed() const {
    for (long n : moduli)
        for (long d = 2; d < n; ++d)
            if (n % d == 0 && !contains(d)) return false;
    return true;
}

std::vector<std::pair<long, long>> CoefficientSet::pairs() const {
    std::vector<std::pair<long, long>> out;
    for (long m : moduli)
        for (long n : moduli)
            if (contains(m * n)) out.push_back({m, n});
    return out;
}

std::string CoefficientSet::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < moduli.size(); ++i) os << (i ? "," : "") << moduli[i];
    return os.str();
}

// ---------------------------------------------------------------- modules

int LambdaModule::index(int j, long n) const {
    if (n == 0) return j;
    auto it = std::lower_bound(N.moduli.begin(), N.moduli.end(), n);
    if (it == N.moduli.end() || *it != n) throw std::out_of_range("modulus " + std::to_string(n) + " not in coefficient set");
    return 2 + 2 * int(it - N.moduli.begin()) + j;
}

std::string LambdaModule::pieceName(std::size_t p) const {
    if (p < 2) return "G" + std::to_string(p);
    long n = N.moduli[(p - 2) / 2];
    return "G" + std::to_string((p - 2) % 2) + "," + std::to_string(n);
}

bool LambdaModule::allFinite() const {
    return std::all_of(pieces.begin(), pieces.end(), [](const FgAbGroup& g) { return g.isFinite(); });
}

AbHom LambdaModule::betaMN(int j, long m, long n) const { return compose(rho[1 - j].at(m), beta[j].at(n)); }

std::vector<LambdaModule::MapRef> LambdaModule::structureMaps() const {
    std::vector<MapRef> out;
    for (int j = 0; j < 2; ++j) {
        for (auto& [n, f] : rho[j])
            out.push_back({"rho" + std::to_string(j) + "_" + std::to_string(n), j, index(j, n), &f});
        for (auto& [n, f] : beta[j])
            out.push_back({"beta" + std::to_string(j) + "_" + std::to_string(n), index(j, n), 1 - j, &f});
        for (auto& [mn, f] : kappaUp[j]) {
            auto [m, n] = mn;
            out.push_back({"kappa" + std::to_string(j) + "_" + std::to_string(m * n) + "," + std::to_string(m), index(j, m),
                           index(j, m * n), &f});
        }
        for (auto& [mn, f] : kappaDown[j]) {
            auto [m, n] = mn;
            out.push_back({"kappa" + std::to_string(j) + "_" + std::to_string(n) + "," + std::to_string(m * n),
                           index(j, m * n), index(j, n), &f});
        }
    }
    return out;
}

LambdaModule zeroLambdaModule(const CoefficientSet& N) {
    FgAbGroup z = canonicalGroup(0, {});
    return standardLambdaModule(z, z, N);
}

namespace {

// Coordinates of the split carrier G_{j,n} = (G_j (x) Z_n) + Tor(G_{1-j}, Z_n):
// one tensor coordinate per generator of G_j, one Tor coordinate per torsion generator of G_{1-j}.
struct SplitPiece {
    FgAbGroup group;
    std::vector<Int> tensorOrd, torOrd;
    std::size_t comps() const { return tensorOrd.size() + torOrd.size(); }
};

SplitPiece splitPiece(const FgAbGroup& Gj, const FgAbGroup& Gk, long n) {
    SplitPiece sp;
    Int nn(n);
    for (std::size_t i = 0; i < Gj.ngens(); ++i) sp.tensorOrd.push_back(i < Gj.rank ? nn : Int(gcd(Gj.order(i), nn)));
    for (auto& d : Gk.torsion) sp.torOrd.push_back(gcd(d, nn));
    std::vector<Int> all = sp.tensorOrd;
    all.insert(all.end(), sp.torOrd.begin(), sp.torOrd.end());
    sp.group = groupFromOrders(all);
    return sp;
}

AbHom fromComps(const FgAbGroup& src, const FgAbGroup& dst, const IntegerMatrix& compMat, bool srcSplit, bool dstSplit) {
    IntegerMatrix m = compMat;
    if (dstSplit) m = dst.toCanon * m;
    if (srcSplit) m = m * src.fromCanon;
    return AbHom(src, dst, m);
}

struct StdLayout {
    std::map<long, SplitPiece> sp[2];
};

StdLayout layoutOf(const FgAbGroup& G0, const FgAbGroup& G1, const CoefficientSet& N) {
    StdLayout L;
    for (long n : N.moduli) {
        L.sp[0][n] = splitPiece(G0, G1, n);
        L.sp[1][n] = splitPiece(G1, G0, n);
    }
    return L;
}

}  // namespace

LambdaModule standardLambdaModule(const FgAbGroup& G0in, const FgAbGroup& G1in, const CoefficientSet& N) {
    if (!N.divisorClosed()) throw std::invalid_argument("coefficient set is not divisor-closed");
    FgAbGroup G[2] = {canonicalGroup(G0in.rank, G0in.torsion), canonicalGroup(G1in.rank, G1in.torsion)};
    StdLayout L = layoutOf(G[0], G[1], N);
    LambdaModule M;
    M.N = N;
    M.pieces = {G[0], G[1]};
    for (long n : N.moduli) {
        M.pieces.push_back(L.sp[0][n].group);
        M.pieces.push_back(L.sp[1][n].group);
    }
    for (int j = 0; j < 2; ++j) {
        const FgAbGroup& Gj = G[j];
        const FgAbGroup& Gk = G[1 - j];
        for (long n : N.moduli) {
            const SplitPiece& sp = L.sp[j][n];
            IntegerMatrix r(sp.comps(), Gj.ngens());
            for (std::size_t i = 0; i < Gj.ngens(); ++i) r(i, i) = 1;
            M.rho[j].emplace(n, fromComps(Gj, sp.group, r, false, true));

            IntegerMatrix b(Gk.ngens(), sp.comps());
            for (std::size_t i = 0; i < sp.torOrd.size(); ++i)
                b(Gk.rank + i, sp.tensorOrd.size() + i) = Gk.torsion[i] / sp.torOrd[i];
            M.beta[j].emplace(n, fromComps(sp.group, Gk, b, true, false));
        }
        for (auto [m, n] : N.pairs()) {
            const SplitPiece& Pm = L.sp[j][m];
            const SplitPiece& Pn = L.sp[j][n];
            const SplitPiece& Pmn = L.sp[j][m * n];
            // kappa_{mn,m}: [1] -> n[1] on the tensor part, inclusion on the Tor part
            IntegerMatrix up(Pmn.comps(), Pm.comps());
            for (std::size_t i = 0; i < Pm.tensorOrd.size(); ++i) up(i, i) = n;
            for (std::size_t i = 0; i < Pm.torOrd.size(); ++i) {
                std::size_t a = Pm.tensorOrd.size() + i, c = Pmn.tensorOrd.size() + i;
                up(c, a) = Pmn.torOrd[i] / Pm.torOrd[i];
            }
            M.kappaUp[j].emplace(std::make_pair(m, n), fromComps(Pm.group, Pmn.group, up, true, true));
            // kappa_{n,mn}: reduction on the tensor part, multiplication by m on the Tor part
            IntegerMatrix down(Pn.comps(), Pmn.comps());
            for (std::size_t i = 0; i < Pn.tensorOrd.size(); ++i) down(i, i) = 1;
            for (std::size_t i = 0; i < Pn.torOrd.size(); ++i) {
                std::size_t a = Pmn.tensorOrd.size() + i, c = Pn.tensorOrd.size() + i;
                down(c, a) = Int(m) * Pn.torOrd[i] / Pmn.torOrd[i];
            }
            M.kappaDown[j].emplace(std::make_pair(m, n), fromComps(Pmn.group, Pn.group, down, true, true));
        }
    }
    return M;
}

LambdaMorphism standardMorphism(const LambdaModule& S, const LambdaModule& T, const AbHom& f0, const AbHom& f1) {
    if (!(S.N == T.N)) throw std::invalid_argument("standardMorphism: coefficient sets differ");
    if (!f0.src.sameType(S.G(0)) || !f0.dst.sameType(T.G(0)) || !f1.src.sameType(S.G(1)) || !f1.dst.sameType(T.G(1)))
        throw std::invalid_argument("standardMorphism: group maps do not match the modules");
    StdLayout LS = layoutOf(S.G(0), S.G(1), S.N), LT = layoutOf(T.G(0), T.G(1), T.N);
    const AbHom* f[2] = {&f0, &f1};
    LambdaMorphism out;
    out.comp.resize(S.pieceCount());
    out.comp[0] = AbHom(S.G(0), T.G(0), f0.mat);
    out.comp[1] = AbHom(S.G(1), T.G(1), f1.mat);
    for (int j = 0; j < 2; ++j)
        for (long n : S.N.moduli) {
            const SplitPiece& a = LS.sp[j][n];
            const SplitPiece& b = LT.sp[j][n];
            const FgAbGroup& Hk = T.G(1 - j);
            const FgAbGroup& Gk = S.G(1 - j);
            IntegerMatrix c(b.comps(), a.comps());
            const AbHom& fj = *f[j];
            for (std::size_t i = 0; i < a.tensorOrd.size(); ++i)
                for (std::size_t k = 0; k < b.tensorOrd.size(); ++k) c(k, i) = fj.mat(k, i);
            const AbHom& fk = *f[1 - j];
            for (std::size_t i = 0; i < a.torOrd.size(); ++i) {
                Vec x = Gk.zero();
                x[Gk.rank + i] = Gk.torsion[i] / a.torOrd[i];
                Vec y = fk.apply(x);
                for (std::size_t k = 0; k < Hk.torsion.size(); ++k) {
                    Int step = Hk.torsion[k] / b.torOrd[k];
                    if (!mpz_divisible_p(y[Hk.rank + k].get_mpz_t(), step.get_mpz_t()))
                        throw std::logic_error("standardMorphism: image leaves the n-torsion");
                    c(b.tensorOrd.size() + k, a.tensorOrd.size() + i) = y[Hk.rank + k] / step;
                }
            }
            int p = S.index(j, n);
            out.comp[p] = fromComps(S.pieces[p], T.pieces[p], c, true, true);
        }
    return out;
}

// ---------------------------------------------------------------- validation

Report structureCheck(const LambdaModule& M) {
    Report r;
    std::size_t want = 2 + 2 * M.N.size();
    r.add("piece count", M.pieces.size() == want, std::to_string(M.pieces.size()) + " of " + std::to_string(want));
    if (M.pieces.size() != want) return r;
    r.add("divisor-closed coefficients", M.N.divisorClosed(), M.N.str());
    for (int j = 0; j < 2; ++j) {
        for (long n : M.N.moduli) {
            r.add("rho" + std::to_string(j) + "_" + std::to_string(n) + " present", M.rho[j].count(n) == 1);
            r.add("beta" + std::to_string(j) + "_" + std::to_string(n) + " present", M.beta[j].count(n) == 1);
        }
        for (auto mn : M.N.pairs()) {
            r.add("kappa up " + std::to_string(j) + " (" + std::to_string(mn.first) + "," + std::to_string(mn.second) + ") present",
                  M.kappaUp[j].count(mn) == 1);
            r.add("kappa down " + std::to_string(j) + " (" + std::to_string(mn.first) + "," + std::to_string(mn.second) +
                      ") present",
                  M.kappaDown[j].count(mn) == 1);
        }
    }
    if (!r.ok()) return r;
    for (auto& mr : M.structureMaps()) {
        bool shape = mr.f->src.sameType(M.pieces[mr.src]) && mr.f->dst.sameType(M.pieces[mr.dst]);
        r.add(mr.name + " shape", shape);
        if (shape) r.add(mr.name + " well-defined", mr.f->wellDefined());
    }
    return r;
}

Report validateLambdaModule(const LambdaModule& M) {
    Report s = structureCheck(M);
    if (!s.ok()) {
        auto* f = s.firstFailure();
        throw std::invalid_argument("malformed Lambda-module: " + f->name + (f->detail.empty() ? "" : " (" + f->detail + ")"));
    }
    Report r;
    for (long n : M.N.moduli)
        for (int j = 0; j < 2; ++j) {
            std::string tag = "first sequence n=" + std::to_string(n) + " j=" + std::to_string(j);
            AbHom xn = AbHom::scalar(M.G(j), n), xnk = AbHom::scalar(M.G(1 - j), n);
            r.add(tag + " at G" + std::to_string(j), isExactAt(xn, M.rho[j].at(n)));
            r.add(tag + " at G" + std::to_string(j) + "," + std::to_string(n), isExactAt(M.rho[j].at(n), M.beta[j].at(n)));
            r.add(tag + " at G" + std::to_string(1 - j), isExactAt(M.beta[j].at(n), xnk));
        }
    for (auto [m, n] : M.N.pairs()) {
        std::string tag = "second sequence m=" + std::to_string(m) + " n=" + std::to_string(n);
        std::pair<long, long> key{m, n};
        std::string mn = std::to_string(m * n), ms = std::to_string(m), ns = std::to_string(n);
        for (int j = 0; j < 2; ++j) {
            int k = 1 - j;
            AbHom bj = M.betaMN(j, m, n);
            std::string J = std::to_string(j), K = std::to_string(k);
            r.add(tag + " at G" + J + "," + ns, isExactAt(M.kappaDown[j].at(key), bj));
            r.add(tag + " at G" + K + "," + ms, isExactAt(bj, M.kappaUp[k].at(key)));
            r.add(tag + " at G" + K + "," + mn, isExactAt(M.kappaUp[k].at(key), M.kappaDown[k].at(key)));
        }
    }
    return r;
}

// ---------------------------------------------------------------- morphisms

LambdaMorphism identityMorphism(const LambdaModule& M) {
    LambdaMorphism f;
    for (auto& g : M.pieces) f.comp.push_back(AbHom::identity(g));
    return f;
}

LambdaMorphism zeroMorphism(const LambdaModule& S, const LambdaModule& T) {
    LambdaMorphism f;
    for (std::size_t p = 0; p < S.pieceCount(); ++p) f.comp.push_back(AbHom::zero(S.pieces[p], T.pieces[p]));
    return f;
}

LambdaMorphism compose(const LambdaMorphism& g, const LambdaMorphism& f) {
    if (g.comp.size() != f.comp.size()) throw std::invalid_argument("compose: component count mismatch");
    LambdaMorphism h;
    for (std::size_t p = 0; p < f.comp.size(); ++p) h.comp.push_back(compose(g.comp[p], f.comp[p]));
    return h;
}

bool equalMorphisms(const LambdaMorphism& f, const LambdaMorphism& g) {
    if (f.comp.size() != g.comp.size()) return false;
    for (std::size_t p = 0; p < f.comp.size(); ++p)
        if (!(f.comp[p] == g.comp[p])) return false;
    return true;
}

bool isGradedMorphism(const LambdaModule& S, const LambdaModule& T, const LambdaMorphism& f) {
    if (f.comp.size() != S.pieceCount() || S.pieceCount() != T.pieceCount())
        throw std::invalid_argument("morphism component count mismatch");
    for (std::size_t p = 0; p < f.comp.size(); ++p) {
        if (!f.comp[p].src.sameType(S.pieces[p]) || !f.comp[p].dst.sameType(T.pieces[p]))
            throw std::invalid_argument("morphism component shape mismatch at " + S.pieceName(p));
        if (!f.comp[p].wellDefined()) return false;
    }
    return true;
}

bool checkLambdaLinear(const LambdaModule& S, const LambdaModule& T, const LambdaMorphism& f) {
    if (!(S.N == T.N)) throw std::invalid_argument("checkLambdaLinear: coefficient sets differ");
    if (!isGradedMorphism(S, T, f)) return false;
    auto ms = S.structureMaps(), mt = T.structureMaps();
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto& a = ms[i];
        const auto& b = mt[i];
        if (!(compose(f.comp[a.dst], *a.f) == compose(*b.f, f.comp[a.src]))) return false;
    }
    return true;
}

bool isGradedIso(const LambdaModule& S, const LambdaModule& T, const LambdaMorphism& f) {
    if (!isGradedMorphism(S, T, f)) return false;
    for (auto& c : f.comp)
        if (!c.isIso()) return false;
    return true;
}

LambdaSum lambdaDirectSum(const LambdaModule& A, const LambdaModule& B) {
    if (!(A.N == B.N)) throw std::invalid_argument("direct sum: coefficient sets differ");
    LambdaSum out;
    LambdaModule& S = out.sum;
    S.N = A.N;
    std::vector<DirectSum> ds;
    for (std::size_t p = 0; p < A.pieceCount(); ++p) {
        ds.push_back(directSum({A.pieces[p], B.pieces[p]}));
        S.pieces.push_back(ds.back().sum);
    }
    auto sumMap = [&](int src, int dst, const AbHom& fa, const AbHom& fb) {
        return compose(ds[dst].inj[0], compose(fa, ds[src].proj[0])) + compose(ds[dst].inj[1], compose(fb, ds[src].proj[1]));
    };
    for (int j = 0; j < 2; ++j) {
        for (long n : A.N.moduli) {
            S.rho[j].emplace(n, sumMap(j, A.index(j, n), A.rho[j].at(n), B.rho[j].at(n)));
            S.beta[j].emplace(n, sumMap(A.index(j, n), 1 - j, A.beta[j].at(n), B.beta[j].at(n)));
        }
        for (auto mn : A.N.pairs()) {
            auto [m, n] = mn;
            S.kappaUp[j].emplace(mn, sumMap(A.index(j, m), A.index(j, m * n), A.kappaUp[j].at(mn), B.kappaUp[j].at(mn)));
            S.kappaDown[j].emplace(mn,
                                   sumMap(A.index(j, m * n), A.index(j, n), A.kappaDown[j].at(mn), B.kappaDown[j].at(mn)));
        }
    }
    for (int k = 0; k < 2; ++k)
        for (std::size_t p = 0; p < A.pieceCount(); ++p) {
            out.inj[k].comp.push_back(ds[p].inj[k]);
            out.proj[k].comp.push_back(ds[p].proj[k]);
        }
    return out;
}

// ---------------------------------------------------------------- searches

namespace {

LambdaIsoResult isoSearch(const LambdaModule& A, const LambdaModule& B, const IsoSearchOptions& opt, bool lambda) {
    LambdaIsoResult res;
    if (!(A.N == B.N) || A.pieceCount() != B.pieceCount()) return res;
    for (std::size_t p = 0; p < A.pieceCount(); ++p)
        if (!A.pieces[p].sameType(B.pieces[p])) return res;
    search::Problem P;
    P.budget = opt.budget;
    for (std::size_t p = 0; p < A.pieceCount(); ++p)
        P.pieces.push_back({search::toSmall(A.pieces[p]), search::toSmall(B.pieces[p]), opt.freeBound});
    if (lambda) {
        auto ma = A.structureMaps(), mb = B.structureMaps();
        for (std::size_t i = 0; i < ma.size(); ++i)
            P.edges.push_back({ma[i].src, ma[i].dst, search::toSmall(ma[i].f->mat), search::toSmall(mb[i].f->mat)});
    }
    auto r = search::solve(P);
    res.nodes = r.nodes;
    if (r.status == search::Status::BudgetExceeded) {
        res.outcome = SearchOutcome::BudgetExceeded;
        return res;
    }
    if (r.status == search::Status::Absent) return res;
    LambdaMorphism f;
    for (std::size_t p = 0; p < A.pieceCount(); ++p) f.comp.emplace_back(A.pieces[p], B.pieces[p], search::toBig(r.phi[p]));
    // witnesses are re-verified with exact arithmetic
    bool ok = isGradedIso(A, B, f) && (!lambda || checkLambdaLinear(A, B, f));
    if (!ok) throw std::logic_error("iso search produced an invalid witness");
    res.outcome = SearchOutcome::Found;
    res.witness = std::move(f);
    return res;
}

}  // namespace

LambdaIsoResult gradedIsoSearch(const LambdaModule& A, const LambdaModule& B, const IsoSearchOptions& opt) {
    return isoSearch(A, B, opt, false);
}

LambdaIsoResult lambdaIsoSearch(const LambdaModule& A, const LambdaModule& B, const IsoSearchOptions& opt) {
    return isoSearch(A, B, opt, true);
}

namespace {

// Every hom G_{j,n} -> G_{1-j} giving exactness of the first sequence at G_{j,n} and G_{1-j}.
std::vector<AbHom> betaCandidates(const LambdaModule& M, int j, long n, std::size_t& considered) {
    const FgAbGroup& src = M.Gn(j, n);
    const FgAbGroup& dst = M.G(1 - j);
    search::SGroup sd = search::toSmall(dst);
    std::vector<std::vector<std::vector<long>>> choices;
    for (std::size_t g = 0; g < src.ngens(); ++g) choices.push_back(search::candidateImages(sd, toLong(src.order(g)), 0));
    std::vector<AbHom> out;
    std::vector<std::size_t> idx(src.ngens(), 0);
    const AbHom& rho = M.rho[j].at(n);
    AbHom xn = AbHom::scalar(dst, n);
    for (;;) {
        IntegerMatrix m(dst.ngens(), src.ngens());
        for (std::size_t g = 0; g < src.ngens(); ++g)
            for (std::size_t i = 0; i < dst.ngens(); ++i) m(i, g) = choices[g][idx[g]][i];
        AbHom b(src, dst, m);
        ++considered;
        if (isExactAt(rho, b) && isExactAt(b, xn)) out.push_back(b);
        std::size_t g = src.ngens();
        bool done = true;
        while (g > 0) {
            --g;
            if (++idx[g] < choices[g].size()) {
                done = false;
                break;
            }
            idx[g] = 0;
        }
        if (done) break;
    }
    return out;
}

}  // namespace

BetaVariantResult betaVariantSearch(const FgAbGroup& G0, const FgAbGroup& G1, const CoefficientSet& N, long long budget) {
    BetaVariantResult res;
    LambdaModule base = standardLambdaModule(G0, G1, N);
    if (!base.allFinite()) throw std::invalid_argument("betaVariantSearch needs finite groups");
    std::vector<std::pair<int, long>> slots;
    std::vector<std::vector<AbHom>> cands;
    for (int j = 0; j < 2; ++j)
        for (long n : N.moduli) {
            slots.push_back({j, n});
            cands.push_back(betaCandidates(base, j, n, res.candidateAssignments));
        }
    long long spent = 0;
    std::vector<std::size_t> idx(slots.size(), 0);
    for (auto& c : cands)
        if (c.empty()) return res;
    for (;;) {
        if (++spent > budget) {
            res.outcome = SearchOutcome::BudgetExceeded;
            return res;
        }
        LambdaModule M = base;
        for (std::size_t s = 0; s < slots.size(); ++s) M.beta[slots[s].first].at(slots[s].second) = cands[s][idx[s]];
        if (validateLambdaModule(M).ok()) {
            ++res.validAssignments;
            bool fresh = true;
            for (auto& rep : res.representatives) {
                IsoSearchOptions o;
                o.budget = budget;
                auto r = lambdaIsoSearch(rep, M, o);
                if (r.outcome == SearchOutcome::BudgetExceeded) {
                    res.outcome = SearchOutcome::BudgetExceeded;
                    return res;
                }
                if (r.outcome == SearchOutcome::Found) {
                    fresh = false;
                    break;
                }
            }
            if (fresh) res.representatives.push_back(M);
        }
        std::size_t s = slots.size();
        bool done = true;
        while (s > 0) {
            --s;
            if (++idx[s] < cands[s].size()) {
                done = false;
                break;
            }
            idx[s] = 0;
        }
        if (done) break;
    }
    return res;
}

namespace {

// Lists of cyclic orders whose product is `order`, as invariant factor chains.
void chainsOfOrder(long order, std::vector<std::vector<long>>& out) {
    std::function<void(long, long, std::vector<long>&)> rec = [&](long rest, long last, std::vector<long>& cur) {
        if (rest == 1) {
            out.push_back(cur);
            return;
        }
        // next invariant factor must be a multiple of last and divide rest
        for (long d = (last ? last : 2); d <= rest; d += (last ? last : 1)) {
            if (rest % d) continue;
            if (last && d % last) continue;
            cur.push_back(d);
            rec(rest / d, d, cur);
            cur.pop_back();
        }
    };
    std::vector<long> cur;
    rec(order, 0, cur);
}

FgAbGroup fromChain(const std::vector<long>& c) {
    std::vector<Int> t(c.begin(), c.end());
    return canonicalGroup(0, t);
}

}  // namespace

BetaPair findGradedNotLambdaPair(const FgAbGroup& G0, const FgAbGroup& G1, const CoefficientSet& N, long maxOrder,
                                 long long budget) {
    BetaPair out;
    out.N = N;
    auto attempt = [&](const FgAbGroup& a, const FgAbGroup& b) {
        out.tried.push_back("(" + a.str() + ", " + b.str() + ")");
        auto r = betaVariantSearch(a, b, N, budget);
        if (r.outcome == SearchOutcome::BudgetExceeded) throw BudgetExceeded("betaVariantSearch budget exceeded at " + out.tried.back());
        if (r.representatives.size() >= 2) {
            out.found = true;
            out.G0 = a;
            out.G1 = b;
            out.first = r.representatives[0];
            out.second = r.representatives[1];
            return true;
        }
        return false;
    };
    if (attempt(G0, G1)) return out;
    for (long total = 2; total <= maxOrder; ++total)
        for (long o0 = 1; o0 <= total; ++o0) {
            if (total % o0) continue;
            long o1 = total / o0;
            std::vector<std::vector<long>> c0, c1;
            chainsOfOrder(o0, c0);
            chainsOfOrder(o1, c1);
            for (auto& x : c0)
                for (auto& y : c1) {
                    FgAbGroup a = fromChain(x), b = fromChain(y);
                    if (a.sameType(G0) && b.sameType(G1)) continue;
                    if (attempt(a, b)) return out;
                }
        }
    return out;
}

}  // namespace lkt
