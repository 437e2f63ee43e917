#include "lkt/catalog.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace lkt {

const char* const kExtensionLayerPreset = "extension top layer: every K0(B) coordinate over the full classes of A";
namespace {
const char* const kUnitizeLayerPreset = "unitization top layer: (v, s) with s >= 1 and v unrestricted";

LambdaMorphism addMorph(const LambdaMorphism& f, const LambdaMorphism& g) {
    LambdaMorphism r;
    for (std::size_t p = 0; p < f.comp.size(); ++p) r.comp.push_back(f.comp[p] + g.comp[p]);
    return r;
}

void mergePresets(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (auto& p : from)
        if (std::find(into.begin(), into.end(), p) == into.end()) into.push_back(p);
}

void requireValid(const LatticedKModule& X, const std::string& what) {
    auto r = validateLatticedKModule(X);
    if (auto f = r.firstFailure())
        throw std::invalid_argument(what + ": " + f->name + (f->detail.empty() ? "" : " (" + f->detail + ")"));
}

std::string uniqueName(std::string n, const std::vector<std::string>& taken) {
    while (std::find(taken.begin(), taken.end(), n) != taken.end()) n += "'";
    return n;
}

FiniteLattice chainLattice(const std::vector<std::string>& ns) {
    std::vector<std::vector<bool>> le(ns.size(), std::vector<bool>(ns.size()));
    for (std::size_t i = 0; i < ns.size(); ++i)
        for (std::size_t j = 0; j < ns.size(); ++j) le[i][j] = i <= j;
    return FiniteLattice::fromOrder(ns, le);
}

// chain model where every nonidentity connecting map starts at a trivial fiber or ends at one
LatticedKModule chainModel(const CoefficientSet& N, const std::vector<std::string>& names, std::vector<LambdaModule> fibers,
                           std::vector<SemilinearSet> layers, std::vector<bool> infinite) {
    LatticedKModule X;
    X.N = N;
    X.lattice = chainLattice(names);
    X.fibers = std::move(fibers);
    for (std::size_t I = 0; I < names.size(); ++I)
        for (std::size_t J = I; J < names.size(); ++J)
            X.delta.emplace(std::make_pair(I, J),
                            I == J ? identityMorphism(X.fibers[I]) : zeroMorphism(X.fibers[I], X.fibers[J]));
    X.layers = std::move(layers);
    X.infiniteAllowed = std::move(infinite);
    return X;
}

SemilinearSet trivialLayer(const CoefficientSet& N) {
    auto z = zeroLambdaModule(N);
    return SemilinearSet::point(z.G(0), z.G(0).zero());
}

// some x with f(x) = y
Vec preimage(const AbHom& f, const Vec& y) {
    IntegerMatrix A = hstack(f.mat, f.dst.relations());
    auto sol = solveLinear(A, y);
    if (!sol) throw std::invalid_argument("class has no preimage");
    return Vec(sol->begin(), sol->begin() + long(f.src.ngens()));
}

std::vector<Vec> groupGenerators(const FgAbGroup& g) {
    std::vector<Vec> out;
    for (std::size_t i = 0; i < g.ngens(); ++i) {
        Vec e = g.zero();
        e[i] = 1;
        out.push_back(e);
        if (i < g.rank) {
            e[i] = -1;
            out.push_back(e);
        }
    }
    return out;
}

}  // namespace

const char* kindName(BlockSpec::Kind k) {
    switch (k) {
        case BlockSpec::Kind::StablyFiniteSimple: return "stablyFiniteSimple";
        case BlockSpec::Kind::Kirchberg: return "kirchberg";
        case BlockSpec::Kind::O2Stable: return "o2Stable";
        case BlockSpec::Kind::Compacts: return "compacts";
        default: return "zero";
    }
}

BlockSpec::Kind parseKind(const std::string& s) {
    for (auto k : {BlockSpec::Kind::StablyFiniteSimple, BlockSpec::Kind::Kirchberg, BlockSpec::Kind::O2Stable,
                   BlockSpec::Kind::Compacts, BlockSpec::Kind::Zero})
        if (s == kindName(k)) return k;
    throw std::invalid_argument("unknown block kind " + s);
}

LatticedKModule buildBlock(const BlockSpec& spec) {
    using K = BlockSpec::Kind;
    const auto& N = spec.N;
    LatticedKModule X;
    auto zero = zeroLambdaModule(N);
    switch (spec.kind) {
        case K::Zero:
            X = chainModel(N, {"0"}, {zero}, {trivialLayer(N)}, {false});
            break;
        case K::O2Stable: {
            if (spec.chain == 0) throw std::invalid_argument("o2Stable block needs at least one nonzero ideal");
            std::vector<std::string> names{"0"};
            for (std::size_t i = 1; i <= spec.chain; ++i)
                names.push_back(spec.chain == 1 ? spec.name : spec.name + std::to_string(i));
            std::vector<LambdaModule> fibers(names.size(), zero);
            std::vector<SemilinearSet> layers(names.size(), trivialLayer(N));
            std::vector<bool> inf(names.size(), true);
            inf[0] = false;
            X = chainModel(N, names, fibers, layers, inf);
            break;
        }
        case K::Kirchberg: {
            auto F = standardLambdaModule(spec.k0, spec.k1, N);
            X = chainModel(N, {"0", spec.name}, {zero, F}, {trivialLayer(N), SemilinearSet::whole(F.G(0))}, {false, true});
            break;
        }
        case K::Compacts:
        case K::StablyFiniteSimple: {
            FgAbGroup g0 = spec.kind == K::Compacts ? parseGroup("Z") : spec.k0;
            FgAbGroup g1 = spec.kind == K::Compacts ? parseGroup("0") : spec.k1;
            auto F = standardLambdaModule(g0, g1, N);
            std::vector<Vec> gens = spec.kind == K::Compacts ? std::vector<Vec>{{1}} : spec.coneGens;
            if (gens.empty()) throw std::invalid_argument("stably finite block needs positive cone generators");
            SemilinearSet layer(F.G(0));
            for (auto& g : gens) {
                if (g.size() != F.G(0).ngens()) throw std::invalid_argument("cone generator has wrong length");
                layer.add(g, gens);
            }
            X = chainModel(N, {"0", spec.name}, {zero, F}, {trivialLayer(N), layer}, {false, false});
            break;
        }
    }
    if (spec.unit) {
        if (spec.kind == K::Zero || spec.kind == K::O2Stable)
            throw std::invalid_argument(std::string(kindName(spec.kind)) + " block takes no unit");
        if (spec.unit->size() != X.K0(1).ngens()) throw std::invalid_argument("unit class has wrong length");
        X.scale.kind = Scale::Kind::Unit;
        X.scale.gens = {positiveV(X, 1, *spec.unit)};
    }
    requireValid(X, std::string(kindName(spec.kind)) + " block " + spec.name);
    return X;
}

LatticedKModule directSum(const LatticedKModule& X, const LatticedKModule& Y) {
    if (!(X.N == Y.N)) throw std::invalid_argument("direct sum: coefficient sets differ");
    const auto &LX = X.lattice, &LY = Y.lattice;
    std::size_t nx = LX.size(), ny = LY.size(), n = nx * ny;
    auto ix = [ny](std::size_t k) { return k / ny; };
    auto iy = [ny](std::size_t k) { return k % ny; };
    std::vector<std::string> names;
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
    for (std::size_t k = 0; k < n; ++k) {
        std::string a = ix(k) == LX.bottom ? "" : LX.names[ix(k)];
        std::string b = iy(k) == LY.bottom ? "" : LY.names[iy(k)];
        std::string nm = a.empty() && b.empty() ? "0" : a.empty() ? b : b.empty() ? a : a + "+" + b;
        names.push_back(uniqueName(nm, names));
        for (std::size_t l = 0; l < n; ++l) le[k][l] = LX.le(ix(k), ix(l)) && LY.le(iy(k), iy(l));
    }
    LatticedKModule S;
    S.N = X.N;
    S.lattice = FiniteLattice::fromOrder(names, le);
    std::vector<LambdaSum> sums;
    for (std::size_t k = 0; k < n; ++k) {
        sums.push_back(lambdaDirectSum(X.fibers[ix(k)], Y.fibers[iy(k)]));
        S.fibers.push_back(sums.back().sum);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            if (!le[k][l]) continue;
            auto a = compose(sums[l].inj[0], compose(X.d(ix(k), ix(l)), sums[k].proj[0]));
            auto b = compose(sums[l].inj[1], compose(Y.d(iy(k), iy(l)), sums[k].proj[1]));
            S.delta.emplace(std::make_pair(k, l), addMorph(a, b));
        }
    for (std::size_t k = 0; k < n; ++k) {
        S.layers.push_back(productSet(S.K0(k), sums[k].inj[0].comp[0], X.layers[ix(k)], sums[k].inj[1].comp[0],
                                      Y.layers[iy(k)]));
        bool zx = ix(k) == LX.bottom || X.infiniteAllowed[ix(k)];
        bool zy = iy(k) == LY.bottom || Y.infiniteAllowed[iy(k)];
        S.infiniteAllowed.push_back(k != S.lattice.bottom && zx && zy);
    }
    // the zero value counts as unital with unit 0
    auto unitOf = [](const LatticedKModule& V) -> std::optional<Vec> {
        if (V.lattice.size() == 1) return V.K0(0).zero();
        if (V.scale.kind != Scale::Kind::Unit) return std::nullopt;
        const auto& e = V.scale.gens[0];
        return V.d(e.ideal, V.lattice.top).comp[0].apply(e.comps[0]);
    };
    auto ux = unitOf(X), uy = unitOf(Y);
    if (ux && uy && n > 1) {
        std::size_t T = S.lattice.top;
        Vec a = sums[T].inj[0].comp[0].apply(*ux), b = sums[T].inj[1].comp[0].apply(*uy);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        S.scale.kind = Scale::Kind::Unit;
        S.scale.gens = {positiveV(S, T, S.K0(T).normalize(a))};
    }
    mergePresets(S.presets, X.presets);
    mergePresets(S.presets, Y.presets);
    requireValid(S, "direct sum");
    return S;
}

LatticedKModule unitize(const LatticedKModule& X, const std::string& topName) {
    if (X.scale.kind != Scale::Kind::None) throw std::invalid_argument("unitize: value already carries a scale");
    LatticedKModule U;
    U.N = X.N;
    U.lattice = FiniteLattice::withNewTop(X.lattice, uniqueName(topName, X.lattice.names));
    std::size_t T = U.lattice.top, oldTop = X.lattice.top;
    auto C = standardLambdaModule(parseGroup("Z"), parseGroup("0"), X.N);
    auto s = lambdaDirectSum(X.fibers[oldTop], C);
    U.fibers = X.fibers;
    U.fibers.push_back(s.sum);
    U.delta = X.delta;
    for (std::size_t I = 0; I < X.lattice.size(); ++I) U.delta.emplace(std::make_pair(I, T), compose(s.inj[0], X.d(I, oldTop)));
    U.delta.emplace(std::make_pair(T, T), identityMorphism(s.sum));
    U.layers = X.layers;
    const AbHom &i0 = s.inj[0].comp[0], &i1 = s.inj[1].comp[0];
    std::vector<Vec> periods{i1.apply({1})};
    for (auto& g : groupGenerators(X.K0(oldTop))) periods.push_back(i0.apply(g));
    SemilinearSet top(U.K0(T));
    top.add(i1.apply({1}), periods);
    U.layers.push_back(top);
    U.infiniteAllowed = X.infiniteAllowed;
    U.infiniteAllowed.push_back(false);
    U.scale.kind = Scale::Kind::Unit;
    U.scale.gens = {positiveV(U, T, i1.apply({1}))};
    U.presets = X.presets;
    mergePresets(U.presets, {kUnitizeLayerPreset});
    requireValid(U, "unitization");
    return U;
}

LatticedKModule stabilize(const LatticedKModule& X) {
    LatticedKModule S = X;
    S.scale = Scale{};
    return S;
}

BuiltExtension buildExtension(const LatticedKModule& B, const LatticedKModule& A, const std::optional<ExtensionClass>& cls,
                              const std::string& topName, const std::optional<SemilinearSet>& topLayer) {
    if (!(A.N == B.N)) throw std::invalid_argument("extension: coefficient sets differ");
    if (B.scale.kind != Scale::Kind::None) throw std::invalid_argument("extension: the ideal must be stable (no scale)");
    if (A.lattice.size() != 2 || A.scale.kind != Scale::Kind::Unit)
        throw std::invalid_argument("extension: the quotient must be simple and unital");
    BuiltExtension out;
    out.B = B;
    out.A = A;
    const LambdaModule &FB = B.fibers[B.lattice.top], &FA = A.fibers[A.lattice.top];
    LambdaModule FE;
    if (!cls) {
        auto s = lambdaDirectSum(FB, FA);
        FE = s.sum;
        out.iotaTop = s.inj[0];
        out.piTop = s.proj[1];
    } else {
        const auto& c = *cls;
        auto shape = [](const AbHom& f, const FgAbGroup& s, const FgAbGroup& d) {
            return f.src.sameType(s) && f.dst.sameType(d) && f.wellDefined();
        };
        if (!shape(c.iota0, FB.G(0), c.k0) || !shape(c.pi0, c.k0, FA.G(0)) || !shape(c.iota1, FB.G(1), c.k1) ||
            !shape(c.pi1, c.k1, FA.G(1)))
            throw std::invalid_argument("extension class: maps do not fit the K-groups");
        for (int j = 0; j < 2; ++j) {
            const AbHom& i = j ? c.iota1 : c.iota0;
            const AbHom& p = j ? c.pi1 : c.pi0;
            if (!i.isInjective() || !p.isSurjective() || !isExactAt(i, p))
                throw std::invalid_argument("extension class: K" + std::to_string(j) + " sequence is not short exact");
        }
        FE = standardLambdaModule(c.k0, c.k1, B.N);
        out.iotaTop = standardMorphism(FB, FE, c.iota0, c.iota1);
        out.piTop = standardMorphism(FE, FA, c.pi0, c.pi1);
        if (!checkLambdaLinear(FB, FE, out.iotaTop) || !checkLambdaLinear(FE, FA, out.piTop))
            throw std::invalid_argument("extension class: induced maps are not Lambda-linear");
    }
    LatticedKModule& E = out.E;
    E.N = B.N;
    E.lattice = FiniteLattice::withNewTop(B.lattice, uniqueName(topName, B.lattice.names));
    std::size_t T = E.lattice.top, bTop = B.lattice.top;
    E.fibers = B.fibers;
    E.fibers.push_back(FE);
    E.delta = B.delta;
    for (std::size_t I = 0; I < B.lattice.size(); ++I)
        E.delta.emplace(std::make_pair(I, T), compose(out.iotaTop, B.d(I, bTop)));
    E.delta.emplace(std::make_pair(T, T), identityMorphism(FE));
    E.layers = B.layers;
    // preset: lifts of the full classes of A, with the K0(B) coordinate unrestricted
    const AbHom &i0 = out.iotaTop.comp[0], &p0 = out.piTop.comp[0];
    std::vector<Vec> kernel;
    for (auto& g : groupGenerators(FB.G(0))) kernel.push_back(i0.apply(g));
    SemilinearSet top(FE.G(0));
    for (auto& c : A.layers[A.lattice.top].components) {
        std::vector<Vec> ps = kernel;
        for (auto& p : c.periods) ps.push_back(preimage(p0, p));
        top.add(preimage(p0, c.offset), ps);
    }
    if (topLayer && !topLayer->ambient.sameType(FE.G(0)))
        throw std::invalid_argument("extension: explicit top layer lives in the wrong group");
    E.layers.push_back(topLayer ? *topLayer : top);
    E.infiniteAllowed = B.infiniteAllowed;
    E.infiniteAllowed.push_back(A.infiniteAllowed[A.lattice.top]);
    const VElem& u = A.scale.gens[0];
    E.scale.kind = Scale::Kind::Unit;
    E.scale.gens = {positiveV(E, T, preimage(p0, A.d(u.ideal, A.lattice.top).comp[0].apply(u.comps[0])))};
    E.presets = B.presets;
    mergePresets(E.presets, A.presets);
    if (!topLayer) mergePresets(E.presets, {kExtensionLayerPreset});
    requireValid(E, "extension");
    return out;
}

CanonicalMaps canonicalMorphisms(const BuiltExtension& ext) {
    const auto &B = ext.B, &A = ext.A, &E = ext.E;
    if (E.lattice.size() != B.lattice.size() + 1) throw std::invalid_argument("extension provenance missing");
    CanonicalMaps m;
    for (std::size_t I = 0; I < B.lattice.size(); ++I) {
        m.iota.latticeMap.push_back(I);
        m.iota.fiberMaps.push_back(identityMorphism(B.fibers[I]));
    }
    for (std::size_t I = 0; I < E.lattice.size(); ++I) {
        bool top = I == E.lattice.top;
        std::size_t K = top ? A.lattice.top : A.lattice.bottom;
        m.pi.latticeMap.push_back(K);
        m.pi.fiberMaps.push_back(top ? ext.piTop : zeroMorphism(E.fibers[I], A.fibers[K]));
    }
    return m;
}

AbHom randomAutomorphism(const FgAbGroup& g, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::size_t n = g.ngens(), r = g.rank;
    IntegerMatrix m = IntegerMatrix::identity(n);
    // signed permutation of the free generators
    std::vector<std::size_t> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < r; ++i) {
        m(i, i) = 0;
        m(perm[i], i) = rng() % 2 ? 1 : -1;
    }
    AbHom f(g, g, m);
    auto elementary = [&](std::size_t i, std::size_t j, const Int& c) {
        IntegerMatrix e = IntegerMatrix::identity(n);
        e(j, i) = c;  // e_i -> e_i + c e_j
        return AbHom(g, g, e);
    };
    if (r >= 2 && rng() % 2) f = compose(elementary(0, 1, rng() % 2 ? 1 : -1), f);
    for (std::size_t i = r; i < n; ++i) {
        // scale a torsion generator by a unit
        long d = toLong(g.torsion[i - r]);
        std::vector<long> units;
        for (long u = 1; u < d; ++u)
            if (std::gcd(u, d) == 1) units.push_back(u);
        IntegerMatrix s = IntegerMatrix::identity(n);
        s(i, i) = units[rng() % units.size()];
        f = compose(AbHom(g, g, s), f);
    }
    for (int step = 0; step < 3 && n > r; ++step) {
        std::size_t j = r + rng() % (n - r), i = rng() % n;
        if (i == j) continue;
        Int dj = g.torsion[j - r];
        // e_i -> e_i + c e_j needs ord(e_i) c e_j = 0
        Int c = i < r ? Int(1) : Int(dj / gcd(dj, g.torsion[i - r]));
        if (c % dj == 0) continue;
        f = compose(elementary(i, j, c), f);
    }
    if (!f.isIso()) throw std::logic_error("random automorphism is not invertible");
    return f;
}

Transported transport(const LatticedKModule& X, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    const auto& L = X.lattice;
    std::size_t n = L.size(), P = X.pieceCount();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> names(n);
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
    for (std::size_t I = 0; I < n; ++I) {
        names[perm[I]] = L.names[I];
        for (std::size_t J = 0; J < n; ++J) le[perm[I]][perm[J]] = L.le(I, J);
    }
    Transported out;
    LatticedKModule& Y = out.copy;
    Y.N = X.N;
    Y.lattice = FiniteLattice::fromOrder(names, le);
    Y.fibers.assign(n, {});
    Y.layers.assign(n, {});
    Y.infiniteAllowed.assign(n, false);
    Y.presets = X.presets;
    std::vector<LambdaMorphism> phi(n), phiInv(n);
    for (std::size_t I = 0; I < n; ++I) {
        for (std::size_t p = 0; p < P; ++p) {
            phi[I].comp.push_back(randomAutomorphism(X.fibers[I].pieces[p], rng()));
            phiInv[I].comp.push_back(inverse(phi[I].comp.back()));
        }
        const LambdaModule& F = X.fibers[I];
        LambdaModule G = F;
        auto conj = [&](const AbHom& f, int src, int dst) {
            return compose(phi[I].comp[dst], compose(f, phiInv[I].comp[src]));
        };
        for (int j = 0; j < 2; ++j) {
            for (long m : F.N.moduli) {
                G.rho[j][m] = conj(F.rho[j].at(m), j, F.index(j, m));
                G.beta[j][m] = conj(F.beta[j].at(m), F.index(j, m), 1 - j);
            }
            for (auto mn : F.N.pairs()) {
                auto [a, b] = mn;
                G.kappaUp[j][mn] = conj(F.kappaUp[j].at(mn), F.index(j, a), F.index(j, a * b));
                G.kappaDown[j][mn] = conj(F.kappaDown[j].at(mn), F.index(j, a * b), F.index(j, b));
            }
        }
        Y.fibers[perm[I]] = G;
        Y.layers[perm[I]] = pushforward(phi[I].comp[0], X.layers[I]);
        Y.infiniteAllowed[perm[I]] = X.infiniteAllowed[I];
    }
    for (auto& [key, d] : X.delta)
        Y.delta.emplace(std::make_pair(perm[key.first], perm[key.second]),
                        compose(phi[key.second], compose(d, phiInv[key.first])));
    Y.scale.kind = X.scale.kind;
    for (auto& g : X.scale.gens) {
        VElem e;
        e.ideal = perm[g.ideal];
        for (std::size_t p = 0; p < P; ++p) e.comps.push_back(phi[g.ideal].comp[p].apply(g.comps[p]));
        Y.scale.gens.push_back(e);
    }
    out.witness.latticeMap = perm;
    out.witness.fiberMaps = phi;
    return out;
}

}  // namespace lkt
