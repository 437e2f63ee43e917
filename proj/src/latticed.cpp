#include "lkt/latticed.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "lkt/smallsearch.hpp"

namespace lkt {

namespace {

Vec addv(const Vec& a, const Vec& b) {
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

Vec subv(const Vec& a, const Vec& b) {
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

std::string vecStr(const Vec& v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].get_str();
    os << ")";
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- lattices

FiniteLattice FiniteLattice::fromOrder(std::vector<std::string> names, std::vector<std::vector<bool>> leq) {
    std::size_t n = names.size();
    if (n == 0) throw std::invalid_argument("lattice needs at least one element");
    if (leq.size() != n) throw std::invalid_argument("order table has wrong size");
    for (auto& r : leq)
        if (r.size() != n) throw std::invalid_argument("order table has wrong size");
    for (std::size_t a = 0; a < n; ++a) {
        if (!leq[a][a]) throw std::invalid_argument("order is not reflexive at " + names[a]);
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b && leq[a][b] && leq[b][a]) throw std::invalid_argument("order is not antisymmetric");
            for (std::size_t c = 0; c < n; ++c)
                if (leq[a][b] && leq[b][c] && !leq[a][c]) throw std::invalid_argument("order is not transitive");
        }
    }
    {
        std::set<std::string> s(names.begin(), names.end());
        if (s.size() != n) throw std::invalid_argument("duplicate ideal names");
    }
    FiniteLattice L;
    L.names = std::move(names);
    L.leq = std::move(leq);
    L.joinT.assign(n, std::vector<std::size_t>(n));
    L.meetT.assign(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            std::optional<std::size_t> j, m;
            for (std::size_t c = 0; c < n; ++c) {
                if (L.leq[a][c] && L.leq[b][c]) {
                    bool least = true;
                    for (std::size_t d = 0; d < n && least; ++d)
                        if (L.leq[a][d] && L.leq[b][d] && !L.leq[c][d]) least = false;
                    if (least) j = c;
                }
                if (L.leq[c][a] && L.leq[c][b]) {
                    bool greatest = true;
                    for (std::size_t d = 0; d < n && greatest; ++d)
                        if (L.leq[d][a] && L.leq[d][b] && !L.leq[d][c]) greatest = false;
                    if (greatest) m = c;
                }
            }
            if (!j || !m) throw std::invalid_argument("not a lattice: " + L.names[a] + " and " + L.names[b] +
                                                      " lack a join or meet");
            L.joinT[a][b] = *j;
            L.meetT[a][b] = *m;
        }
    L.bottom = L.meetT[0][0];
    L.top = L.joinT[0][0];
    for (std::size_t a = 0; a < n; ++a) {
        L.bottom = L.meetT[L.bottom][a];
        L.top = L.joinT[L.top][a];
    }
    return L;
}

FiniteLattice FiniteLattice::chain(std::size_t k) {
    std::vector<std::string> ns;
    std::vector<std::vector<bool>> le(k, std::vector<bool>(k));
    for (std::size_t i = 0; i < k; ++i) {
        ns.push_back(std::to_string(i));
        for (std::size_t j = 0; j < k; ++j) le[i][j] = i <= j;
    }
    return fromOrder(ns, le);
}

FiniteLattice FiniteLattice::product(const FiniteLattice& a, const FiniteLattice& b) {
    std::size_t n = a.size() * b.size();
    std::vector<std::string> ns(n);
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n));
    for (std::size_t x = 0; x < n; ++x) {
        ns[x] = "(" + a.names[x / b.size()] + "," + b.names[x % b.size()] + ")";
        for (std::size_t y = 0; y < n; ++y) le[x][y] = a.le(x / b.size(), y / b.size()) && b.le(x % b.size(), y % b.size());
    }
    return fromOrder(ns, le);
}

FiniteLattice FiniteLattice::withNewTop(const FiniteLattice& a, const std::string& topName) {
    std::size_t n = a.size() + 1;
    std::vector<std::string> ns = a.names;
    ns.push_back(topName);
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
    for (std::size_t x = 0; x < a.size(); ++x)
        for (std::size_t y = 0; y < a.size(); ++y) le[x][y] = a.le(x, y);
    for (std::size_t x = 0; x < n; ++x) le[x][n - 1] = true;
    return fromOrder(ns, le);
}

std::size_t FiniteLattice::index(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("no ideal named " + name);
    return std::size_t(it - names.begin());
}

bool FiniteLattice::covers(std::size_t a, std::size_t b) const {
    if (a == b || !le(a, b)) return false;
    for (std::size_t c = 0; c < size(); ++c)
        if (c != a && c != b && le(a, c) && le(c, b)) return false;
    return true;
}

std::vector<std::size_t> FiniteLattice::downSet(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j)
        if (le(j, i)) out.push_back(j);
    return out;
}

Report checkLattice(const FiniteLattice& L) {
    Report r;
    std::size_t n = L.size();
    bool assoc = true, absorb = true, comm = true, bounds = true;
    for (std::size_t a = 0; a < n; ++a) {
        bounds = bounds && L.le(L.bottom, a) && L.le(a, L.top);
        for (std::size_t b = 0; b < n; ++b) {
            comm = comm && L.join(a, b) == L.join(b, a) && L.meet(a, b) == L.meet(b, a);
            absorb = absorb && L.join(a, L.meet(a, b)) == a && L.meet(a, L.join(a, b)) == a;
            for (std::size_t c = 0; c < n; ++c)
                assoc = assoc && L.join(L.join(a, b), c) == L.join(a, L.join(b, c)) &&
                        L.meet(L.meet(a, b), c) == L.meet(a, L.meet(b, c));
        }
    }
    r.add("lattice: join and meet commutative", comm);
    r.add("lattice: join and meet associative", assoc);
    r.add("lattice: absorption laws", absorb);
    r.add("lattice: bottom and top", bounds);
    return r;
}

std::vector<std::vector<std::size_t>> latticeIsomorphisms(const FiniteLattice& a, const FiniteLattice& b,
                                                          std::size_t limit) {
    std::vector<std::vector<std::size_t>> out;
    if (a.size() != b.size()) return out;
    std::size_t n = a.size();
    std::vector<std::size_t> sigma(n);
    std::vector<bool> used(n, false);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (out.size() >= limit) return;
        if (i == n) {
            out.push_back(sigma);
            return;
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (used[t]) continue;
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j)
                ok = a.le(i, j) == b.le(t, sigma[j]) && a.le(j, i) == b.le(sigma[j], t);
            if (!ok) continue;
            used[t] = true;
            sigma[i] = t;
            rec(i + 1);
            used[t] = false;
        }
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------- modules and elements

bool LatticedKModule::allFinite() const {
    for (auto& f : fibers)
        if (!f.allFinite()) return false;
    return true;
}

LatticedKModule restrictTo(const LatticedKModule& X, std::size_t ideal) {
    auto keep = X.lattice.downSet(ideal);
    std::vector<std::string> ns;
    std::vector<std::vector<bool>> le(keep.size(), std::vector<bool>(keep.size()));
    for (std::size_t a = 0; a < keep.size(); ++a) {
        ns.push_back(X.lattice.names[keep[a]]);
        for (std::size_t b = 0; b < keep.size(); ++b) le[a][b] = X.lattice.le(keep[a], keep[b]);
    }
    LatticedKModule R;
    R.N = X.N;
    R.lattice = FiniteLattice::fromOrder(ns, le);
    for (std::size_t a = 0; a < keep.size(); ++a) {
        R.fibers.push_back(X.fibers[keep[a]]);
        R.layers.push_back(X.layers[keep[a]]);
        R.infiniteAllowed.push_back(X.infiniteAllowed[keep[a]]);
        for (std::size_t b = 0; b < keep.size(); ++b)
            if (X.lattice.le(keep[a], keep[b])) R.delta.emplace(std::make_pair(a, b), X.d(keep[a], keep[b]));
    }
    if (ideal == X.lattice.top) R.scale = X.scale;
    R.presets = X.presets;
    return R;
}

VElem neutralV(const LatticedKModule& X) {
    VElem e;
    e.ideal = X.lattice.bottom;
    for (auto& g : X.fibers[e.ideal].pieces) e.comps.push_back(g.zero());
    return e;
}

VElem positiveV(const LatticedKModule& X, std::size_t ideal, const Vec& v) {
    VElem e;
    e.ideal = ideal;
    for (auto& g : X.fibers[ideal].pieces) e.comps.push_back(g.zero());
    e.comps[0] = X.K0(ideal).normalize(v);
    return e;
}

bool isVElem(const LatticedKModule& X, const VElem& a) {
    if (a.ideal >= X.lattice.size()) return false;
    const auto& F = X.fibers[a.ideal];
    if (a.comps.size() != F.pieceCount()) return false;
    for (std::size_t p = 0; p < a.comps.size(); ++p)
        if (a.comps[p].size() != F.pieces[p].ngens()) return false;
    return X.layers[a.ideal].membership(a.comps[0]) != Membership::Out;
}

std::string vElemStr(const LatticedKModule& X, const VElem& a) {
    std::string s = "[" + X.lattice.names[a.ideal] + ": " + vecStr(a.comps[0]);
    bool aux = false;
    for (std::size_t p = 1; p < a.comps.size(); ++p)
        if (!X.fibers[a.ideal].pieces[p].isZero(a.comps[p])) aux = true;
    if (aux) {
        s += " |";
        for (std::size_t p = 1; p < a.comps.size(); ++p) s += " " + vecStr(a.comps[p]);
    }
    return s + "]";
}

VElem pushV(const LatticedKModule& X, const VElem& a, std::size_t J) {
    const auto& d = X.d(a.ideal, J);
    VElem r;
    r.ideal = J;
    for (std::size_t p = 0; p < a.comps.size(); ++p) r.comps.push_back(d.comp[p].apply(a.comps[p]));
    return r;
}

VElem addV(const LatticedKModule& X, const VElem& a, const VElem& b) {
    std::size_t J = X.lattice.join(a.ideal, b.ideal);
    VElem x = pushV(X, a, J), y = pushV(X, b, J);
    VElem r;
    r.ideal = J;
    for (std::size_t p = 0; p < x.comps.size(); ++p)
        r.comps.push_back(X.fibers[J].pieces[p].normalize(addv(x.comps[p], y.comps[p])));
    if (X.layers[J].membership(r.comps[0]) == Membership::Out)
        throw std::logic_error("layer closure violated at " + X.lattice.names[J] + " by " + vElemStr(X, r));
    return r;
}

VElem multipleV(const LatticedKModule& X, long k, const VElem& a) {
    VElem r = neutralV(X);
    for (long i = 0; i < k; ++i) r = addV(X, r, a);
    return r;
}

bool leqV(const LatticedKModule& X, const VElem& a, const VElem& b) {
    const auto& L = X.lattice;
    if (!L.le(a.ideal, b.ideal)) return false;
    VElem pa = pushV(X, a, b.ideal);
    for (std::size_t p = 1; p < pa.comps.size(); ++p)
        if (pa.comps[p] != b.comps[p]) return false;
    const FgAbGroup& G = X.K0(b.ideal);
    Vec t = G.normalize(subv(b.comps[0], pa.comps[0]));
    for (std::size_t K = 0; K < L.size(); ++K) {
        if (!L.le(K, b.ideal) || L.join(a.ideal, K) != b.ideal) continue;
        if (K == L.bottom) {
            if (G.isZero(t)) return true;
            continue;
        }
        if (pushforward(X.d(K, b.ideal).comp[0], X.layers[K]).membership(t) == Membership::In) return true;
    }
    return false;
}

std::vector<VElem> enumerateLayer(const LatticedKModule& X, std::size_t ideal, long bound) {
    if (ideal == X.lattice.bottom) return {neutralV(X)};
    const auto& S = X.layers[ideal];
    std::set<Vec> els = S.ambient.isFinite() ? S.elementsFinite() : S.enumerate(bound);
    std::vector<VElem> out;
    for (auto& v : els) out.push_back(positiveV(X, ideal, v));
    return out;
}

std::vector<VElem> enumeratePositive(const LatticedKModule& X, long bound) {
    std::vector<VElem> out;
    for (std::size_t I = 0; I < X.lattice.size(); ++I) {
        auto l = enumerateLayer(X, I, bound);
        out.insert(out.end(), l.begin(), l.end());
    }
    return out;
}

// ---------------------------------------------------------------- validation

namespace {

// layer generators: every offset, and every offset plus one period
std::vector<Vec> layerGenerators(const SemilinearSet& s) {
    std::vector<Vec> out;
    for (auto& c : s.components) {
        out.push_back(c.offset);
        for (auto& p : c.periods) out.push_back(s.ambient.normalize(addv(c.offset, p)));
    }
    return out;
}

void checkScale(const LatticedKModule& X, Report& r) {
    const auto& L = X.lattice;
    const Scale& S = X.scale;
    if (S.kind == Scale::Kind::None) {
        r.add("scale: none declared", true);
        return;
    }
    bool shapes = true;
    for (auto& g : S.gens) {
        bool ok = isVElem(X, g);
        for (std::size_t p = 1; ok && p < g.comps.size(); ++p) ok = X.fibers[g.ideal].pieces[p].isZero(g.comps[p]);
        shapes = shapes && ok;
    }
    if (S.kind == Scale::Kind::Unit) {
        r.add("scale: unit is a single positive element", S.gens.size() == 1 && shapes);
        if (S.gens.size() != 1 || !shapes) return;
        r.add("scale: unit is full in the top ideal", S.gens[0].ideal == L.top);
    } else {
        r.add("scale: generators are positive elements", shapes);
        if (!shapes) return;
        bool directed = true;
        for (auto& a : S.gens)
            for (auto& b : S.gens) {
                bool up = false;
                for (auto& c : S.gens) up = up || (leqV(X, a, c) && leqV(X, b, c));
                directed = directed && up;
            }
        r.add("scale: upper directed on generators", directed);
    }
    if (S.gens.empty()) return;  // the whole positive part
    // fullness on layer generators: x <= k e for some k <= 20
    bool full = true;
    std::string bad;
    for (std::size_t I = 0; I < L.size() && full; ++I) {
        if (I == L.bottom) continue;
        for (auto& v : layerGenerators(X.layers[I])) {
            VElem x = positiveV(X, I, v);
            bool hit = false;
            for (auto& e : S.gens) {
                VElem ke = neutralV(X);
                for (int k = 0; k <= 20 && !hit; ++k) {
                    hit = leqV(X, x, ke);
                    ke = addV(X, ke, e);
                }
                if (hit) break;
            }
            if (!hit) {
                full = false;
                bad = vElemStr(X, x);
                break;
            }
        }
    }
    r.add("scale: full on layer generators (k <= 20)", full, bad);
    if (X.allFinite()) {
        auto F = finitizeV(X);
        auto P = algebraicPreorder(F.monoid);
        Subset delta(F.monoid.size(), false);
        for (std::size_t x = 0; x < F.elems.size(); ++x)
            for (auto& g : S.gens) {
                auto it = std::find(F.elems.begin(), F.elems.end(), g);
                if (it != F.elems.end() && P(x, std::size_t(it - F.elems.begin()))) delta[x] = true;
            }
        r.add("scale: scale axioms on the finite monoid", isScale(F.monoid, P, delta));
    }
}

}  // namespace

Report validateLatticedKModule(const LatticedKModule& X) {
    Report r;
    const auto& L = X.lattice;
    std::size_t n = L.size();
    r.append(checkLattice(L));
    bool shape = X.fibers.size() == n && X.layers.size() == n && X.infiniteAllowed.size() == n;
    r.add("shape: one fiber, layer and flag per ideal", shape);
    if (!shape) return r;
    for (std::size_t I = 0; I < n; ++I) {
        const auto& F = X.fibers[I];
        std::string tag = "fiber " + L.names[I] + ": ";
        r.add(tag + "coefficients match", F.N == X.N);
        if (!(F.N == X.N)) return r;
        r.append(validateLambdaModule(F), tag);
        r.add(tag + "layer lives in K0", X.layers[I].ambient.sameType(F.G(0)));
    }
    bool bottomZero = true;
    for (auto& g : X.fibers[L.bottom].pieces) bottomZero = bottomZero && g.isTrivial();
    r.add("bottom ideal has zero total K-theory", bottomZero);
    r.add("bottom layer is the neutral element alone", !X.layers[L.bottom].isEmpty());

    // connecting maps
    bool present = true;
    for (std::size_t I = 0; I < n; ++I)
        for (std::size_t J = 0; J < n; ++J)
            if (L.le(I, J) && !X.delta.count({I, J})) present = false;
    r.add("connecting maps present for every I <= J", present);
    if (!present) return r;
    for (auto& [key, f] : X.delta) {
        auto [I, J] = key;
        std::string tag = "delta " + L.names[I] + "->" + L.names[J] + ": ";
        bool ok = L.le(I, J) && f.comp.size() == X.pieceCount();
        for (std::size_t p = 0; ok && p < f.comp.size(); ++p)
            ok = f.comp[p].src.sameType(X.fibers[I].pieces[p]) && f.comp[p].dst.sameType(X.fibers[J].pieces[p]) &&
                 f.comp[p].wellDefined();
        r.add(tag + "shape", ok);
        if (!ok) return r;
        r.add(tag + "Lambda-linear", checkLambdaLinear(X.fibers[I], X.fibers[J], f));
        if (I == J) r.add(tag + "identity", equalMorphisms(f, identityMorphism(X.fibers[I])));
    }
    bool functorial = true;
    std::string bad;
    for (std::size_t I = 0; I < n; ++I)
        for (std::size_t J = 0; J < n; ++J)
            for (std::size_t K = 0; K < n; ++K)
                if (L.le(I, J) && L.le(J, K) && !equalMorphisms(compose(X.d(J, K), X.d(I, J)), X.d(I, K))) {
                    functorial = false;
                    bad = L.names[I] + "<=" + L.names[J] + "<=" + L.names[K];
                }
    r.add("delta functorial", functorial, bad);
    bool squares = true;
    for (std::size_t I = 0; I < n; ++I)
        for (std::size_t J = 0; J < n; ++J) {
            std::size_t m = L.meet(I, J), j = L.join(I, J);
            if (!equalMorphisms(compose(X.d(J, j), X.d(m, J)), compose(X.d(I, j), X.d(m, I)))) squares = false;
        }
    r.add("meet/join squares commute", squares);

    // layers
    for (std::size_t I = 0; I < n; ++I) {
        if (I == L.bottom) continue;
        std::string tag = "layer " + L.names[I] + ": ";
        r.add(tag + "nonempty", !X.layers[I].isEmpty());
        auto zero = X.layers[I].membership(X.K0(I).zero());
        if (!X.infiniteAllowed[I])
            r.add(tag + "omits the zero class", zero != Membership::In,
                  zero == Membership::Unknown ? "undecided within bound" : "");
    }
    bool closed = true;
    std::string undecided;
    for (std::size_t I = 0; I < n && closed; ++I)
        for (std::size_t J = I; J < n && closed; ++J) {
            if (I == L.bottom || J == L.bottom) continue;
            std::size_t K = L.join(I, J);
            const auto& dI = X.d(I, K).comp[0];
            const auto& dJ = X.d(J, K).comp[0];
            for (auto& x : layerGenerators(X.layers[I]))
                for (auto& c : X.layers[J].components) {
                    Vec s = X.K0(K).normalize(addv(dI.apply(x), dJ.apply(c.offset)));
                    auto m = X.layers[K].membership(s);
                    if (m == Membership::Out) {
                        closed = false;
                        bad = L.names[I] + " + " + L.names[J] + " gives " + vecStr(s);
                    }
                    if (m == Membership::Unknown) undecided = "undecided within bound at " + L.names[K];
                }
        }
    r.add("layer closure under addition", closed, closed ? undecided : bad);
    if (!r.ok()) return r;  // the scale checks add elements
    checkScale(X, r);
    return r;
}

std::vector<IdealOfLatticed> idealsOfLatticed(const LatticedKModule& X) {
    std::vector<IdealOfLatticed> out;
    for (std::size_t I = 0; I < X.lattice.size(); ++I) out.push_back({I, restrictTo(X, I)});
    return out;
}

// ---------------------------------------------------------------- finite model

Finitized finitizeV(const LatticedKModule& X, long cap) {
    Finitized out;
    const auto& L = X.lattice;
    if (!X.allFinite() || cap > 0) {
        bool infiniteK0 = false;
        for (std::size_t I = 0; I < L.size(); ++I) infiniteK0 = infiniteK0 || !X.K0(I).isFinite();
        if (infiniteK0 && cap <= 0) throw std::invalid_argument("unbounded layer without cap");
        if (cap > 0) {
            Int m = 1;
            for (std::size_t I = 0; I < L.size(); ++I)
                for (auto& d : X.K0(I).torsion) m = lcm(m, d);
            out.modulus = cap * toLong(m);
        }
    }
    long m = out.modulus;
    auto reduce = [&](std::size_t I, Vec v) {
        const FgAbGroup& G = X.K0(I);
        v = G.normalize(v);
        if (m > 0)
            for (std::size_t i = 0; i < G.rank; ++i) {
                v[i] = v[i] % m;
                if (v[i] < 0) v[i] += m;
            }
        return v;
    };
    std::map<std::pair<std::size_t, Vec>, std::size_t> idx;
    for (std::size_t I = 0; I < L.size(); ++I) {
        std::set<Vec> seen;
        if (I == L.bottom) {
            seen.insert(X.K0(I).zero());
        } else {
            for (auto& c : X.layers[I].components) {
                Vec o = reduce(I, c.offset);
                std::vector<Vec> todo{o};
                seen.insert(o);
                while (!todo.empty()) {
                    Vec v = todo.back();
                    todo.pop_back();
                    for (auto& p : c.periods) {
                        Vec u = reduce(I, addv(v, p));
                        if (seen.insert(u).second) todo.push_back(u);
                    }
                    if (seen.size() > 4096) throw std::length_error("finite model too large");
                }
            }
        }
        for (auto& v : seen) {
            idx[{I, v}] = out.elems.size();
            out.elems.push_back(positiveV(X, I, v));
        }
    }
    std::size_t n = out.elems.size();
    std::vector<std::string> names;
    for (auto& e : out.elems) names.push_back(L.names[e.ideal] + ":" + vecStr(e.comps[0]));
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const VElem& x = out.elems[a];
            const VElem& y = out.elems[b];
            std::size_t J = L.join(x.ideal, y.ideal);
            Vec s = reduce(J, addv(X.d(x.ideal, J).comp[0].apply(x.comps[0]), X.d(y.ideal, J).comp[0].apply(y.comps[0])));
            auto it = idx.find({J, s});
            if (it == idx.end()) throw std::logic_error("finite model is not closed under addition");
            t[a][b] = it->second;
        }
    out.monoid = FiniteMonoid(names, idx.at({L.bottom, X.K0(L.bottom).zero()}), t);
    return out;
}

// ---------------------------------------------------------------- recovery

GrRecovery grothendieckRecover(const LatticedKModule& X, long bound) {
    GrRecovery out;
    const auto& L = X.lattice;
    std::size_t T = L.top;
    out.fiber = X.fibers[T];
    const FgAbGroup& G = X.K0(T);
    std::vector<LinearComponent> pushed;
    for (std::size_t I = 0; I < L.size(); ++I) {
        if (I == L.bottom) continue;
        auto s = pushforward(X.d(I, T).comp[0], X.layers[I]);
        for (auto& c : s.components) pushed.push_back(c);
    }
    if (pushed.size() > 16) throw std::length_error("too many layer components for the cone description");
    out.positiveCone = SemilinearSet(G);
    out.positiveCone.add(G.zero(), {});
    for (unsigned long mask = 1; mask < (1UL << pushed.size()); ++mask) {
        Vec o = G.zero();
        std::vector<Vec> ps;
        for (std::size_t i = 0; i < pushed.size(); ++i)
            if (mask >> i & 1) {
                o = addv(o, pushed[i].offset);
                ps.push_back(pushed[i].offset);
                for (auto& p : pushed[i].periods) ps.push_back(p);
            }
        out.positiveCone.add(o, ps);
    }
    std::vector<Vec> gens;
    for (auto& c : pushed) {
        gens.push_back(c.offset);
        for (auto& p : c.periods) gens.push_back(p);
    }
    out.generatesTop = true;
    for (std::size_t i = 0; i < G.ngens(); ++i) {
        Vec e = G.zero();
        e[i] = 1;
        if (!inSubgroup(G, gens, e)) out.generatesTop = false;
    }
    if (X.scale.kind != Scale::Kind::None) {
        std::set<Vec> img;
        for (auto& x : enumeratePositive(X, bound)) {
            bool in = X.scale.gens.empty();
            for (auto& e : X.scale.gens) in = in || leqV(X, x, e);
            if (in) img.insert(X.d(x.ideal, T).comp[0].apply(x.comps[0]));
        }
        out.scaleImage.assign(img.begin(), img.end());
        out.scaleBounded = !X.allFinite();
    }
    return out;
}

// ---------------------------------------------------------------- morphisms

VElem applyV(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f, const VElem& a) {
    (void)X;
    VElem r;
    r.ideal = f.latticeMap.at(a.ideal);
    const auto& m = f.fiberMaps.at(a.ideal);
    for (std::size_t p = 0; p < a.comps.size(); ++p) r.comps.push_back(m.comp[p].apply(a.comps[p]));
    (void)Y;
    return r;
}

namespace {

Report checkVMorphismImpl(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f, bool scaled,
                          bool lambda) {
    Report r;
    const auto& LX = X.lattice;
    const auto& LY = Y.lattice;
    std::size_t n = LX.size();
    bool shape = f.latticeMap.size() == n && f.fiberMaps.size() == n && X.N == Y.N;
    for (std::size_t I = 0; shape && I < n; ++I) {
        shape = f.latticeMap[I] < LY.size() && f.fiberMaps[I].comp.size() == X.pieceCount();
        for (std::size_t p = 0; shape && p < X.pieceCount(); ++p)
            shape = f.fiberMaps[I].comp[p].src.sameType(X.fibers[I].pieces[p]) &&
                    f.fiberMaps[I].comp[p].dst.sameType(Y.fibers[f.latticeMap[I]].pieces[p]);
    }
    r.add("shape", shape);
    if (!shape) throw std::invalid_argument("V-morphism shape mismatch");
    const auto& s = f.latticeMap;
    r.add("lattice map keeps the bottom", s[LX.bottom] == LY.bottom);
    bool mono = true, joins = true;
    for (std::size_t I = 0; I < n; ++I)
        for (std::size_t J = 0; J < n; ++J) {
            if (LX.le(I, J) && !LY.le(s[I], s[J])) mono = false;
            if (s[LX.join(I, J)] != LY.join(s[I], s[J])) joins = false;
        }
    r.add("lattice map monotone", mono);
    r.add("lattice map preserves joins", joins);
    bool wd = true, lin = true;
    for (std::size_t I = 0; I < n; ++I) {
        if (!isGradedMorphism(X.fibers[I], Y.fibers[s[I]], f.fiberMaps[I])) wd = false;
        else if (lambda && !checkLambdaLinear(X.fibers[I], Y.fibers[s[I]], f.fiberMaps[I])) lin = false;
    }
    r.add("fiber maps are group homomorphisms", wd);
    if (lambda) r.add("fiber maps Lambda-linear", lin);
    bool natural = true;
    std::string bad;
    for (std::size_t I = 0; I < n; ++I)
        for (std::size_t J = 0; J < n; ++J)
            if (LX.le(I, J) &&
                !equalMorphisms(compose(f.fiberMaps[J], X.d(I, J)), compose(Y.d(s[I], s[J]), f.fiberMaps[I]))) {
                natural = false;
                bad = LX.names[I] + "<=" + LX.names[J];
            }
    r.add("commutes with connecting maps", natural, bad);
    bool layers = true;
    std::string note;
    for (std::size_t I = 0; I < n; ++I) {
        if (I == LX.bottom) continue;
        auto m = containedIn(f.fiberMaps[I].comp[0], X.layers[I], Y.layers[s[I]]);
        if (m == Membership::Out) {
            layers = false;
            note = "layer " + LX.names[I];
        }
        if (m == Membership::Unknown) note = "undecided within bound at " + LX.names[I];
    }
    r.add("layers map into layers", layers, note);
    if (!(wd && natural && layers && joins)) return r;
    bool order = true;
    for (std::size_t I = 0; I < n && order; ++I)
        for (std::size_t J = 0; J < n && order; ++J) {
            if (I == LX.bottom || J == LX.bottom) continue;
            for (auto& ox : X.layers[I].components)
                for (auto& oy : X.layers[J].components) {
                    VElem x = positiveV(X, I, ox.offset), y = positiveV(X, J, oy.offset);
                    VElem fx = applyV(X, Y, f, x), fxy = applyV(X, Y, f, addV(X, x, y));
                    if (!leqV(Y, fx, fxy)) order = false;
                    if (!(addV(Y, fx, applyV(X, Y, f, y)) == fxy)) order = false;
                }
        }
    r.add("additive and order preserving on layer generators", order);
    if (scaled) {
        bool ok = true;
        if (X.scale.kind != Scale::Kind::None) {
            if (Y.scale.kind == Scale::Kind::None) ok = false;
            for (auto& g : X.scale.gens) {
                if (!ok) break;
                VElem fg = applyV(X, Y, f, g);
                bool hit = Y.scale.gens.empty();
                for (auto& e : Y.scale.gens) hit = hit || leqV(Y, fg, e);
                ok = hit;
            }
        }
        r.add("scale maps into scale", ok);
    }
    return r;
}

}  // namespace

Report checkVMorphism(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f, bool scaled,
                      bool lambdaLinear) {
    return checkVMorphismImpl(X, Y, f, scaled, lambdaLinear);
}

VMorphism identityV(const LatticedKModule& X) {
    VMorphism f;
    for (std::size_t I = 0; I < X.lattice.size(); ++I) {
        f.latticeMap.push_back(I);
        f.fiberMaps.push_back(identityMorphism(X.fibers[I]));
    }
    return f;
}

VMorphism inverseV(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f) {
    (void)X;
    std::size_t n = Y.lattice.size();
    VMorphism g;
    g.latticeMap.assign(n, 0);
    g.fiberMaps.assign(n, {});
    std::vector<bool> hit(n, false);
    for (std::size_t I = 0; I < f.latticeMap.size(); ++I) {
        std::size_t K = f.latticeMap[I];
        if (K >= n || hit[K]) throw std::invalid_argument("lattice map is not bijective");
        hit[K] = true;
        g.latticeMap[K] = I;
        for (auto& c : f.fiberMaps[I].comp) g.fiberMaps[K].comp.push_back(inverse(c));
    }
    if (f.latticeMap.size() != n) throw std::invalid_argument("lattice map is not bijective");
    return g;
}

// ---------------------------------------------------------------- exactness

ExactnessReport checkVExactness(const LatticedKModule& X, const LatticedKModule& Y, const LatticedKModule& Z,
                                const VMorphism& iota, const VMorphism& pi, long bound) {
    ExactnessReport out;
    Report& r = out.report;
    if (iota.latticeMap.size() != X.lattice.size() || pi.latticeMap.size() != Y.lattice.size())
        throw std::invalid_argument("morphisms are not composable");
    r.append(checkVMorphism(X, Y, iota, false), "iota: ");
    r.append(checkVMorphism(Y, Z, pi, false), "pi: ");
    const auto& LY = Y.lattice;
    const auto& LZ = Z.lattice;
    // iota injective
    bool inj = true;
    std::set<std::size_t> img;
    for (std::size_t I = 0; I < X.lattice.size(); ++I) {
        if (!img.insert(iota.latticeMap[I]).second) inj = false;
        for (auto& c : iota.fiberMaps[I].comp)
            if (!c.isInjective()) inj = false;
    }
    r.add("iota injective", inj);
    // pi hits every layer generator of Z
    bool onto = true;
    std::string miss;
    for (std::size_t K = 0; K < LZ.size(); ++K) {
        if (K == LZ.bottom) continue;
        for (auto& t : layerGenerators(Z.layers[K])) {
            bool hit = false;
            for (std::size_t J = 0; J < LY.size() && !hit; ++J)
                if (pi.latticeMap[J] == K)
                    hit = pushforward(pi.fiberMaps[J].comp[0], Y.layers[J]).membership(t) == Membership::In;
            if (!hit) {
                onto = false;
                miss = LZ.names[K] + ":" + vecStr(t);
            }
        }
    }
    r.add("pi reaches the positive generators of the quotient", onto, miss);
    // kernel of pi equals image of iota
    std::set<std::size_t> ker;
    for (std::size_t J = 0; J < LY.size(); ++J)
        if (pi.latticeMap[J] == LZ.bottom) ker.insert(J);
    r.add("Ker(pi) and Im(iota) have the same ideals", ker == img);
    bool layersEq = true;
    std::string note;
    for (std::size_t I = 0; I < X.lattice.size(); ++I) {
        if (I == X.lattice.bottom) continue;
        std::size_t J = iota.latticeMap[I];
        auto fwd = containedIn(iota.fiberMaps[I].comp[0], X.layers[I], Y.layers[J], bound);
        if (fwd == Membership::Out) layersEq = false;
        SemilinearSet im = pushforward(iota.fiberMaps[I].comp[0], X.layers[I]);
        auto back = containedIn(AbHom::identity(Y.K0(J)), Y.layers[J], im, bound);
        if (back == Membership::Out) layersEq = false;
        if (!layersEq) note = "layer " + LY.names[J];
        if (fwd == Membership::Unknown || back == Membership::Unknown) note = "checked up to coefficient bound " + std::to_string(bound);
    }
    r.add("Ker(pi) and Im(iota) have the same layers", layersEq, note);
    bool zeroComp = true;
    for (std::size_t I = 0; I < X.lattice.size(); ++I)
        if (pi.latticeMap[iota.latticeMap[I]] != LZ.bottom) zeroComp = false;
    r.add("pi after iota is zero", zeroComp);
    return out;
}

// ---------------------------------------------------------------- infiniteness and cancellation

namespace {

// quotient of K0(J) by the images of all strictly smaller ideals
AbHom lowerQuotient(const LatticedKModule& X, std::size_t J) {
    const FgAbGroup& G = X.K0(J);
    std::vector<Vec> cols;
    IntegerMatrix rel = G.relations();
    for (std::size_t c = 0; c < rel.cols; ++c) cols.push_back(rel.column(c));
    for (std::size_t I = 0; I < X.lattice.size(); ++I)
        if (I != J && X.lattice.le(I, J)) {
            const auto& m = X.d(I, J).comp[0].mat;
            for (std::size_t c = 0; c < m.cols; ++c) cols.push_back(m.column(c));
        }
    FgAbGroup Q = cols.empty() ? canonicalGroup(G.rank, G.torsion) : cokernel(matrixFromColumns(G.ngens(), cols));
    if (cols.empty()) return AbHom::identity(G);
    return AbHom(G, canonicalGroup(Q.rank, Q.torsion), Q.toCanon);
}

// is f injective on the subgroup generated by gens?
bool injectiveOn(const AbHom& f, const std::vector<Vec>& gens) {
    if (gens.empty()) return true;
    FgAbGroup F = canonicalGroup(gens.size(), {});
    AbHom inc(F, f.src, matrixFromColumns(f.src.ngens(), gens));
    for (auto& k : compose(f, inc).kernelGens())
        if (!f.src.isZero(inc.apply(k))) return false;
    return true;
}

}  // namespace

Detection detectInfinite(const LatticedKModule& X) {
    Detection out;
    const auto& L = X.lattice;
    for (std::size_t I = 0; I < L.size() && !out.verdict; ++I) {
        if (I == L.bottom) continue;
        for (std::size_t J = 0; J < L.size() && !out.verdict; ++J) {
            if (!L.le(I, J) || X.layers[J].isEmpty()) continue;
            auto m = pushforward(X.d(I, J).comp[0], X.layers[I]).membership(X.K0(J).zero());
            if (m == Membership::In) {
                out.verdict = true;
                out.witness = "x in layer " + L.names[J] + " absorbs z != 0 from layer " + L.names[I];
            }
            if (m == Membership::Unknown) out.exact = false;
        }
    }
    if (out.verdict) out.exact = true;
    for (std::size_t J = 0; J < L.size(); ++J) {
        if (J == L.bottom) continue;
        auto q = lowerQuotient(X, J);
        auto m = pushforward(q, X.layers[J]).membership(q.dst.zero());
        out.quotientInfinite.push_back({L.names[J], m == Membership::In});
    }
    return out;
}

Detection detectCancellation(const LatticedKModule& X, long bound) {
    Detection out;
    out.verdict = true;
    auto inf = detectInfinite(X);
    if (inf.verdict) {
        out.verdict = false;
        out.witness = "infinite element: " + inf.witness;
        return out;
    }
    out.exact = inf.exact;
    const auto& L = X.lattice;
    std::size_t n = L.size();
    // same ideal: distinct elements of one layer identified by a connecting map
    for (std::size_t I = 0; I < n && out.verdict; ++I) {
        if (I == L.bottom) continue;
        std::vector<Vec> diffs;
        const auto& S = X.layers[I];
        for (auto& c : S.components) {
            diffs.push_back(subv(c.offset, S.components[0].offset));
            for (auto& p : c.periods) diffs.push_back(p);
        }
        for (std::size_t Lc = 0; Lc < n && out.verdict; ++Lc) {
            std::size_t K = L.join(I, Lc);
            if (K == I || X.layers[Lc].isEmpty()) continue;
            const AbHom& f = X.d(I, K).comp[0];
            if (injectiveOn(f, diffs)) continue;
            for (auto& c : S.components)
                for (auto& p : c.periods)
                    if (!S.ambient.isZero(p) && X.K0(K).isZero(f.apply(p)) && out.verdict) {
                        out.verdict = false;
                        out.witness = "period " + vecStr(p) + " of layer " + L.names[I] + " dies in " + L.names[K];
                    }
            if (!out.verdict) break;
            std::map<Vec, Vec> seen;
            std::set<Vec> els = S.ambient.isFinite() ? S.elementsFinite() : S.enumerate(bound);
            for (auto& v : els) {
                Vec w = f.apply(v);
                auto it = seen.find(w);
                if (it != seen.end() && it->second != v) {
                    out.verdict = false;
                    out.witness = vecStr(v) + " and " + vecStr(it->second) + " in layer " + L.names[I] +
                                  " agree in " + L.names[K];
                    break;
                }
                seen[w] = v;
            }
            if (out.verdict && !S.ambient.isFinite()) out.exact = false;
        }
    }
    // different ideals Ia != Ib with a common join through some Ic and meeting images
    for (std::size_t A = 0; A < n && out.verdict; ++A)
        for (std::size_t B = A + 1; B < n && out.verdict; ++B)
            for (std::size_t C = 0; C < n && out.verdict; ++C) {
                std::size_t K = L.join(A, C);
                if (K != L.join(B, C) || X.layers[C].isEmpty()) continue;
                auto sa = A == L.bottom ? SemilinearSet::point(X.K0(K), X.K0(K).zero())
                                        : pushforward(X.d(A, K).comp[0], X.layers[A]);
                auto sb = B == L.bottom ? SemilinearSet::point(X.K0(K), X.K0(K).zero())
                                        : pushforward(X.d(B, K).comp[0], X.layers[B]);
                for (auto& ca : sa.components) {
                    for (auto& cb : sb.components) {
                        std::vector<Vec> gens = cb.periods;
                        for (auto& p : ca.periods) {
                            Vec q = p;
                            for (auto& x : q) x = -x;
                            gens.push_back(q);
                        }
                        auto m = inMonoid(X.K0(K), gens, X.K0(K).normalize(subv(ca.offset, cb.offset)));
                        if (m == Membership::In) {
                            out.verdict = false;
                            out.witness = "layers " + L.names[A] + " and " + L.names[B] + " meet in " + L.names[K];
                        }
                        if (m == Membership::Unknown) out.exact = false;
                        if (!out.verdict) break;
                    }
                    if (!out.verdict) break;
                }
            }
    if (!out.verdict) out.exact = true;
    return out;
}

// ---------------------------------------------------------------- isomorphism search

const char* modeName(CompareMode m) {
    switch (m) {
        case CompareMode::Graded: return "graded";
        case CompareMode::Lambda: return "lambda";
        default: return "latticed";
    }
}

CompareMode parseMode(const std::string& s) {
    if (s == "graded") return CompareMode::Graded;
    if (s == "lambda") return CompareMode::Lambda;
    if (s == "latticed") return CompareMode::Latticed;
    throw std::invalid_argument("unknown compare mode " + s);
}

LatticedIsoResult isoSearchLatticed(const LatticedKModule& X, const LatticedKModule& Y, CompareMode mode,
                                    const IsoSearchOptions& opt) {
    LatticedIsoResult res;
    if (!(X.N == Y.N)) {
        res.reason = "coefficient sets differ";
        return res;
    }
    if (X.lattice.size() != Y.lattice.size()) {
        res.reason = "lattice sizes " + std::to_string(X.lattice.size()) + " vs " + std::to_string(Y.lattice.size());
        return res;
    }
    if ((X.scale.kind == Scale::Kind::None) != (Y.scale.kind == Scale::Kind::None) && mode == CompareMode::Latticed) {
        res.reason = "only one side carries a scale";
        return res;
    }
    auto sigmas = latticeIsomorphisms(X.lattice, Y.lattice);
    if (sigmas.empty()) {
        res.reason = "ideal lattices are not isomorphic";
        return res;
    }
    res.complete = X.allFinite() && Y.allFinite();
    std::size_t n = X.lattice.size(), P = X.pieceCount();
    long long spent = 0;
    bool undecided = false, anyFibersMatch = false;
    for (auto& sigma : sigmas) {
        bool types = true;
        for (std::size_t I = 0; I < n && types; ++I)
            for (std::size_t p = 0; p < P && types; ++p)
                types = X.fibers[I].pieces[p].sameType(Y.fibers[sigma[I]].pieces[p]);
        if (!types) continue;
        anyFibersMatch = true;
        search::Problem prob;
        prob.budget = opt.budget - spent;
        for (std::size_t I = 0; I < n; ++I)
            for (std::size_t p = 0; p < P; ++p)
                prob.pieces.push_back(
                    {search::toSmall(X.fibers[I].pieces[p]), search::toSmall(Y.fibers[sigma[I]].pieces[p]), opt.freeBound});
        for (std::size_t I = 0; I < n; ++I)
            for (std::size_t J = 0; J < n; ++J) {
                if (!X.lattice.covers(I, J)) continue;
                for (std::size_t p = 0; p < P; ++p)
                    prob.edges.push_back({int(I * P + p), int(J * P + p), search::toSmall(X.d(I, J).comp[p].mat),
                                          search::toSmall(Y.d(sigma[I], sigma[J]).comp[p].mat)});
            }
        if (mode != CompareMode::Graded)
            for (std::size_t I = 0; I < n; ++I) {
                auto mx = X.fibers[I].structureMaps(), my = Y.fibers[sigma[I]].structureMaps();
                for (std::size_t k = 0; k < mx.size(); ++k)
                    prob.edges.push_back({int(I * P + mx[k].src), int(I * P + mx[k].dst), search::toSmall(mx[k].f->mat),
                                          search::toSmall(my[k].f->mat)});
            }
        prob.onPieceComplete = [&](int piece, const std::vector<search::SMat>& phi) {
            std::size_t I = std::size_t(piece) / P, p = std::size_t(piece) % P;
            if (p != 0 || I == X.lattice.bottom) return true;
            AbHom f(X.K0(I), Y.K0(sigma[I]), search::toBig(phi[piece]));
            auto a = containedIn(f, X.layers[I], Y.layers[sigma[I]]);
            if (a == Membership::Out) return false;
            auto b = containedIn(inverse(f), Y.layers[sigma[I]], X.layers[I]);
            if (b == Membership::Out) return false;
            if (a == Membership::Unknown || b == Membership::Unknown) {
                undecided = true;
                return false;
            }
            return true;
        };
        VMorphism found;
        prob.onComplete = [&](const std::vector<search::SMat>& phi) {
            VMorphism f;
            f.latticeMap = sigma;
            for (std::size_t I = 0; I < n; ++I) {
                LambdaMorphism m;
                for (std::size_t p = 0; p < P; ++p)
                    m.comp.emplace_back(X.fibers[I].pieces[p], Y.fibers[sigma[I]].pieces[p], search::toBig(phi[I * P + p]));
                f.fiberMaps.push_back(std::move(m));
            }
            bool scaled = mode == CompareMode::Latticed, lambda = mode != CompareMode::Graded;
            if (!checkVMorphismImpl(X, Y, f, scaled, lambda).ok()) return false;
            if (!checkVMorphismImpl(Y, X, inverseV(X, Y, f), scaled, lambda).ok()) return false;
            found = std::move(f);
            return true;
        };
        auto r = search::solve(prob);
        spent += r.nodes;
        res.nodes = spent;
        if (r.status == search::Status::BudgetExceeded) {
            res.outcome = SearchOutcome::BudgetExceeded;
            res.reason = "budget exceeded";
            return res;
        }
        if (r.status == search::Status::Found) {
            res.outcome = SearchOutcome::Found;
            res.witness = found;
            res.reason.clear();
            res.complete = true;
            return res;
        }
    }
    if (!anyFibersMatch) {
        res.reason = "fiber groups differ under every lattice isomorphism";
        res.complete = true;
    }
    else if (undecided) {
        res.reason = "no isomorphism found; some layer comparisons were undecided";
        res.complete = false;
    } else {
        res.reason = "no isomorphism respects fibers, connecting maps, layers" +
                     std::string(mode == CompareMode::Latticed ? " and scale" : "");
    }
    return res;
}

}  // namespace lkt
