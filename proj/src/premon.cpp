#include "lkt/premon.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lkt {

FiniteMonoid::FiniteMonoid(std::vector<std::string> ns, std::size_t z, std::vector<std::vector<std::size_t>> t)
    : names(std::move(ns)), neutral(z), add(std::move(t)) {
    std::size_t n = names.size();
    if (n == 0) throw std::invalid_argument("monoid needs at least the neutral element");
    if (neutral >= n) throw std::invalid_argument("neutral element out of range");
    if (add.size() != n) throw std::invalid_argument("Cayley table has wrong number of rows");
    for (auto& r : add) {
        if (r.size() != n) throw std::invalid_argument("Cayley table row has wrong length");
        for (auto x : r)
            if (x >= n) throw std::invalid_argument("Cayley table entry out of range");
    }
    for (std::size_t a = 0; a < n; ++a) {
        if (add[a][neutral] != a) throw std::invalid_argument("neutral law fails at " + names[a]);
        for (std::size_t b = 0; b < n; ++b) {
            if (add[a][b] != add[b][a]) throw std::invalid_argument("not commutative at " + names[a] + ", " + names[b]);
            for (std::size_t c = 0; c < n; ++c)
                if (add[add[a][b]][c] != add[a][add[b][c]])
                    throw std::invalid_argument("not associative at " + names[a] + ", " + names[b] + ", " + names[c]);
        }
    }
}

std::size_t FiniteMonoid::multiple(std::size_t k, std::size_t x) const {
    std::size_t r = neutral;
    for (std::size_t i = 0; i < k; ++i) r = add[r][x];
    return r;
}

std::size_t FiniteMonoid::indexOf(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("no element named " + name);
    return std::size_t(it - names.begin());
}

FiniteMonoid FiniteMonoid::capped(std::size_t cap) {
    std::vector<std::string> ns;
    std::vector<std::vector<std::size_t>> t(cap + 1, std::vector<std::size_t>(cap + 1));
    for (std::size_t a = 0; a <= cap; ++a) {
        ns.push_back(std::to_string(a));
        for (std::size_t b = 0; b <= cap; ++b) t[a][b] = std::min(a + b, cap);
    }
    return FiniteMonoid(ns, 0, t);
}

FiniteMonoid FiniteMonoid::zeroPlusCyclic(std::size_t n) {
    std::vector<std::string> ns{"0"};
    for (std::size_t k = 0; k < n; ++k) ns.push_back(std::to_string(k) + "~");
    std::vector<std::vector<std::size_t>> t(n + 1, std::vector<std::size_t>(n + 1));
    for (std::size_t a = 0; a <= n; ++a)
        for (std::size_t b = 0; b <= n; ++b) {
            if (a == 0)
                t[a][b] = b;
            else if (b == 0)
                t[a][b] = a;
            else
                t[a][b] = 1 + ((a - 1) + (b - 1)) % n;
        }
    return FiniteMonoid(ns, 0, t);
}

PreorderRelation algebraicPreorder(const FiniteMonoid& M) {
    PreorderRelation P;
    P.leq.assign(M.size(), std::vector<bool>(M.size(), false));
    for (std::size_t x = 0; x < M.size(); ++x)
        for (std::size_t z = 0; z < M.size(); ++z) P.leq[x][M(x, z)] = true;
    return P;
}

bool isCompatiblePreorder(const FiniteMonoid& M, const PreorderRelation& P) {
    std::size_t n = M.size();
    if (P.leq.size() != n) return false;
    for (std::size_t a = 0; a < n; ++a) {
        if (P.leq[a].size() != n || !P(a, a)) return false;
        for (std::size_t b = 0; b < n; ++b) {
            if (!P(a, b)) continue;
            for (std::size_t c = 0; c < n; ++c) {
                if (P(b, c) && !P(a, c)) return false;
                if (!P(M(a, c), M(b, c))) return false;
            }
        }
    }
    return true;
}

PreorderRelation explicitPreorder(const FiniteMonoid& M, std::vector<std::vector<bool>> table) {
    PreorderRelation P{std::move(table), false};
    if (!isCompatiblePreorder(M, P)) throw std::invalid_argument("supplied relation is not a compatible pre-order");
    return P;
}

bool isPositivelyDirected(const FiniteMonoid& M, const PreorderRelation& P) {
    for (std::size_t x = 0; x < M.size(); ++x) {
        bool ok = false;
        for (std::size_t p = 0; p < M.size() && !ok; ++p) ok = P(M.neutral, M(x, p));
        if (!ok) return false;
    }
    return true;
}

namespace {

bool isSubmonoid(const FiniteMonoid& M, const Subset& s) {
    if (!s[M.neutral]) return false;
    for (std::size_t a = 0; a < M.size(); ++a)
        if (s[a])
            for (std::size_t b = 0; b < M.size(); ++b)
                if (s[b] && !s[M(a, b)]) return false;
    return true;
}

template <class Pred>
std::vector<Subset> scanSubsets(const FiniteMonoid& M, Pred keep) {
    std::size_t n = M.size();
    if (n > 20) throw std::invalid_argument("monoid too large for exhaustive ideal scan");
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < n; ++i)
        if (i != M.neutral) others.push_back(i);
    std::vector<Subset> out;
    for (unsigned long mask = 0; mask < (1UL << others.size()); ++mask) {
        Subset s(n, false);
        s[M.neutral] = true;
        for (std::size_t k = 0; k < others.size(); ++k)
            if (mask >> k & 1) s[others[k]] = true;
        if (isSubmonoid(M, s) && keep(s)) out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const Subset& a, const Subset& b) {
        auto ca = std::count(a.begin(), a.end(), true), cb = std::count(b.begin(), b.end(), true);
        if (ca != cb) return ca < cb;
        return a > b;
    });
    return out;
}

bool allNonnegative(const FiniteMonoid& M, const PreorderRelation& P) {
    for (std::size_t x = 0; x < M.size(); ++x)
        if (!P(M.neutral, x)) return false;
    return true;
}

}  // namespace

std::vector<Subset> idealsByDefinition(const FiniteMonoid& M, const PreorderRelation& P) {
    if (!isPositivelyDirected(M, P)) throw std::invalid_argument("monoid is not positively directed");
    std::size_t n = M.size();
    return scanSubsets(M, [&](const Subset& s) {
        // (i) positively directed inside s, with the restricted order
        for (std::size_t x = 0; x < n; ++x) {
            if (!s[x]) continue;
            bool ok = false;
            for (std::size_t p = 0; p < n && !ok; ++p) ok = s[p] && P(M.neutral, M(x, p));
            if (!ok) return false;
        }
        // (ii) (x + P_x) meets s implies x in s
        for (std::size_t x = 0; x < n; ++x) {
            if (s[x]) continue;
            for (std::size_t y = 0; y < n; ++y)
                if (P(M.neutral, M(x, y)) && s[M(x, y)]) return false;
        }
        return true;
    });
}

std::vector<Subset> hereditarySubmonoids(const FiniteMonoid& M) {
    std::size_t n = M.size();
    return scanSubsets(M, [&](const Subset& s) {
        for (std::size_t x = 0; x < n; ++x)
            if (!s[x])
                for (std::size_t y = 0; y < n; ++y)
                    if (s[M(x, y)]) return false;
        return true;
    });
}

std::vector<Subset> idealsOf(const FiniteMonoid& M, const PreorderRelation& P, bool crossCheck) {
    if (!isPositivelyDirected(M, P)) throw std::invalid_argument("monoid is not positively directed");
    if (!allNonnegative(M, P)) return idealsByDefinition(M, P);
    auto fast = hereditarySubmonoids(M);
    if (crossCheck && fast != idealsByDefinition(M, P))
        throw std::logic_error("hereditary criterion disagrees with the ideal definition");
    return fast;
}

std::vector<Subset> idealsOf(const FiniteMonoid& M) { return idealsOf(M, algebraicPreorder(M)); }

Subset idealJoin(const std::vector<Subset>& ideals, const Subset& a, const Subset& b) {
    const Subset* best = nullptr;
    std::size_t bestSize = 0;
    for (auto& I : ideals) {
        bool contains = true;
        for (std::size_t x = 0; x < I.size() && contains; ++x)
            if ((a[x] || b[x]) && !I[x]) contains = false;
        if (!contains) continue;
        std::size_t sz = std::size_t(std::count(I.begin(), I.end(), true));
        if (!best || sz < bestSize) {
            best = &I;
            bestSize = sz;
        }
    }
    if (!best) throw std::invalid_argument("no ideal contains both subsets");
    return *best;
}

GrothendieckResult grothendieckFinite(const FiniteMonoid& M) {
    std::size_t n = M.size();
    // universal group: free abelian on the elements modulo e_a + e_b - e_{a+b} and e_0
    std::vector<Vec> rels;
    {
        Vec r(n, 0);
        r[M.neutral] = 1;
        rels.push_back(r);
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            Vec r(n, 0);
            r[a] += 1;
            r[b] += 1;
            r[M(a, b)] -= 1;
            rels.push_back(r);
        }
    GrothendieckResult out;
    out.group = cokernel(matrixFromColumns(n, rels));
    for (std::size_t x = 0; x < n; ++x) out.rho.push_back(out.group.normalize(out.group.toCanon.column(x)));
    out.group = canonicalGroup(out.group.rank, out.group.torsion);

    // pair quotient: (a,b) ~ (c,d) iff a + d + k == c + b + k for some k
    std::vector<std::size_t> cls(n * n, SIZE_MAX);
    for (std::size_t p = 0; p < n * n; ++p) {
        if (cls[p] != SIZE_MAX) continue;
        cls[p] = out.pairClasses;
        std::size_t a = p / n, b = p % n;
        for (std::size_t q = p + 1; q < n * n; ++q) {
            if (cls[q] != SIZE_MAX) continue;
            std::size_t c = q / n, d = q % n;
            std::size_t l = M(a, d), r = M(c, b);
            for (std::size_t k = 0; k < n; ++k)
                if (M(l, k) == M(r, k)) {
                    cls[q] = out.pairClasses;
                    break;
                }
        }
        ++out.pairClasses;
    }
    if (out.group.cardinality() != long(out.pairClasses))
        throw std::logic_error("Grothendieck group: presentation and pair quotient disagree");
    return out;
}

bool isScale(const FiniteMonoid& M, const PreorderRelation& P, const Subset& delta) {
    std::size_t n = M.size();
    std::vector<std::size_t> pos;
    for (std::size_t x = 0; x < n; ++x) {
        if (P(M.neutral, x)) pos.push_back(x);
        if (delta[x] && !P(M.neutral, x)) return false;
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (!delta[a] || !delta[b]) continue;
            bool up = false;
            for (std::size_t c = 0; c < n && !up; ++c) up = delta[c] && P(a, c) && P(b, c);
            if (!up) return false;
        }
    for (std::size_t x : pos)
        for (std::size_t y = 0; y < n; ++y)
            if (delta[y] && P(x, y) && !delta[x]) return false;
    // multiples k*y, 0 <= k <= n, already run through every value of the sequence
    for (std::size_t x : pos) {
        bool full = false;
        for (std::size_t y = 0; y < n && !full; ++y) {
            if (!delta[y]) continue;
            std::size_t ky = M.neutral;
            for (std::size_t k = 0; k <= n && !full; ++k, ky = M(ky, y)) full = P(x, ky);
        }
        if (!full) return false;
    }
    return true;
}

bool hasCancellation(const FiniteMonoid& M) {
    std::size_t n = M.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                if (M(a, c) == M(b, c)) return false;
    return true;
}

bool hasInfiniteElement(const FiniteMonoid& M) {
    for (std::size_t x = 0; x < M.size(); ++x)
        for (std::size_t z = 0; z < M.size(); ++z)
            if (z != M.neutral && M(x, z) == x) return true;
    return false;
}

}  // namespace lkt
