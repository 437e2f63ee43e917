#include "lkt/smallsearch.hpp"

#include <set>

namespace lkt::search {

bool SGroup::finite() const {
    for (long o : ord)
        if (o == 0) return false;
    return true;
}

long SGroup::cardinality() const {
    long c = 1;
    for (long o : ord) c *= o;
    return c;
}

void SGroup::normalize(std::vector<long>& v) const {
    for (std::size_t i = 0; i < ord.size(); ++i)
        if (ord[i]) {
            v[i] %= ord[i];
            if (v[i] < 0) v[i] += ord[i];
        }
}

SGroup toSmall(const FgAbGroup& g) {
    SGroup s;
    for (std::size_t i = 0; i < g.ngens(); ++i) s.ord.push_back(toLong(g.order(i)));
    return s;
}

SMat toSmall(const IntegerMatrix& m) {
    SMat s(m.rows, m.cols);
    for (std::size_t i = 0; i < m.a.size(); ++i) s.a[i] = toLong(m.a[i]);
    return s;
}

IntegerMatrix toBig(const SMat& m) {
    IntegerMatrix b(m.rows, m.cols);
    for (std::size_t i = 0; i < m.a.size(); ++i) b.a[i] = m.a[i];
    return b;
}

std::vector<std::vector<long>> candidateImages(const SGroup& g, long k, long freeBound) {
    // free coordinates run through 0, 1, -1, 2, -2, ...
    std::vector<long> freeVals{0};
    for (long b = 1; b <= freeBound; ++b) {
        freeVals.push_back(b);
        freeVals.push_back(-b);
    }
    std::vector<std::vector<long>> out;
    std::vector<std::size_t> idx(g.n(), 0);
    std::vector<long> cur(g.n(), 0);
    auto radix = [&](std::size_t i) -> std::size_t { return g.ord[i] ? std::size_t(g.ord[i]) : freeVals.size(); };
    for (;;) {
        for (std::size_t i = 0; i < g.n(); ++i) cur[i] = g.ord[i] ? long(idx[i]) : freeVals[idx[i]];
        bool ok = true;
        if (k != 0)
            for (std::size_t i = 0; i < g.n() && ok; ++i) {
                if (g.ord[i] == 0)
                    ok = cur[i] == 0;
                else
                    ok = (k % g.ord[i] * cur[i]) % g.ord[i] == 0;
            }
        if (ok) out.push_back(cur);
        std::size_t i = g.n();
        bool done = true;
        while (i > 0) {
            --i;
            if (++idx[i] < radix(i)) {
                done = false;
                break;
            }
            idx[i] = 0;
        }
        if (done) break;
    }
    return out;
}

bool surjective(const SGroup& src, const SGroup& dst, const SMat& m) {
    (void)src;
    if (dst.n() == 0) return true;
    if (dst.finite() && dst.cardinality() <= (1L << 14)) {
        std::set<std::vector<long>> seen;
        std::vector<std::vector<long>> frontier{std::vector<long>(dst.n(), 0)};
        seen.insert(frontier[0]);
        while (!frontier.empty()) {
            std::vector<std::vector<long>> next;
            for (auto& x : frontier)
                for (std::size_t j = 0; j < m.cols; ++j) {
                    std::vector<long> y = x;
                    for (std::size_t i = 0; i < dst.n(); ++i) y[i] += m(i, j);
                    dst.normalize(y);
                    if (seen.insert(y).second) next.push_back(y);
                }
            frontier.swap(next);
        }
        return long(seen.size()) == dst.cardinality();
    }
    FgAbGroup D;
    {
        std::vector<Int> tors;
        std::size_t rank = 0;
        for (long o : dst.ord) {
            if (o)
                tors.push_back(o);
            else
                ++rank;
        }
        D = canonicalGroup(rank, tors);
    }
    std::vector<Vec> gens;
    for (std::size_t j = 0; j < m.cols; ++j) {
        Vec c(dst.n());
        for (std::size_t i = 0; i < dst.n(); ++i) c[i] = m(i, j);
        gens.push_back(c);
    }
    for (std::size_t i = 0; i < dst.n(); ++i) {
        Vec e(dst.n(), 0);
        e[i] = 1;
        if (!inSubgroup(D, gens, e)) return false;
    }
    return true;
}

namespace {

struct Check {
    int edge;
    std::size_t gen;
};

struct Solver {
    const Problem& P;
    std::vector<std::pair<int, std::size_t>> slots;
    std::vector<std::vector<std::vector<long>>> cands;
    std::vector<std::vector<Check>> checksAt;
    std::vector<int> completesPiece;  // piece completed by this slot, or -1
    std::vector<SMat> phi;
    long long nodes = 0;
    bool overBudget = false;

    explicit Solver(const Problem& p) : P(p) {}

    bool evalCheck(const Check& c) const {
        const Edge& e = P.edges[c.edge];
        const SGroup& Qd = P.pieces[e.to].dst;
        const SMat& pq = phi[e.to];
        const SMat& pp = phi[e.from];
        std::vector<long> lhs(Qd.n(), 0), rhs(Qd.n(), 0);
        for (std::size_t k = 0; k < e.fx.rows; ++k) {
            long coef = e.fx(k, c.gen);
            if (!coef) continue;
            for (std::size_t i = 0; i < Qd.n(); ++i) lhs[i] += coef * pq(i, k);
        }
        for (std::size_t k = 0; k < e.fy.cols; ++k) {
            long v = pp(k, c.gen);
            if (!v) continue;
            for (std::size_t i = 0; i < Qd.n(); ++i) rhs[i] += e.fy(i, k) * v;
        }
        Qd.normalize(lhs);
        Qd.normalize(rhs);
        return lhs == rhs;
    }

    bool pieceOk(int p) {
        const Piece& pc = P.pieces[p];
        if (P.requireIso && !surjective(pc.src, pc.dst, phi[p])) return false;
        if (P.onPieceComplete && !P.onPieceComplete(p, phi)) return false;
        return true;
    }

    int rec(std::size_t s) {
        if (s == slots.size()) {
            if (P.onComplete && !P.onComplete(phi)) return 0;
            return 1;
        }
        auto [p, g] = slots[s];
        SMat& m = phi[p];
        for (auto& y : cands[s]) {
            if (++nodes > P.budget) {
                overBudget = true;
                return -1;
            }
            for (std::size_t i = 0; i < y.size(); ++i) m(i, g) = y[i];
            bool ok = true;
            for (auto& c : checksAt[s])
                if (!evalCheck(c)) {
                    ok = false;
                    break;
                }
            if (ok && completesPiece[s] >= 0) ok = pieceOk(completesPiece[s]);
            if (!ok) continue;
            int r = rec(s + 1);
            if (r != 0) return r;
        }
        for (std::size_t i = 0; i < m.rows; ++i) m(i, g) = 0;
        return 0;
    }
};

}  // namespace

Result solve(const Problem& P) {
    Result res;
    Solver S(P);
    std::size_t np = P.pieces.size();
    std::vector<std::vector<std::size_t>> slotOf(np);
    for (std::size_t p = 0; p < np; ++p) {
        const Piece& pc = P.pieces[p];
        if (P.requireIso && !(pc.src == pc.dst)) return res;  // Absent
        S.phi.emplace_back(pc.dst.n(), pc.src.n());
        for (std::size_t g = 0; g < pc.src.n(); ++g) {
            slotOf[p].push_back(S.slots.size());
            S.slots.push_back({int(p), g});
            S.cands.push_back(candidateImages(pc.dst, pc.src.ord[g], pc.freeBound));
        }
    }
    S.checksAt.assign(S.slots.size(), {});
    S.completesPiece.assign(S.slots.size(), -1);
    for (std::size_t p = 0; p < np; ++p)
        if (!slotOf[p].empty()) S.completesPiece[slotOf[p].back()] = int(p);
    // pieces without generators are complete from the start
    for (std::size_t p = 0; p < np; ++p)
        if (slotOf[p].empty() && !S.pieceOk(int(p))) return res;
    for (std::size_t ei = 0; ei < P.edges.size(); ++ei) {
        const Edge& e = P.edges[ei];
        for (std::size_t g = 0; g < P.pieces[e.from].src.n(); ++g) {
            std::size_t trig = slotOf[e.from][g];
            for (std::size_t k = 0; k < e.fx.rows; ++k)
                if (e.fx(k, g) != 0 && slotOf[e.to].size() > k) trig = std::max(trig, slotOf[e.to][k]);
            S.checksAt[trig].push_back({int(ei), g});
        }
    }
    int r = S.rec(0);
    res.nodes = S.nodes;
    if (r == 1) {
        res.status = Status::Found;
        res.phi = S.phi;
    } else if (r == -1) {
        res.status = Status::BudgetExceeded;
    }
    return res;
}

}  // namespace lkt::search
