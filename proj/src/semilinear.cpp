#include "lkt/semilinear.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace lkt {

namespace {

Vec sub(const Vec& a, const Vec& b) {
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

Vec addv(const Vec& a, const Vec& b) {
    Vec r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

Vec negv(const Vec& a) {
    Vec r = a;
    for (auto& x : r) x = -x;
    return r;
}

std::string vecStr(const Vec& v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].get_str();
    os << ")";
    return os.str();
}

Membership memberComponent(const FgAbGroup& G, const Vec& offset, const std::vector<Vec>& periods, const Vec& x) {
    Vec w = G.normalize(sub(x, offset));
    std::vector<Vec> ps;
    for (auto& p : periods) {
        Vec q = G.normalize(p);
        if (!G.isZero(q) && std::find(ps.begin(), ps.end(), q) == ps.end()) ps.push_back(q);
    }
    // periods whose negative is also reachable act as group generators
    std::vector<Vec> cone, grp;
    for (auto& p : ps) {
        Vec np = G.normalize(negv(p));
        bool groupLike = G.elementOrder(p) != 0 || std::find(ps.begin(), ps.end(), np) != ps.end();
        (groupLike ? grp : cone).push_back(p);
    }
    std::size_t n = G.ngens();
    std::vector<Vec> cols = cone;
    cols.insert(cols.end(), grp.begin(), grp.end());
    for (std::size_t i = 0; i < G.torsion.size(); ++i) {
        Vec r(n, 0);
        r[G.rank + i] = G.torsion[i];
        cols.push_back(r);
    }
    if (cols.empty()) return G.isZero(w) ? Membership::In : Membership::Out;
    IntegerMatrix A = matrixFromColumns(n, cols);
    auto sol = solveLinear(A, w);
    if (!sol) return Membership::Out;
    std::size_t c = cone.size();
    if (c == 0) return Membership::In;
    auto ker = integerKernel(A);
    bool unique = true;
    for (auto& k : ker)
        for (std::size_t i = 0; i < c; ++i)
            if (k[i] != 0) unique = false;
    if (unique) {
        for (std::size_t i = 0; i < c; ++i)
            if ((*sol)[i] < 0) return Membership::Out;
        return Membership::In;
    }
    // a kernel direction positive on every cone coordinate makes any solution shiftable
    auto positiveDir = [&](const Vec& k, int sign) {
        for (std::size_t i = 0; i < c; ++i)
            if (sign * k[i] <= 0) return false;
        return true;
    };
    Vec total(cols.size(), 0);
    for (auto& k : ker) {
        if (positiveDir(k, 1) || positiveDir(k, -1)) return Membership::In;
        total = addv(total, k);
    }
    if (positiveDir(total, 1) || positiveDir(total, -1)) return Membership::In;
    // bounded fallback over the cone coefficients
    long B = 1;
    while (B < 12) {
        double cells = 1;
        for (std::size_t i = 0; i < c; ++i) cells *= double(B + 2);
        if (cells > 20000) break;
        ++B;
    }
    IntegerMatrix rest = matrixFromColumns(n, std::vector<Vec>(cols.begin() + long(c), cols.end()));
    std::vector<long> k(c, 0);
    for (;;) {
        Vec r = w;
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < n; ++j) r[j] -= cone[i][j] * k[i];
        bool ok = rest.cols == 0 ? G.isZero(G.normalize(r)) : solveLinear(rest, r).has_value();
        if (ok) return Membership::In;
        std::size_t i = 0;
        while (i < c && ++k[i] > B) k[i++] = 0;
        if (i == c) break;
    }
    return Membership::Unknown;
}

}  // namespace

SemilinearSet SemilinearSet::point(const FgAbGroup& g, const Vec& x) {
    SemilinearSet s(g);
    s.add(x, {});
    return s;
}

SemilinearSet SemilinearSet::whole(const FgAbGroup& g) {
    SemilinearSet s(g);
    std::vector<Vec> ps;
    for (std::size_t i = 0; i < g.ngens(); ++i) {
        Vec e(g.ngens(), 0);
        e[i] = 1;
        ps.push_back(e);
        if (i < g.rank) ps.push_back(negv(e));
    }
    s.add(g.zero(), ps);
    return s;
}

void SemilinearSet::add(Vec offset, std::vector<Vec> periods) {
    if (offset.size() != ambient.ngens()) throw std::invalid_argument("semilinear offset has wrong length");
    for (auto& p : periods)
        if (p.size() != ambient.ngens()) throw std::invalid_argument("semilinear period has wrong length");
    components.push_back({ambient.normalize(std::move(offset)), std::move(periods)});
}

Membership SemilinearSet::membership(const Vec& x) const {
    bool unknown = false;
    for (auto& c : components) {
        auto m = memberComponent(ambient, c.offset, c.periods, x);
        if (m == Membership::In) return m;
        if (m == Membership::Unknown) unknown = true;
    }
    return unknown ? Membership::Unknown : Membership::Out;
}

std::set<Vec> SemilinearSet::enumerate(long bound, std::size_t limit) const {
    std::set<Vec> out;
    for (auto& c : components) {
        std::vector<long> k(c.periods.size(), 0);
        for (;;) {
            Vec v = c.offset;
            for (std::size_t i = 0; i < k.size(); ++i)
                for (std::size_t j = 0; j < v.size(); ++j) v[j] += c.periods[i][j] * k[i];
            out.insert(ambient.normalize(v));
            if (out.size() >= limit) throw std::length_error("semilinear enumeration exceeds its limit");
            std::size_t i = 0;
            while (i < k.size() && ++k[i] > bound) k[i++] = 0;
            if (i == k.size()) break;
        }
    }
    return out;
}

std::set<Vec> SemilinearSet::elementsFinite() const {
    if (!ambient.isFinite()) throw std::invalid_argument("elementsFinite needs a finite ambient group");
    std::set<Vec> out;
    for (auto& c : components) {
        std::set<Vec> seen{c.offset};
        std::deque<Vec> todo{c.offset};
        while (!todo.empty()) {
            Vec v = todo.front();
            todo.pop_front();
            for (auto& p : c.periods) {
                Vec u = ambient.normalize(addv(v, p));
                if (seen.insert(u).second) todo.push_back(u);
            }
        }
        out.insert(seen.begin(), seen.end());
    }
    return out;
}

std::string SemilinearSet::str() const {
    if (components.empty()) return "{}";
    std::ostringstream os;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (i) os << " u ";
        os << vecStr(components[i].offset);
        if (!components[i].periods.empty()) {
            os << " + N<";
            for (std::size_t j = 0; j < components[i].periods.size(); ++j)
                os << (j ? "," : "") << vecStr(components[i].periods[j]);
            os << ">";
        }
    }
    return os.str();
}

SemilinearSet pushforward(const AbHom& f, const SemilinearSet& s) {
    if (!f.src.sameType(s.ambient)) throw std::invalid_argument("pushforward: map source does not match the set");
    SemilinearSet out(f.dst);
    for (auto& c : s.components) {
        std::vector<Vec> ps;
        for (auto& p : c.periods) ps.push_back(f.apply(p));
        out.add(f.apply(c.offset), ps);
    }
    return out;
}

SemilinearSet productSet(const FgAbGroup& sum, const AbHom& inj0, const SemilinearSet& a, const AbHom& inj1,
                         const SemilinearSet& b) {
    SemilinearSet out(sum);
    for (auto& ca : a.components)
        for (auto& cb : b.components) {
            std::vector<Vec> ps;
            for (auto& p : ca.periods) ps.push_back(inj0.apply(p));
            for (auto& p : cb.periods) ps.push_back(inj1.apply(p));
            out.add(sum.normalize(addv(inj0.apply(ca.offset), inj1.apply(cb.offset))), ps);
        }
    return out;
}

Membership inMonoid(const FgAbGroup& g, const std::vector<Vec>& gens, const Vec& x) {
    return memberComponent(g, g.zero(), gens, x);
}

namespace {

bool placedInOne(const SemilinearSet& b, const Vec& o, const std::vector<Vec>& ps) {
    for (auto& cb : b.components) {
        if (memberComponent(b.ambient, cb.offset, cb.periods, o) != Membership::In) continue;
        bool all = true;
        for (auto& p : ps)
            if (inMonoid(b.ambient, cb.periods, p) != Membership::In) {
                all = false;
                break;
            }
        if (all) return true;
    }
    return false;
}

// o + N<ps> is the union over r < m of o + r*p + N<ps with p replaced by m*p>; split until every
// piece fits in a single component of b
bool placedSplit(const SemilinearSet& b, const Vec& o, const std::vector<Vec>& ps, int depth) {
    if (placedInOne(b, o, ps)) return true;
    if (depth == 0 || b.components.size() < 2) return false;
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (long m = 2; m <= 3; ++m) {
            bool all = true;
            for (long r = 0; r < m && all; ++r) {
                Vec o2 = o;
                for (std::size_t j = 0; j < o2.size(); ++j) o2[j] += r * ps[i][j];
                auto ps2 = ps;
                for (auto& x : ps2[i]) x *= m;
                all = placedSplit(b, b.ambient.normalize(o2), ps2, depth - 1);
            }
            if (all) return true;
        }
    return false;
}

}  // namespace

bool containedSymbolically(const AbHom& f, const SemilinearSet& a, const SemilinearSet& b) {
    for (auto& ca : a.components) {
        std::vector<Vec> ps;
        for (auto& p : ca.periods) ps.push_back(f.apply(p));
        if (!placedSplit(b, f.apply(ca.offset), ps, 2)) return false;
    }
    return true;
}

Membership containedIn(const AbHom& f, const SemilinearSet& a, const SemilinearSet& b, long bound) {
    if (containedSymbolically(f, a, b)) return Membership::In;
    bool finite = a.ambient.isFinite();
    std::set<Vec> els = finite ? a.elementsFinite() : a.enumerate(bound);
    bool unknown = false;
    for (auto& x : els) {
        auto m = b.membership(f.apply(x));
        if (m == Membership::Out) return Membership::Out;
        if (m == Membership::Unknown) unknown = true;
    }
    if (finite && !unknown) return Membership::In;
    return Membership::Unknown;
}

}  // namespace lkt
