#include "lkt/zmodule.hpp"

#include <algorithm>
#include <sstream>

namespace lkt {

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
    IntegerMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntegerMatrix IntegerMatrix::fromRows(const std::vector<std::vector<long>>& rs, std::size_t cols) {
    std::size_t c = rs.empty() ? cols : rs[0].size();
    IntegerMatrix m(rs.size(), c);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (rs[i].size() != c) throw std::invalid_argument("ragged matrix rows");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rs[i][j];
    }
    return m;
}

Vec IntegerMatrix::column(std::size_t j) const {
    Vec v(rows);
    for (std::size_t i = 0; i < rows; ++i) v[i] = (*this)(i, j);
    return v;
}

Vec IntegerMatrix::row(std::size_t i) const {
    return Vec(a.begin() + i * cols, a.begin() + (i + 1) * cols);
}

void IntegerMatrix::setColumn(std::size_t j, const Vec& v) {
    for (std::size_t i = 0; i < rows; ++i) (*this)(i, j) = v[i];
}

IntegerMatrix IntegerMatrix::transpose() const {
    IntegerMatrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool IntegerMatrix::isZero() const {
    return std::all_of(a.begin(), a.end(), [](const Int& x) { return x == 0; });
}

std::string IntegerMatrix::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows; ++i) {
        os << (i ? ",[" : "[");
        for (std::size_t j = 0; j < cols; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
        os << "]";
    }
    os << "]";
    return os.str();
}

IntegerMatrix operator*(const IntegerMatrix& x, const IntegerMatrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matrix product: dimension mismatch");
    IntegerMatrix r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const Int& xik = x(i, k);
            if (xik == 0) continue;
            for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

Vec operator*(const IntegerMatrix& x, const Vec& v) {
    if (x.cols != v.size()) throw std::invalid_argument("matrix-vector product: dimension mismatch");
    Vec r(x.rows, 0);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k)
            if (v[k] != 0) r[i] += x(i, k) * v[k];
    return r;
}

IntegerMatrix hstack(const IntegerMatrix& x, const IntegerMatrix& y) {
    if (x.rows != y.rows) throw std::invalid_argument("hstack: row mismatch");
    IntegerMatrix r(x.rows, x.cols + y.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) r(i, j) = x(i, j);
        for (std::size_t j = 0; j < y.cols; ++j) r(i, x.cols + j) = y(i, j);
    }
    return r;
}

IntegerMatrix matrixFromColumns(std::size_t rows, const std::vector<Vec>& cols) {
    IntegerMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != rows) throw std::invalid_argument("matrixFromColumns: length mismatch");
        m.setColumn(j, cols[j]);
    }
    return m;
}

Int determinant(const IntegerMatrix& m0) {
    if (m0.rows != m0.cols) throw std::invalid_argument("determinant of non-square matrix");
    std::size_t n = m0.rows;
    if (n == 0) return 1;
    IntegerMatrix m = m0;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m(i, j) = t;
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

namespace {

struct SnfWork {
    IntegerMatrix A, U, Uinv, V, Vinv;
    std::size_t m, n;

    explicit SnfWork(const IntegerMatrix& M)
        : A(M), U(IntegerMatrix::identity(M.rows)), Uinv(IntegerMatrix::identity(M.rows)),
          V(IntegerMatrix::identity(M.cols)), Vinv(IntegerMatrix::identity(M.cols)), m(M.rows), n(M.cols) {}

    void swapRows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < n; ++k) std::swap(A(i, k), A(j, k));
        for (std::size_t k = 0; k < m; ++k) {
            std::swap(U(i, k), U(j, k));
            std::swap(Uinv(k, i), Uinv(k, j));
        }
    }
    // row i += c * row j
    void addRow(std::size_t i, std::size_t j, const Int& c) {
        if (c == 0) return;
        for (std::size_t k = 0; k < n; ++k) A(i, k) += c * A(j, k);
        for (std::size_t k = 0; k < m; ++k) {
            U(i, k) += c * U(j, k);
            Uinv(k, j) -= c * Uinv(k, i);
        }
    }
    void negRow(std::size_t i) {
        for (std::size_t k = 0; k < n; ++k) A(i, k) = -A(i, k);
        for (std::size_t k = 0; k < m; ++k) {
            U(i, k) = -U(i, k);
            Uinv(k, i) = -Uinv(k, i);
        }
    }
    void swapCols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < m; ++k) std::swap(A(k, i), A(k, j));
        for (std::size_t k = 0; k < n; ++k) {
            std::swap(V(k, i), V(k, j));
            std::swap(Vinv(i, k), Vinv(j, k));
        }
    }
    // col i += c * col j
    void addCol(std::size_t i, std::size_t j, const Int& c) {
        if (c == 0) return;
        for (std::size_t k = 0; k < m; ++k) A(k, i) += c * A(k, j);
        for (std::size_t k = 0; k < n; ++k) {
            V(k, i) += c * V(k, j);
            Vinv(j, k) -= c * Vinv(i, k);
        }
    }

    // smallest nonzero |entry| in the lower-right block starting at t
    bool pickPivot(std::size_t t) {
        std::size_t bi = 0, bj = 0;
        bool found = false;
        Int best;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j) {
                if (A(i, j) == 0) continue;
                Int v = abs(A(i, j));
                if (!found || v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        if (!found) return false;
        swapRows(t, bi);
        swapCols(t, bj);
        return true;
    }

    std::size_t run() {
        std::size_t t = 0;
        std::size_t lim = std::min(m, n);
        while (t < lim) {
            if (!pickPivot(t)) break;
            for (;;) {
                bool clean = true;
                for (std::size_t i = t + 1; i < m; ++i) {
                    if (A(i, t) == 0) continue;
                    Int q;
                    mpz_tdiv_q(q.get_mpz_t(), A(i, t).get_mpz_t(), A(t, t).get_mpz_t());
                    addRow(i, t, -q);
                    if (A(i, t) != 0) clean = false;
                }
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (A(t, j) == 0) continue;
                    Int q;
                    mpz_tdiv_q(q.get_mpz_t(), A(t, j).get_mpz_t(), A(t, t).get_mpz_t());
                    addCol(j, t, -q);
                    if (A(t, j) != 0) clean = false;
                }
                if (!clean) {
                    // bring the smallest remainder in row/column t to the pivot
                    std::size_t bi = t, bj = t;
                    Int best = abs(A(t, t));
                    for (std::size_t i = t + 1; i < m; ++i)
                        if (A(i, t) != 0 && abs(A(i, t)) < best) best = abs(A(i, t)), bi = i, bj = t;
                    for (std::size_t j = t + 1; j < n; ++j)
                        if (A(t, j) != 0 && abs(A(t, j)) < best) best = abs(A(t, j)), bi = t, bj = j;
                    swapRows(t, bi);
                    swapCols(t, bj);
                    continue;
                }
                bool divides = true;
                for (std::size_t i = t + 1; i < m && divides; ++i)
                    for (std::size_t j = t + 1; j < n; ++j)
                        if (!mpz_divisible_p(A(i, j).get_mpz_t(), A(t, t).get_mpz_t())) {
                            addRow(t, i, 1);
                            divides = false;
                            break;
                        }
                if (divides) break;
            }
            if (A(t, t) < 0) negRow(t);
            ++t;
        }
        return t;
    }
};

}  // namespace

SmithResult smithNormalForm(const IntegerMatrix& M) {
    SnfWork w(M);
    std::size_t r = w.run();
    SmithResult res;
    res.S = std::move(w.A);
    res.U = std::move(w.U);
    res.Uinv = std::move(w.Uinv);
    res.V = std::move(w.V);
    res.Vinv = std::move(w.Vinv);
    res.rank = r;
    return res;
}

std::optional<Vec> solveLinear(const IntegerMatrix& M, const Vec& b) {
    if (b.size() != M.rows) throw std::invalid_argument("solveLinear: dimension mismatch");
    SmithResult s = smithNormalForm(M);
    Vec c = s.U * b;
    Vec y(M.cols, 0);
    for (std::size_t i = 0; i < M.rows; ++i) {
        if (i < s.rank) {
            if (!mpz_divisible_p(c[i].get_mpz_t(), s.S(i, i).get_mpz_t())) return std::nullopt;
            mpz_divexact(y[i].get_mpz_t(), c[i].get_mpz_t(), s.S(i, i).get_mpz_t());
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    return s.V * y;
}

std::vector<Vec> integerKernel(const IntegerMatrix& M) {
    SmithResult s = smithNormalForm(M);
    std::vector<Vec> out;
    for (std::size_t j = s.rank; j < M.cols; ++j) out.push_back(s.V.column(j));
    return out;
}

// ---------------------------------------------------------------- groups

Int FgAbGroup::cardinality() const {
    if (rank) return 0;
    Int c = 1;
    for (auto& d : torsion) c *= d;
    return c;
}

Vec FgAbGroup::normalize(Vec v) const {
    if (v.size() != ngens()) throw std::invalid_argument("element has wrong length for " + str());
    for (std::size_t i = 0; i < torsion.size(); ++i) {
        Int& x = v[rank + i];
        mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), torsion[i].get_mpz_t());
    }
    return v;
}

bool FgAbGroup::isZero(const Vec& v) const {
    Vec n = normalize(v);
    return std::all_of(n.begin(), n.end(), [](const Int& x) { return x == 0; });
}

IntegerMatrix FgAbGroup::relations() const {
    IntegerMatrix r(ngens(), torsion.size());
    for (std::size_t i = 0; i < torsion.size(); ++i) r(rank + i, i) = torsion[i];
    return r;
}

std::string FgAbGroup::str() const {
    if (isTrivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (rank) {
        os << "Z";
        if (rank > 1) os << "^" << rank;
        first = false;
    }
    for (auto& d : torsion) {
        os << (first ? "" : " + ") << "Z/" << d.get_str();
        first = false;
    }
    return os.str();
}

std::vector<Vec> FgAbGroup::elements() const {
    if (!isFinite()) throw std::invalid_argument("elements() of an infinite group");
    std::vector<Vec> out;
    Vec cur(ngens(), 0);
    for (;;) {
        out.push_back(cur);
        std::size_t i = ngens();
        while (i > 0) {
            --i;
            cur[i] += 1;
            if (cur[i] < torsion[i]) break;
            cur[i] = 0;
            if (i == 0) return out;
        }
        if (ngens() == 0) return out;
    }
}

Int FgAbGroup::elementOrder(const Vec& v0) const {
    Vec v = normalize(v0);
    for (std::size_t i = 0; i < rank; ++i)
        if (v[i] != 0) return 0;
    Int o = 1;
    for (std::size_t i = 0; i < torsion.size(); ++i) {
        Int g = gcd(v[rank + i], torsion[i]);
        Int oi = torsion[i] / g;
        o = lcm(o, oi);
    }
    return o;
}

FgAbGroup canonicalGroup(std::size_t rank, std::vector<Int> torsion) {
    for (std::size_t i = 0; i < torsion.size(); ++i) {
        if (torsion[i] < 2) throw std::invalid_argument("invariant factors must be >= 2");
        if (i && !mpz_divisible_p(torsion[i].get_mpz_t(), torsion[i - 1].get_mpz_t()))
            throw std::invalid_argument("invariant factors must form a divisibility chain");
    }
    FgAbGroup g;
    g.rank = rank;
    g.torsion = std::move(torsion);
    g.toCanon = IntegerMatrix::identity(g.ngens());
    g.fromCanon = IntegerMatrix::identity(g.ngens());
    return g;
}

FgAbGroup cokernel(const IntegerMatrix& M) {
    SmithResult s = smithNormalForm(M);
    std::size_t g = M.rows;
    std::vector<std::size_t> freeIdx, torIdx;
    std::vector<Int> tors;
    for (std::size_t i = 0; i < g; ++i) {
        Int si = (i < s.rank) ? s.S(i, i) : Int(0);
        if (si == 0)
            freeIdx.push_back(i);
        else if (si != 1) {
            torIdx.push_back(i);
            tors.push_back(si);
        }
    }
    FgAbGroup G;
    G.rank = freeIdx.size();
    G.torsion = tors;
    std::vector<std::size_t> idx = freeIdx;
    idx.insert(idx.end(), torIdx.begin(), torIdx.end());
    G.toCanon = IntegerMatrix(idx.size(), g);
    G.fromCanon = IntegerMatrix(g, idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
        for (std::size_t j = 0; j < g; ++j) {
            G.toCanon(k, j) = s.U(idx[k], j);
            G.fromCanon(j, k) = s.Uinv(j, idx[k]);
        }
    // reduce witness rows of torsion coordinates
    for (std::size_t k = G.rank; k < idx.size(); ++k)
        for (std::size_t j = 0; j < g; ++j) {
            Int& x = G.toCanon(k, j);
            mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), G.torsion[k - G.rank].get_mpz_t());
        }
    return G;
}

FgAbGroup groupFromOrders(const std::vector<Int>& orders) {
    IntegerMatrix D(orders.size(), orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < 0) throw std::invalid_argument("negative cyclic order");
        D(i, i) = orders[i];
    }
    return cokernel(D);
}

// ---------------------------------------------------------------- homs

namespace {
IntegerMatrix normalizeColumns(const FgAbGroup& dst, IntegerMatrix m) {
    for (std::size_t j = 0; j < m.cols; ++j) m.setColumn(j, dst.normalize(m.column(j)));
    return m;
}
}  // namespace

AbHom::AbHom(FgAbGroup s, FgAbGroup d, IntegerMatrix m) : src(std::move(s)), dst(std::move(d)), mat(std::move(m)) {
    if (mat.rows != dst.ngens() || mat.cols != src.ngens())
        throw std::invalid_argument("AbHom: matrix shape does not match groups");
    mat = normalizeColumns(dst, mat);
}

AbHom AbHom::zero(const FgAbGroup& s, const FgAbGroup& d) { return AbHom(s, d, IntegerMatrix(d.ngens(), s.ngens())); }

AbHom AbHom::identity(const FgAbGroup& g) { return AbHom(g, g, IntegerMatrix::identity(g.ngens())); }

AbHom AbHom::scalar(const FgAbGroup& g, const Int& k) {
    IntegerMatrix m(g.ngens(), g.ngens());
    for (std::size_t i = 0; i < g.ngens(); ++i) m(i, i) = k;
    return AbHom(g, g, m);
}

Vec AbHom::apply(const Vec& x) const { return dst.normalize(mat * x); }

bool AbHom::wellDefined() const {
    // each source relation d_i e_i must map to zero
    for (std::size_t i = 0; i < src.torsion.size(); ++i) {
        Vec c = mat.column(src.rank + i);
        for (auto& x : c) x *= src.torsion[i];
        if (!dst.isZero(c)) return false;
    }
    return true;
}

bool AbHom::isZero() const { return mat.isZero(); }

bool AbHom::operator==(const AbHom& o) const {
    return src.sameType(o.src) && dst.sameType(o.dst) && mat == o.mat;
}

std::vector<Vec> AbHom::kernelGens() const {
    // x with mat x in the relation lattice of dst
    IntegerMatrix A = hstack(mat, dst.relations());
    std::vector<Vec> out;
    for (auto& k : integerKernel(A)) {
        Vec x(k.begin(), k.begin() + src.ngens());
        x = src.normalize(x);
        if (!src.isZero(x)) out.push_back(x);
    }
    return out;
}

std::vector<Vec> AbHom::imageGens() const {
    std::vector<Vec> out;
    for (std::size_t j = 0; j < mat.cols; ++j) out.push_back(mat.column(j));
    return out;
}

bool AbHom::isInjective() const { return kernelGens().empty(); }

bool AbHom::isSurjective() const {
    for (std::size_t i = 0; i < dst.ngens(); ++i) {
        Vec e(dst.ngens(), 0);
        e[i] = 1;
        if (!inSubgroup(dst, imageGens(), e)) return false;
    }
    return true;
}

AbHom compose(const AbHom& g, const AbHom& f) {
    if (!f.dst.sameType(g.src)) throw std::invalid_argument("compose: mismatched groups");
    return AbHom(f.src, g.dst, g.mat * f.mat);
}

AbHom operator+(const AbHom& f, const AbHom& g) {
    if (!f.src.sameType(g.src) || !f.dst.sameType(g.dst)) throw std::invalid_argument("sum of homs: mismatched groups");
    IntegerMatrix m = f.mat;
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += g.mat.a[i];
    return AbHom(f.src, f.dst, m);
}

AbHom inverse(const AbHom& f) {
    if (!f.isIso()) throw std::invalid_argument("inverse of a non-isomorphism");
    IntegerMatrix A = hstack(f.mat, f.dst.relations());
    IntegerMatrix inv(f.src.ngens(), f.dst.ngens());
    for (std::size_t i = 0; i < f.dst.ngens(); ++i) {
        Vec e(f.dst.ngens(), 0);
        e[i] = 1;
        auto x = solveLinear(A, e);
        if (!x) throw std::logic_error("inverse: generator not in image");
        Vec xs(x->begin(), x->begin() + f.src.ngens());
        inv.setColumn(i, xs);
    }
    return AbHom(f.dst, f.src, inv);
}

bool inSubgroup(const FgAbGroup& G, const std::vector<Vec>& gens, const Vec& x) {
    IntegerMatrix A = hstack(matrixFromColumns(G.ngens(), gens), G.relations());
    return solveLinear(A, x).has_value();
}

bool isExactAt(const AbHom& f, const AbHom& g) {
    if (!f.dst.sameType(g.src)) throw std::invalid_argument("isExactAt: target of f differs from source of g");
    if (!compose(g, f).isZero()) return false;
    auto im = f.imageGens();
    for (auto& k : g.kernelGens())
        if (!inSubgroup(f.dst, im, k)) return false;
    return true;
}

CoefficientResult tensorZn(const FgAbGroup& G, long n) {
    if (n < 2) throw std::invalid_argument("tensorZn: modulus must be >= 2");
    std::vector<Int> orders;
    for (std::size_t i = 0; i < G.ngens(); ++i) orders.push_back(i < G.rank ? Int(n) : Int(gcd(G.order(i), Int(n))));
    FgAbGroup T = groupFromOrders(orders);
    return {T, AbHom(G, T, T.toCanon)};
}

CoefficientResult torZn(const FgAbGroup& G, long n) {
    if (n < 2) throw std::invalid_argument("torZn: modulus must be >= 2");
    std::vector<Int> orders;
    IntegerMatrix incl(G.ngens(), G.torsion.size());
    for (std::size_t i = 0; i < G.torsion.size(); ++i) {
        Int g = gcd(G.torsion[i], Int(n));
        orders.push_back(g);
        incl(G.rank + i, i) = G.torsion[i] / g;
    }
    FgAbGroup T = groupFromOrders(orders);
    return {T, AbHom(T, G, incl * T.fromCanon)};
}

DirectSum directSum(const std::vector<FgAbGroup>& gs) {
    std::vector<Int> orders;
    std::vector<std::size_t> offs;
    for (auto& g : gs) {
        offs.push_back(orders.size());
        for (std::size_t i = 0; i < g.ngens(); ++i) orders.push_back(g.order(i));
    }
    DirectSum ds;
    ds.sum = groupFromOrders(orders);
    std::size_t total = orders.size();
    for (std::size_t k = 0; k < gs.size(); ++k) {
        IntegerMatrix in(total, gs[k].ngens()), pr(gs[k].ngens(), total);
        for (std::size_t i = 0; i < gs[k].ngens(); ++i) {
            in(offs[k] + i, i) = 1;
            pr(i, offs[k] + i) = 1;
        }
        ds.inj.emplace_back(gs[k], ds.sum, ds.sum.toCanon * in);
        ds.proj.emplace_back(ds.sum, gs[k], pr * ds.sum.fromCanon);
    }
    return ds;
}

// ---------------------------------------------------------------- syntax

namespace {
std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n"), e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}
}  // namespace

FgAbGroup parseGroup(const std::string& text) {
    std::vector<Int> orders;
    std::string s = trim(text);
    if (s == "0") return groupFromOrders({});
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t plus = s.find('+', pos);
        std::string term = trim(s.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos));
        if (term.empty() || term[0] != 'Z') throw std::invalid_argument("bad group term '" + term + "'");
        std::string rest = trim(term.substr(1));
        if (rest.empty()) {
            orders.push_back(0);
        } else if (rest[0] == '^') {
            long r = std::stol(trim(rest.substr(1)));
            if (r < 0) throw std::invalid_argument("negative rank");
            for (long i = 0; i < r; ++i) orders.push_back(0);
        } else if (rest[0] == '/') {
            Int d(trim(rest.substr(1)));
            if (d < 1) throw std::invalid_argument("cyclic order must be positive");
            orders.push_back(d);
        } else {
            throw std::invalid_argument("bad group term '" + term + "'");
        }
        if (plus == std::string::npos) break;
        pos = plus + 1;
    }
    return groupFromOrders(orders);
}

std::string groupToSyntax(const FgAbGroup& g) {
    std::ostringstream os;
    os << "Z^" << g.rank;
    for (auto& d : g.torsion) os << " + Z/" << d.get_str();
    return os.str();
}

long toLong(const Int& x) {
    if (!x.fits_slong_p()) throw std::overflow_error("integer too large for machine arithmetic: " + x.get_str());
    return x.get_si();
}

}  // namespace lkt
