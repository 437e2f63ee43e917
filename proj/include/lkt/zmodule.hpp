// Exact integer linear algebra and finitely generated abelian groups.
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lkt {

using Int = mpz_class;
using Vec = std::vector<Int>;

struct IntegerMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> a;  // row-major

    IntegerMatrix() = default;
    IntegerMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}
    static IntegerMatrix identity(std::size_t n);
    static IntegerMatrix fromRows(const std::vector<std::vector<long>>& rs, std::size_t cols = 0);

    Int& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    Vec column(std::size_t j) const;
    Vec row(std::size_t i) const;
    void setColumn(std::size_t j, const Vec& v);
    IntegerMatrix transpose() const;
    bool isZero() const;
    bool operator==(const IntegerMatrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
    std::string str() const;
};

IntegerMatrix operator*(const IntegerMatrix& x, const IntegerMatrix& y);
Vec operator*(const IntegerMatrix& x, const Vec& v);
IntegerMatrix hstack(const IntegerMatrix& x, const IntegerMatrix& y);
IntegerMatrix matrixFromColumns(std::size_t rows, const std::vector<Vec>& cols);
// Exact determinant (fraction-free elimination); square only.
Int determinant(const IntegerMatrix& m);

struct SmithResult {
    IntegerMatrix U, S, V;
    IntegerMatrix Uinv, Vinv;
    std::size_t rank = 0;  // number of nonzero diagonal entries
};

// U*M*V = S, U and V unimodular, S diagonal with s1 | s2 | ..., all >= 0.
SmithResult smithNormalForm(const IntegerMatrix& M);

// Returns x with M*x = b over the integers, if one exists.
std::optional<Vec> solveLinear(const IntegerMatrix& M, const Vec& b);

// Basis of the integer kernel {x : M x = 0}, as columns.
std::vector<Vec> integerKernel(const IntegerMatrix& M);

// Finitely generated abelian group Z^rank + Z/d1 + ... + Z/dk with d1 | d2 | ... and di >= 2.
// Canonical coordinates: free part first, then torsion coordinates reduced into [0, di).
// toCanon/fromCanon relate the presentation generators this group was built from to the
// canonical generators (identity when built directly).
struct FgAbGroup {
    std::size_t rank = 0;
    std::vector<Int> torsion;
    IntegerMatrix toCanon;    // ngens x presentationGens
    IntegerMatrix fromCanon;  // presentationGens x ngens

    std::size_t ngens() const { return rank + torsion.size(); }
    // 0 for a free generator
    Int order(std::size_t i) const { return i < rank ? Int(0) : torsion[i - rank]; }
    bool isFinite() const { return rank == 0; }
    bool isTrivial() const { return ngens() == 0; }
    Int cardinality() const;  // 0 means infinite
    Vec normalize(Vec v) const;
    Vec zero() const { return Vec(ngens(), 0); }
    bool isZero(const Vec& v) const;
    // same isomorphism type; the witness is ignored
    bool sameType(const FgAbGroup& o) const { return rank == o.rank && torsion == o.torsion; }
    // torsion relation columns d_i e_{rank+i}, ngens x torsion.size()
    IntegerMatrix relations() const;
    std::string str() const;
    // elements of a finite group in lexicographic coordinate order
    std::vector<Vec> elements() const;
    Int elementOrder(const Vec& v) const;  // 0 for infinite order
};

FgAbGroup canonicalGroup(std::size_t rank, std::vector<Int> torsion);
// Group presented by generators with the given cyclic orders (0 = free, 1 = trivial).
FgAbGroup groupFromOrders(const std::vector<Int>& orders);
// Group presented by the columns of M as relations on M.rows generators.
FgAbGroup cokernel(const IntegerMatrix& M);

struct AbHom {
    FgAbGroup src, dst;
    IntegerMatrix mat;  // dst.ngens x src.ngens, on canonical generators

    AbHom() = default;
    AbHom(FgAbGroup s, FgAbGroup d, IntegerMatrix m);
    static AbHom zero(const FgAbGroup& s, const FgAbGroup& d);
    static AbHom identity(const FgAbGroup& g);
    static AbHom scalar(const FgAbGroup& g, const Int& k);

    Vec apply(const Vec& x) const;
    bool wellDefined() const;
    bool isZero() const;
    bool operator==(const AbHom& o) const;
    bool isInjective() const;
    bool isSurjective() const;
    bool isIso() const { return src.sameType(dst) && isSurjective(); }
    std::vector<Vec> kernelGens() const;
    std::vector<Vec> imageGens() const;
};

AbHom compose(const AbHom& g, const AbHom& f);  // g after f
AbHom operator+(const AbHom& f, const AbHom& g);
// Inverse of an isomorphism.
AbHom inverse(const AbHom& f);

// x in the subgroup of G generated by gens
bool inSubgroup(const FgAbGroup& G, const std::vector<Vec>& gens, const Vec& x);
// image(f) == kernel(g) in the middle group
bool isExactAt(const AbHom& f, const AbHom& g);

struct CoefficientResult {
    FgAbGroup group;
    AbHom map;
};
// G (x) Z_n with the canonical projection G -> G (x) Z_n.
CoefficientResult tensorZn(const FgAbGroup& G, long n);
// Tor(G, Z_n) realised as the n-torsion of the torsion part, with its inclusion into G.
CoefficientResult torZn(const FgAbGroup& G, long n);

struct DirectSum {
    FgAbGroup sum;
    std::vector<AbHom> inj, proj;
};
DirectSum directSum(const std::vector<FgAbGroup>& gs);

// Parses "Z^2 + Z/3 + Z/4", "0", "Z", "Z/2". Components in listed order define presentation coordinates.
FgAbGroup parseGroup(const std::string& s);
std::string groupToSyntax(const FgAbGroup& g);

long toLong(const Int& x);

}  // namespace lkt
