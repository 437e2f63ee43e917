#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "lkt/premon.hpp"

using namespace lkt;

namespace {

// {0, 1, ..., i + p - 1}; sums at or past i wrap with period p
FiniteMonoid monogenic(std::size_t index, std::size_t period) {
    std::size_t n = index + period;
    std::vector<std::string> ns;
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t a = 0; a < n; ++a) {
        ns.push_back(std::to_string(a));
        for (std::size_t b = 0; b < n; ++b) {
            std::size_t s = a + b;
            if (s >= n) s = index + (s - index) % period;
            t[a][b] = s;
        }
    }
    return FiniteMonoid(ns, 0, t);
}

FiniteMonoid product(const FiniteMonoid& A, const FiniteMonoid& B) {
    std::size_t n = A.size() * B.size();
    std::vector<std::string> ns(n);
    std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
    for (std::size_t x = 0; x < n; ++x) {
        ns[x] = "(" + A.names[x / B.size()] + "," + B.names[x % B.size()] + ")";
        for (std::size_t y = 0; y < n; ++y)
            t[x][y] = A(x / B.size(), y / B.size()) * B.size() + B(x % B.size(), y % B.size());
    }
    return FiniteMonoid(ns, A.neutral * B.size() + B.neutral, t);
}

std::vector<FiniteMonoid> sampleMonoids() {
    std::vector<FiniteMonoid> out;
    std::vector<FiniteMonoid> base;
    for (std::size_t i = 0; i <= 3; ++i)
        for (std::size_t p = 1; p <= 4; ++p)
            if (i + p >= 1 && i + p <= 6) base.push_back(monogenic(i, p));
    base.push_back(FiniteMonoid::zeroPlusCyclic(3));
    base.push_back(FiniteMonoid::zeroPlusCyclic(2));
    for (auto& m : base) out.push_back(m);
    for (std::size_t a = 0; a < base.size(); ++a)
        for (std::size_t b = a; b < base.size(); ++b)
            if (base[a].size() * base[b].size() <= 12) out.push_back(product(base[a], base[b]));
    return out;
}

bool subsetOf(const Subset& a, const Subset& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] && !b[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("construction checks the monoid laws") {
    CHECK_THROWS(FiniteMonoid({"0", "a"}, 0, {{0, 1}, {0, 1}}));         // 0 + a != a + 0
    CHECK_THROWS(FiniteMonoid({"0", "a"}, 0, {{0, 1}, {1, 1}, {1, 1}}));  // wrong shape
    CHECK_THROWS(FiniteMonoid({"0", "a"}, 1, {{0, 1}, {1, 0}}));          // wrong neutral
    // (a + b) + b = b + b = 0 but a + (b + b) = a
    CHECK_THROWS(FiniteMonoid({"0", "a", "b"}, 0, {{0, 1, 2}, {1, 2, 2}, {2, 2, 0}}));
    CHECK_NOTHROW(FiniteMonoid::capped(3));
    CHECK_NOTHROW(FiniteMonoid::zeroPlusCyclic(3));
}

TEST_CASE("algebraic pre-order: examples") {
    FiniteMonoid z({"0"}, 0, {{0}});
    CHECK(algebraicPreorder(z)(0, 0));

    auto O4 = FiniteMonoid::zeroPlusCyclic(3);
    auto P = algebraicPreorder(O4);
    std::size_t one = O4.indexOf("1~"), two = O4.indexOf("2~");
    CHECK(P(one, two));
    CHECK(P(two, one));
    CHECK(one != two);
    CHECK(isCompatiblePreorder(O4, P));

    auto U = FiniteMonoid::capped(1);
    auto Q = algebraicPreorder(U);
    CHECK(Q(0, 1));
    CHECK(Q(1, 1));
    CHECK_FALSE(Q(1, 0));
}

TEST_CASE("ideals: examples") {
    auto U = FiniteMonoid::capped(1);
    auto I = idealsOf(U);
    REQUIRE(I.size() == 2);
    CHECK(I[0] == Subset{true, false});
    CHECK(I[1] == Subset{true, true});

    auto O4 = FiniteMonoid::zeroPlusCyclic(3);
    auto J = idealsOf(O4);
    REQUIRE(J.size() == 2);
    CHECK(std::count(J[0].begin(), J[0].end(), true) == 1);
    CHECK(std::count(J[1].begin(), J[1].end(), true) == 4);

    // {0,1,2,inf} with saturating addition
    auto T = FiniteMonoid::capped(3);
    auto K = idealsOf(T, algebraicPreorder(T), true);
    REQUIRE(K.size() == 2);
    CHECK(K[1] == Subset(4, true));
}

TEST_CASE("ideals under a hand-made order follow the general definition") {
    FiniteMonoid Z2({"0", "1"}, 0, {{0, 1}, {1, 0}});
    auto P = explicitPreorder(Z2, {{true, false}, {false, true}});
    CHECK_FALSE(P.algebraic);
    CHECK(isPositivelyDirected(Z2, P));
    auto I = idealsOf(Z2, P);
    REQUIRE(I.size() == 1);
    CHECK(I[0] == Subset{true, true});

    auto N2 = FiniteMonoid::capped(2);
    // only 0 <= 0: nothing positive to add to 1 or 2
    std::vector<std::vector<bool>> t(3, std::vector<bool>(3, false));
    for (int i = 0; i < 3; ++i) t[i][i] = true;
    auto Q = explicitPreorder(N2, t);
    CHECK_FALSE(isPositivelyDirected(N2, Q));
    CHECK_THROWS_AS(idealsOf(N2, Q), std::invalid_argument);
    CHECK_THROWS(explicitPreorder(N2, {{true, true, false}, {false, true, false}, {false, false, true}}));
}

TEST_CASE("ideals form a lattice and the fast path agrees with the definition") {
    for (auto& M : sampleMonoids()) {
        auto P = algebraicPreorder(M);
        auto I = idealsOf(M, P, true);
        REQUIRE(!I.empty());
        // units hereditarily generate the bottom ideal; it sits below every other one
        for (auto& a : I) CHECK(subsetOf(I.front(), a));
        CHECK(I.back() == Subset(M.size(), true));
        for (auto& a : I)
            for (auto& b : I) {
                Subset meet(M.size());
                for (std::size_t x = 0; x < M.size(); ++x) meet[x] = a[x] && b[x];
                CHECK(std::find(I.begin(), I.end(), meet) != I.end());
                Subset j = idealJoin(I, a, b);
                CHECK(subsetOf(a, j));
                CHECK(subsetOf(b, j));
                for (auto& c : I)
                    if (subsetOf(a, c) && subsetOf(b, c)) CHECK(subsetOf(j, c));
            }
    }
}

TEST_CASE("Grothendieck group: examples") {
    FiniteMonoid z({"0"}, 0, {{0}});
    CHECK(grothendieckFinite(z).group.isTrivial());

    auto O4 = FiniteMonoid::zeroPlusCyclic(3);
    auto g = grothendieckFinite(O4);
    CHECK(g.group.sameType(parseGroup("Z/3")));
    CHECK(g.group.isZero(g.rho[O4.indexOf("0")]));
    CHECK(g.group.isZero(g.rho[O4.indexOf("0~")]));
    CHECK_FALSE(g.group.isZero(g.rho[O4.indexOf("1~")]));

    CHECK(grothendieckFinite(FiniteMonoid::capped(1)).group.isTrivial());
    CHECK(grothendieckFinite(monogenic(0, 4)).group.sameType(parseGroup("Z/4")));
}

TEST_CASE("Grothendieck group: properties") {
    for (auto& M : sampleMonoids()) {
        auto g = grothendieckFinite(M);
        const auto& G = g.group;
        for (std::size_t a = 0; a < M.size(); ++a)
            for (std::size_t b = 0; b < M.size(); ++b) {
                Vec s = g.rho[a];
                for (std::size_t i = 0; i < s.size(); ++i) s[i] += g.rho[b][i];
                CHECK(G.normalize(s) == g.rho[M(a, b)]);
            }
        // every element is a difference of images
        std::set<Vec> diffs;
        for (std::size_t a = 0; a < M.size(); ++a)
            for (std::size_t b = 0; b < M.size(); ++b) {
                Vec d = g.rho[a];
                for (std::size_t i = 0; i < d.size(); ++i) d[i] -= g.rho[b][i];
                diffs.insert(G.normalize(d));
            }
        CHECK(Int(long(diffs.size())) == G.cardinality());
    }
}

TEST_CASE("scales") {
    auto U = FiniteMonoid::capped(1);
    auto P = algebraicPreorder(U);
    CHECK_FALSE(isScale(U, P, {true, false}));
    CHECK(isScale(U, P, {true, true}));
    for (auto& M : sampleMonoids()) CHECK(isScale(M, algebraicPreorder(M), Subset(M.size(), true)));

    auto N3 = FiniteMonoid::capped(3);
    auto Q = algebraicPreorder(N3);
    CHECK(isScale(N3, Q, {true, true, false, false}));   // {0,1}: 3 <= 3*1
    CHECK_FALSE(isScale(N3, Q, {true, false, true, false}));  // not hereditary
}

TEST_CASE("cancellation and infinite elements") {
    FiniteMonoid z({"0"}, 0, {{0}});
    CHECK(hasCancellation(z));
    CHECK_FALSE(hasInfiniteElement(z));

    auto O4 = FiniteMonoid::zeroPlusCyclic(3);
    CHECK_FALSE(hasCancellation(O4));
    CHECK(hasInfiniteElement(O4));

    auto C = FiniteMonoid::capped(2);
    CHECK(hasInfiniteElement(C));
    CHECK(C(2, 1) == 2);

    CHECK(hasCancellation(monogenic(0, 5)));
    for (auto& M : sampleMonoids())
        if (hasInfiniteElement(M)) CHECK_FALSE(hasCancellation(M));
}
