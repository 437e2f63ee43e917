#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lkt/latticed.hpp"

using namespace lkt;

namespace {

const CoefficientSet N24({2, 4});

IntegerMatrix M(const std::vector<std::vector<long>>& rows, std::size_t cols) {
    return IntegerMatrix::fromRows(rows, cols);
}

// Model with standard fibers (K1 = 0 everywhere) and K0 connecting maps given for every I <= J.
LatticedKModule build(const FiniteLattice& L, const std::vector<std::string>& k0,
                      const std::function<IntegerMatrix(std::size_t, std::size_t)>& d0,
                      std::vector<SemilinearSet> layers, std::vector<bool> infinite, const CoefficientSet& N = N24) {
    LatticedKModule X;
    X.N = N;
    X.lattice = L;
    for (auto& g : k0) X.fibers.push_back(standardLambdaModule(parseGroup(g), parseGroup("0"), N));
    for (std::size_t I = 0; I < L.size(); ++I)
        for (std::size_t J = 0; J < L.size(); ++J)
            if (L.le(I, J)) {
                AbHom f0(X.K0(I), X.K0(J), d0(I, J));
                X.delta.emplace(std::make_pair(I, J),
                                standardMorphism(X.fibers[I], X.fibers[J], f0, AbHom::zero(X.fibers[I].G(1), X.fibers[J].G(1))));
            }
    X.layers = std::move(layers);
    X.infiniteAllowed = std::move(infinite);
    return X;
}

FiniteLattice chainNamed(const std::vector<std::string>& ns) {
    std::vector<std::vector<bool>> le(ns.size(), std::vector<bool>(ns.size()));
    for (std::size_t i = 0; i < ns.size(); ++i)
        for (std::size_t j = 0; j < ns.size(); ++j) le[i][j] = i <= j;
    return FiniteLattice::fromOrder(ns, le);
}

SemilinearSet lin(const FgAbGroup& g, Vec o, std::vector<Vec> ps) {
    SemilinearSet s(g);
    s.add(std::move(o), std::move(ps));
    return s;
}

// O4-type value: one properly infinite simple block with K0 = Z/3 and unit 1
LatticedKModule cuntz4(long unit = 1) {
    auto L = chainNamed({"0", "A"});
    auto X = build(L, {"0", "Z/3"},
                   [](std::size_t I, std::size_t J) {
                       if (I == 1 && J == 1) return M({{1}}, 1);
                       return IntegerMatrix(J == 1 ? 1 : 0, I == 1 ? 1 : 0);
                   },
                   {SemilinearSet::point(parseGroup("0"), {}), SemilinearSet::whole(parseGroup("Z/3"))}, {false, true});
    X.scale.kind = Scale::Kind::Unit;
    X.scale.gens = {positiveV(X, 1, {unit})};
    return X;
}

// compacts K inside its unitization: 0 < K < T, K0 = Z and Z^2, delta t -> (k t, 0)
LatticedKModule unitizedCompacts(long k = 1) {
    auto L = chainNamed({"0", "K", "T"});
    FgAbGroup Z = parseGroup("Z"), Z2 = parseGroup("Z^2");
    auto X = build(L, {"0", "Z", "Z^2"},
                   [k](std::size_t I, std::size_t J) {
                       std::size_t r = J == 0 ? 0 : J == 1 ? 1 : 2, c = I == 0 ? 0 : I == 1 ? 1 : 2;
                       if (I == 0) return IntegerMatrix(r, 0);
                       if (I == J) return IntegerMatrix::identity(r);
                       return M({{k}, {0}}, c);
                   },
                   {SemilinearSet::point(parseGroup("0"), {}), lin(Z, {1}, {{1}}),
                    lin(Z2, {0, 1}, {{1, 0}, {-1, 0}, {0, 1}})},
                   {false, false, false});
    X.scale.kind = Scale::Kind::Unit;
    X.scale.gens = {positiveV(X, 2, {0, 1})};
    return X;
}

LatticedKModule compacts(bool unit) {
    auto L = chainNamed({"0", "K"});
    auto X = build(L, {"0", "Z"},
                   [](std::size_t I, std::size_t J) {
                       if (I == 1) return IntegerMatrix::identity(1);
                       return IntegerMatrix(J == 1 ? 1 : 0, 0);
                   },
                   {SemilinearSet::point(parseGroup("0"), {}), lin(parseGroup("Z"), {1}, {{1}})}, {false, false});
    if (unit) {
        X.scale.kind = Scale::Kind::Unit;
        X.scale.gens = {positiveV(X, 1, {1})};
    }
    return X;
}

// C: one stably finite block with K0 = Z and unit 1
LatticedKModule complexNumbers() {
    auto X = compacts(true);
    X.lattice = chainNamed({"0", "T"});
    return X;
}

std::string firstFail(const Report& r) {
    auto f = r.firstFailure();
    return f ? f->name + " " + f->detail : "";
}

bool hasFailure(const Report& r, const std::string& prefix) {
    for (auto& c : r.checks)
        if (!c.ok && c.name.rfind(prefix, 0) == 0) return true;
    return false;
}

}  // namespace

TEST_CASE("finite lattices") {
    auto c3 = FiniteLattice::chain(3);
    CHECK(checkLattice(c3).ok());
    CHECK(c3.join(0, 2) == 2);
    CHECK(c3.covers(0, 1));
    CHECK_FALSE(c3.covers(0, 2));
    auto sq = FiniteLattice::product(FiniteLattice::chain(2), FiniteLattice::chain(2));
    CHECK(sq.size() == 4);
    CHECK(checkLattice(sq).ok());
    CHECK(sq.join(1, 2) == sq.top);
    CHECK(sq.meet(1, 2) == sq.bottom);
    CHECK(latticeIsomorphisms(sq, sq).size() == 2);
    CHECK(latticeIsomorphisms(c3, c3).size() == 1);
    CHECK(latticeIsomorphisms(sq, FiniteLattice::chain(4)).empty());
    auto t = FiniteLattice::withNewTop(sq, "U");
    CHECK(t.size() == 5);
    CHECK(t.names[t.top] == "U");
    CHECK(t.downSet(1).size() == 2);
    // two maximal elements without a join
    CHECK_THROWS_AS(FiniteLattice::fromOrder({"0", "a", "b"}, {{true, true, true}, {false, true, false}, {false, false, true}}),
                    std::invalid_argument);
    CHECK_THROWS(FiniteLattice::fromOrder({"a", "b"}, {{true, true}, {true, true}}));
}

TEST_CASE("semilinear membership: examples") {
    FgAbGroup Z = parseGroup("Z"), Z2 = parseGroup("Z^2");
    auto pos = lin(Z, {1}, {{1}});
    CHECK(pos.membership({5}) == Membership::In);
    CHECK(pos.membership({0}) == Membership::Out);
    CHECK(pos.membership({-1}) == Membership::Out);
    auto top = lin(Z2, {0, 1}, {{1, 0}, {-1, 0}, {0, 1}});
    CHECK(top.contains({-1, 1}));
    CHECK(top.membership({5, 0}) == Membership::Out);
    CHECK(SemilinearSet::whole(parseGroup("Z/3")).contains({2}));
    CHECK(SemilinearSet::whole(parseGroup("Z+Z/2")).contains({-4, 1}));
    CHECK(inMonoid(Z, {{2}, {3}}, {7}) == Membership::In);
    CHECK(inMonoid(Z, {{2}, {3}}, {-1}) != Membership::In);
    auto t = lin(parseGroup("Z/4"), {1}, {{2}});
    CHECK(t.elementsFinite() == std::set<Vec>{{1}, {3}});
    CHECK(t.membership({2}) == Membership::Out);
    AbHom dbl(Z, Z, M({{2}}, 1));
    CHECK(pushforward(dbl, pos).membership({3}) == Membership::Out);
    CHECK(containedIn(dbl, pos, pos) == Membership::In);
    CHECK(containedIn(AbHom::scalar(Z, -1), pos, pos) == Membership::Out);
}

TEST_CASE("semilinear membership agrees with brute force") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> c(-2, 2);
    FgAbGroup Z2 = parseGroup("Z^2");
    int decided = 0;
    for (int trial = 0; trial < 150; ++trial) {
        SemilinearSet s(Z2);
        std::size_t np = 1 + rng() % 3;
        std::vector<Vec> ps;
        for (std::size_t i = 0; i < np; ++i) ps.push_back({c(rng), c(rng)});
        s.add({c(rng), c(rng)}, ps);
        auto reach = s.enumerate(12);
        for (int x = -3; x <= 3; ++x)
            for (int y = -3; y <= 3; ++y) {
                auto m = s.membership({x, y});
                if (m == Membership::In) {
                    ++decided;
                    // a witness exists; it may need coefficients past the enumeration bound
                    if (!reach.count({x, y})) CHECK(s.enumerate(40).count({x, y}) == 1);
                }
                if (m == Membership::Out) {
                    ++decided;
                    CHECK(reach.count({x, y}) == 0);
                }
            }
    }
    CHECK(decided > 5000);
}

TEST_CASE("O4-type value") {
    auto X = cuntz4();
    auto r = validateLatticedKModule(X);
    CHECK_MESSAGE(r.ok(), firstFail(r));
    VElem one = positiveV(X, 1, {1}), two = positiveV(X, 1, {2});
    CHECK(addV(X, one, two) == positiveV(X, 1, {0}));
    CHECK(leqV(X, one, two));
    CHECK(leqV(X, two, one));
    CHECK_FALSE(leqV(X, one, neutralV(X)));
    CHECK(leqV(X, neutralV(X), one));
    auto F = finitizeV(X);
    CHECK(F.monoid.size() == 4);
    CHECK(F.modulus == 0);
    CHECK(idealsOf(F.monoid).size() == 2);
    CHECK(grothendieckFinite(F.monoid).group.sameType(parseGroup("Z/3")));
    auto inf = detectInfinite(X);
    CHECK(inf.verdict);
    CHECK(inf.exact);
    CHECK(hasInfiniteElement(F.monoid));
    auto can = detectCancellation(X);
    CHECK_FALSE(can.verdict);
    CHECK_FALSE(hasCancellation(F.monoid));
    auto g = grothendieckRecover(X);
    CHECK(g.generatesTop);
    CHECK(g.positiveCone.contains({0}));
    CHECK(g.scaleImage.size() == 3);  // every class sits below the unit

    X.infiniteAllowed[1] = false;
    CHECK(hasFailure(validateLatticedKModule(X), "layer A: omits the zero class"));
}

TEST_CASE("unitized compacts") {
    auto X = unitizedCompacts();
    auto r = validateLatticedKModule(X);
    CHECK_MESSAGE(r.ok(), firstFail(r));
    VElem k1 = positiveV(X, 1, {1}), u = positiveV(X, 2, {0, 1});
    CHECK(addV(X, k1, u) == positiveV(X, 2, {1, 1}));
    CHECK(leqV(X, k1, u));
    CHECK_FALSE(leqV(X, u, k1));
    CHECK(leqV(X, positiveV(X, 2, {-5, 1}), u));  // 1 - p with rank p = 5
    CHECK_FALSE(leqV(X, positiveV(X, 2, {5, 1}), u));
    CHECK_FALSE(leqV(X, positiveV(X, 2, {0, 2}), u));
    CHECK_THROWS(finitizeV(X));
    auto F = finitizeV(X, 3);
    CHECK(F.modulus == 3);
    CHECK(F.monoid.size() == 13);
    CHECK(idealsOf(F.monoid).size() == 3);
    CHECK(grothendieckFinite(F.monoid).group.sameType(parseGroup("Z/3+Z/3")));
    CHECK_FALSE(detectInfinite(X).verdict);
    auto can = detectCancellation(X);
    CHECK(can.verdict);
    CHECK(can.exact);
    auto ids = idealsOfLatticed(X);
    REQUIRE(ids.size() == 3);
    for (auto& i : ids) {
        CHECK(i.module.lattice.size() == X.lattice.downSet(i.ideal).size());
        CHECK(validateLatticedKModule(i.module).ok());
    }
    auto g = grothendieckRecover(X);
    CHECK(g.generatesTop);
    CHECK(g.positiveCone.contains({3, 0}));
    CHECK(g.positiveCone.contains({-3, 1}));
    CHECK(g.positiveCone.membership({-1, 0}) == Membership::Out);
    CHECK(g.scaleBounded);
}

TEST_CASE("compacts and the unit scale") {
    auto X = compacts(true);
    CHECK(validateLatticedKModule(X).ok());
    auto g = grothendieckRecover(X);
    CHECK(g.scaleImage == std::vector<Vec>{{0}, {1}});
    auto Y = compacts(false);
    CHECK(validateLatticedKModule(Y).ok());
    CHECK(grothendieckRecover(Y).scaleImage.empty());
    CHECK(detectCancellation(Y).verdict);
}

TEST_CASE("validation catches broken values") {
    auto X = unitizedCompacts();
    X.layers[2] = SemilinearSet::point(X.K0(2), {0, 1});
    CHECK(hasFailure(validateLatticedKModule(X), "layer closure"));

    auto Y = unitizedCompacts();
    Y.delta.at({1, 1}) = standardMorphism(Y.fibers[1], Y.fibers[1], AbHom::scalar(Y.K0(1), -1),
                                          AbHom::zero(Y.fibers[1].G(1), Y.fibers[1].G(1)));
    CHECK(hasFailure(validateLatticedKModule(Y), "delta K->K: identity"));

    auto Z = unitizedCompacts();
    Z.delta.erase({0, 2});
    CHECK(hasFailure(validateLatticedKModule(Z), "connecting maps present"));

    auto W = unitizedCompacts();
    W.scale.gens = {positiveV(W, 1, {1})};
    CHECK(hasFailure(validateLatticedKModule(W), "scale: unit is full"));
}

TEST_CASE("morphisms and isomorphism search") {
    auto X = cuntz4(1), Y = cuntz4(2);
    CHECK(checkVMorphism(X, X, identityV(X), true).ok());
    auto res = isoSearchLatticed(X, Y, CompareMode::Latticed);
    REQUIRE(res.outcome == SearchOutcome::Found);
    CHECK(res.complete);
    CHECK(checkVMorphism(X, Y, *res.witness, true).ok());
    // a properly infinite unit has every class below it, so any fiber automorphism keeps the scale
    CHECK(leqV(Y, applyV(X, Y, *res.witness, positiveV(X, 1, {1})), positiveV(Y, 1, {2})));

    auto K = unitizedCompacts(1), K2 = unitizedCompacts(2);
    CHECK(validateLatticedKModule(K2).ok());
    auto same = isoSearchLatticed(K, K, CompareMode::Latticed);
    CHECK(same.outcome == SearchOutcome::Found);
    CHECK(same.complete);  // a certified witness settles it
    for (auto mode : {CompareMode::Graded, CompareMode::Lambda, CompareMode::Latticed}) {
        auto r = isoSearchLatticed(K, K2, mode);
        CHECK(r.outcome == SearchOutcome::Absent);
        CHECK_FALSE(r.complete);  // infinite fibers: images were bounded
    }

    auto sizes = isoSearchLatticed(K, cuntz4(), CompareMode::Latticed);
    CHECK(sizes.outcome == SearchOutcome::Absent);
    CHECK(sizes.reason == "lattice sizes 3 vs 2");

    auto C = compacts(true), Cn = compacts(false);
    CHECK(isoSearchLatticed(C, Cn, CompareMode::Latticed).outcome == SearchOutcome::Absent);
    CHECK(isoSearchLatticed(C, Cn, CompareMode::Lambda).outcome == SearchOutcome::Found);

    IsoSearchOptions tiny;
    tiny.budget = 1;
    CHECK(isoSearchLatticed(X, Y, CompareMode::Latticed, tiny).outcome == SearchOutcome::BudgetExceeded);
}

TEST_CASE("exactness of 0 -> K -> K~ -> C -> 0") {
    auto K = compacts(false), Kt = unitizedCompacts(), C = complexNumbers();
    VMorphism iota;
    iota.latticeMap = {0, 1};
    iota.fiberMaps = {zeroMorphism(K.fibers[0], Kt.fibers[0]), identityMorphism(K.fibers[1])};
    VMorphism pi;
    pi.latticeMap = {0, 0, 1};
    auto zero1 = [&](const LambdaModule& a, const LambdaModule& b) { return AbHom::zero(a.G(1), b.G(1)); };
    pi.fiberMaps = {zeroMorphism(Kt.fibers[0], C.fibers[0]), zeroMorphism(Kt.fibers[1], C.fibers[0]),
                    standardMorphism(Kt.fibers[2], C.fibers[1], AbHom(Kt.K0(2), C.K0(1), M({{0, 1}}, 2)),
                                     zero1(Kt.fibers[2], C.fibers[1]))};
    auto ex = checkVExactness(K, Kt, C, iota, pi);
    CHECK_MESSAGE(ex.ok(), firstFail(ex.report));

    auto bad = pi;
    bad.fiberMaps[2] = standardMorphism(Kt.fibers[2], C.fibers[1], AbHom(Kt.K0(2), C.K0(1), M({{1, 1}}, 2)),
                                        zero1(Kt.fibers[2], C.fibers[1]));
    CHECK_FALSE(checkVExactness(K, Kt, C, iota, bad).ok());
}

TEST_CASE("finitization respects addition of representatives") {
    auto X = unitizedCompacts();
    auto F = finitizeV(X, 2);
    for (std::size_t a = 0; a < F.elems.size(); ++a)
        for (std::size_t b = 0; b < F.elems.size(); ++b) {
            // representatives are reduced, so add them without the layer check
            const VElem &x = F.elems[a], &y = F.elems[b], &t = F.elems[F.monoid(a, b)];
            std::size_t J = X.lattice.join(x.ideal, y.ideal);
            REQUIRE(t.ideal == J);
            Vec px = pushV(X, x, J).comps[0], py = pushV(X, y, J).comps[0];
            for (std::size_t i = 0; i < px.size(); ++i) {
                Int d = px[i] + py[i] - t.comps[0][i];
                CHECK(d % 2 == 0);
            }
        }
}
