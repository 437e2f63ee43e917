#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lkt/catalog.hpp"

using namespace lkt;

namespace {

const CoefficientSet N24({2, 4});

BlockSpec kirchberg(const std::string& name, const std::string& k0, std::optional<Vec> unit) {
    BlockSpec s;
    s.kind = BlockSpec::Kind::Kirchberg;
    s.name = name;
    s.k0 = parseGroup(k0);
    s.k1 = parseGroup("0");
    s.unit = std::move(unit);
    s.N = N24;
    return s;
}

BlockSpec compactsSpec() {
    BlockSpec s;
    s.kind = BlockSpec::Kind::Compacts;
    s.name = "K";
    s.N = N24;
    return s;
}

BlockSpec complexSpec() {
    BlockSpec s;
    s.kind = BlockSpec::Kind::StablyFiniteSimple;
    s.name = "C";
    s.k0 = parseGroup("Z");
    s.k1 = parseGroup("0");
    s.coneGens = {{1}};
    s.unit = Vec{1};
    s.N = N24;
    return s;
}

BlockSpec o2(std::size_t chain) {
    BlockSpec s;
    s.kind = BlockSpec::Kind::O2Stable;
    s.name = "P";
    s.chain = chain;
    s.N = N24;
    return s;
}

BlockSpec zeroSpec() {
    BlockSpec s;
    s.N = N24;
    return s;
}

IntegerMatrix M(const std::vector<std::vector<long>>& rows, std::size_t cols) {
    return IntegerMatrix::fromRows(rows, cols);
}

bool exact(const BuiltExtension& e) {
    auto m = canonicalMorphisms(e);
    return checkVExactness(e.B, e.E, e.A, m.iota, m.pi).ok();
}

}  // namespace

TEST_CASE("blocks") {
    auto O4 = buildBlock(kirchberg("O4", "Z/3", Vec{1}));
    CHECK(O4.lattice.size() == 2);
    CHECK(finitizeV(O4).monoid.size() == 4);
    CHECK(O4.layers[1].contains({0}));
    CHECK(detectInfinite(O4).verdict);

    auto K = buildBlock(compactsSpec());
    CHECK(K.layers[1].contains({4}));
    CHECK_FALSE(K.layers[1].contains({0}));
    CHECK(K.scale.kind == Scale::Kind::None);
    CHECK(detectCancellation(K).verdict);

    auto P = buildBlock(o2(1));
    auto F = finitizeV(P);
    CHECK(F.monoid.size() == 2);
    CHECK(F.monoid(1, 1) == 1);
    CHECK(detectInfinite(P).verdict);
    CHECK(buildBlock(o2(3)).lattice.size() == 4);

    CHECK(buildBlock(zeroSpec()).lattice.size() == 1);

    auto bad = complexSpec();
    bad.coneGens = {{1}, {-1}};
    CHECK_THROWS_AS(buildBlock(bad), std::invalid_argument);  // 0 would sit in the layer
    auto badUnit = complexSpec();
    badUnit.unit = Vec{-2};
    CHECK_THROWS_AS(buildBlock(badUnit), std::invalid_argument);
    auto o2unit = o2(1);
    o2unit.unit = Vec{};
    CHECK_THROWS(buildBlock(o2unit));
    CHECK_THROWS(parseKind("bogus"));
    CHECK(parseKind("o2Stable") == BlockSpec::Kind::O2Stable);
}

TEST_CASE("direct sums") {
    auto O4 = buildBlock(kirchberg("O4", "Z/3", Vec{1}));
    auto Z = buildBlock(zeroSpec());
    auto withZero = directSum(O4, Z);
    auto r = isoSearchLatticed(O4, withZero, CompareMode::Latticed);
    CHECK(r.outcome == SearchOutcome::Found);

    auto K = buildBlock(compactsSpec());
    auto KP = directSum(K, buildBlock(o2(1)));
    CHECK(KP.lattice.size() == 4);
    CHECK(latticeIsomorphisms(KP.lattice, FiniteLattice::product(FiniteLattice::chain(2), FiniteLattice::chain(2))).size() == 2);

    auto OO = directSum(O4, buildBlock(kirchberg("O4b", "Z/3", Vec{1})));
    CHECK(OO.lattice.size() == 4);
    CHECK(OO.layers[OO.lattice.top].elementsFinite().size() == 9);
    CHECK(OO.scale.kind == Scale::Kind::Unit);
    auto same = directSum(O4, O4);  // repeated names get primed
    CHECK(same.lattice.names[same.lattice.top] == "O4+O4");
    CHECK(validateLatticedKModule(same).ok());

    CHECK_THROWS(directSum(O4, buildBlock([] {
                               auto s = compactsSpec();
                               s.N = CoefficientSet({2});
                               return s;
                           }())));
}

TEST_CASE("unitization") {
    auto K = buildBlock(compactsSpec());
    auto Kt = unitize(K);
    CHECK(Kt.lattice.size() == 3);
    std::size_t T = Kt.lattice.top;
    CHECK(Kt.layers[T].contains({-7, 1}));
    CHECK_FALSE(Kt.layers[T].contains({3, 0}));
    CHECK(finitizeV(Kt, 3).monoid.size() == 13);

    auto KPt = unitize(directSum(K, buildBlock(o2(1))));
    CHECK(KPt.lattice.size() == 5);
    CHECK(idealsOfLatticed(KPt).size() == 5);
    CHECK(isoSearchLatticed(Kt, KPt, CompareMode::Latticed).reason == "lattice sizes 3 vs 5");

    auto C = unitize(buildBlock(zeroSpec()));
    CHECK(C.lattice.size() == 2);
    CHECK(isoSearchLatticed(C, buildBlock(complexSpec()), CompareMode::Latticed).outcome == SearchOutcome::Found);
    CHECK_THROWS(unitize(Kt));
    CHECK(std::count_if(Kt.presets.begin(), Kt.presets.end(),
                        [](const std::string& p) { return p.rfind("unitization", 0) == 0; }) == 1);
}

TEST_CASE("split extensions") {
    auto K = buildBlock(compactsSpec());
    auto C = buildBlock(complexSpec());
    auto e = buildExtension(K, C, std::nullopt);
    CHECK(e.E.lattice.size() == 3);
    CHECK(exact(e));
    auto r = isoSearchLatticed(unitize(K), e.E, CompareMode::Latticed);
    CHECK(r.outcome == SearchOutcome::Found);
    CHECK_FALSE(detectInfinite(e.E).verdict);
    CHECK(std::find(e.E.presets.begin(), e.E.presets.end(), kExtensionLayerPreset) != e.E.presets.end());

    auto O2 = buildBlock(kirchberg("O2", "0", Vec{}));
    auto e2 = buildExtension(buildBlock(o2(1)), O2, std::nullopt);
    CHECK(e2.E.fibers[e2.E.lattice.top].G(0).isTrivial());
    auto F = finitizeV(e2.E);
    CHECK(F.monoid.size() == 3);
    CHECK(exact(e2));

    auto O4 = buildBlock(kirchberg("O4", "Z/3", Vec{1}));
    auto e3 = buildExtension(K, O4, std::nullopt);
    std::size_t T = e3.E.lattice.top;
    CHECK(e3.E.lattice.size() == 3);
    CHECK(e3.E.layers[T].contains({-5, 0}));
    CHECK(e3.E.layers[T].contains({2, 2}));
    CHECK(exact(e3));
    auto inf = detectInfinite(e3.E);
    CHECK(inf.verdict);
    CHECK(inf.quotientInfinite.back().second);
    CHECK_FALSE(inf.quotientInfinite.front().second);  // the compacts ideal stays finite
}

TEST_CASE("extension errors and explicit classes") {
    auto K = buildBlock(compactsSpec());
    auto C = buildBlock(complexSpec());
    CHECK_THROWS(buildExtension(C, C, std::nullopt));  // ideal not stable
    CHECK_THROWS(buildExtension(K, K, std::nullopt));  // quotient without unit
    CHECK_THROWS(buildExtension(K, unitize(directSum(K, K)), std::nullopt));

    // 0 -> Z -(x2)-> Z -> Z/2 -> 0 with a Kirchberg quotient
    auto A = buildBlock(kirchberg("Q", "Z/2", Vec{1}));
    FgAbGroup Zg = parseGroup("Z"), Z2 = parseGroup("Z/2"), O = parseGroup("0");
    ExtensionClass cls{Zg, O, AbHom(Zg, Zg, M({{2}}, 1)), AbHom(Zg, Z2, M({{1}}, 1)), AbHom::zero(O, O),
                       AbHom::zero(O, O)};
    auto e = buildExtension(K, A, cls);
    CHECK(e.E.K0(e.E.lattice.top).sameType(Zg));
    CHECK(exact(e));
    auto split = buildExtension(K, A, std::nullopt);
    CHECK(isoSearchLatticed(e.E, split.E, CompareMode::Graded).outcome == SearchOutcome::Absent);

    ExtensionClass bad = cls;
    bad.iota0 = AbHom(Zg, Zg, M({{4}}, 1));
    CHECK_THROWS_AS(buildExtension(K, A, bad), std::invalid_argument);
}

TEST_CASE("builder outputs recover their top fiber") {
    auto K = buildBlock(compactsSpec());
    std::vector<LatticedKModule> xs{buildBlock(kirchberg("O4", "Z/3", Vec{1})), K, unitize(K),
                                    unitize(directSum(K, buildBlock(o2(1)))),
                                    buildExtension(K, buildBlock(complexSpec()), std::nullopt).E};
    for (auto& X : xs) {
        auto g = grothendieckRecover(X);
        for (std::size_t p = 0; p < X.pieceCount(); ++p) CHECK(g.fiber.pieces[p].sameType(X.fibers[X.lattice.top].pieces[p]));
        CHECK(g.generatesTop);
        CHECK(validateLatticedKModule(X).ok());
    }
}

TEST_CASE("transported copies are isomorphic") {
    auto K = buildBlock(compactsSpec());
    auto O4 = buildBlock(kirchberg("O4", "Z/3", Vec{1}));
    std::vector<LatticedKModule> xs{unitize(K), directSum(O4, buildBlock(kirchberg("B", "Z/2+Z/4", Vec{0, 1}))),
                                    buildExtension(K, O4, std::nullopt).E};
    for (auto& X : xs)
        for (unsigned long long seed = 1; seed <= 3; ++seed) {
            auto t = transport(X, seed);
            CHECK(validateLatticedKModule(t.copy).ok());
            CHECK(checkVMorphism(X, t.copy, t.witness, true).ok());
            auto r = isoSearchLatticed(X, t.copy, CompareMode::Latticed);
            CHECK(r.outcome == SearchOutcome::Found);
            CHECK(detectInfinite(X).verdict == detectInfinite(t.copy).verdict);
        }
    auto g = parseGroup("Z^2+Z/2+Z/6");
    for (unsigned long long seed = 0; seed < 20; ++seed) CHECK(randomAutomorphism(g, seed).isIso());
}
