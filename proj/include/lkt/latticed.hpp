// Latticed total K-theory values: a finite ideal lattice, a Lambda-module per ideal, connecting
// maps between comparable ideals, a semilinear layer of full classes per ideal, and a scale.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lkt/common.hpp"
#include "lkt/lambda.hpp"
#include "lkt/premon.hpp"
#include "lkt/semilinear.hpp"

namespace lkt {

struct FiniteLattice {
    std::vector<std::string> names;
    std::vector<std::vector<bool>> leq;
    std::vector<std::vector<std::size_t>> joinT, meetT;
    std::size_t bottom = 0, top = 0;

    // Builds join/meet tables from a partial order; throws unless it is a lattice.
    static FiniteLattice fromOrder(std::vector<std::string> names, std::vector<std::vector<bool>> leq);
    static FiniteLattice chain(std::size_t k);  // 0 < 1 < ... < k-1, names "0".."k-1"
    static FiniteLattice product(const FiniteLattice& a, const FiniteLattice& b);
    static FiniteLattice withNewTop(const FiniteLattice& a, const std::string& topName);

    std::size_t size() const { return names.size(); }
    bool le(std::size_t a, std::size_t b) const { return leq[a][b]; }
    std::size_t join(std::size_t a, std::size_t b) const { return joinT[a][b]; }
    std::size_t meet(std::size_t a, std::size_t b) const { return meetT[a][b]; }
    std::size_t index(const std::string& name) const;
    bool covers(std::size_t a, std::size_t b) const;  // a < b with nothing in between
    std::vector<std::size_t> downSet(std::size_t i) const;
};

Report checkLattice(const FiniteLattice& L);
// order isomorphisms a -> b as index maps, in lexicographic order
std::vector<std::vector<std::size_t>> latticeIsomorphisms(const FiniteLattice& a, const FiniteLattice& b,
                                                          std::size_t limit = 100000);

struct VElem {
    std::size_t ideal = 0;
    std::vector<Vec> comps;  // one per graded piece of the fiber; comps[0] is the K0 class
    bool operator==(const VElem& o) const { return ideal == o.ideal && comps == o.comps; }
    bool operator<(const VElem& o) const { return ideal != o.ideal ? ideal < o.ideal : comps < o.comps; }
};

struct Scale {
    enum class Kind { None, Unit, Generators } kind = Kind::None;
    std::vector<VElem> gens;  // Unit: exactly one element
};

struct LatticedKModule {
    CoefficientSet N;
    FiniteLattice lattice;
    std::vector<LambdaModule> fibers;
    std::map<std::pair<std::size_t, std::size_t>, LambdaMorphism> delta;  // every I <= J
    std::vector<SemilinearSet> layers;
    // layers allowed to hold the zero class of their fiber (properly infinite blocks)
    std::vector<bool> infiniteAllowed;
    Scale scale;
    std::vector<std::string> presets;  // modelling presets that went into this value

    const LambdaMorphism& d(std::size_t i, std::size_t j) const { return delta.at({i, j}); }
    const FgAbGroup& K0(std::size_t i) const { return fibers[i].G(0); }
    bool allFinite() const;
    std::size_t pieceCount() const { return 2 + 2 * N.size(); }
};

// restriction to the down-set of an ideal; the lattice is renumbered in increasing index order
LatticedKModule restrictTo(const LatticedKModule& X, std::size_t ideal);

VElem neutralV(const LatticedKModule& X);
// element of the positive part: K0 class v in the layer of I, every other component zero
VElem positiveV(const LatticedKModule& X, std::size_t ideal, const Vec& v);
bool isVElem(const LatticedKModule& X, const VElem& a);
std::string vElemStr(const LatticedKModule& X, const VElem& a);

// pushes a through delta_{ideal(a), J}
VElem pushV(const LatticedKModule& X, const VElem& a, std::size_t J);
VElem addV(const LatticedKModule& X, const VElem& a, const VElem& b);
VElem multipleV(const LatticedKModule& X, long k, const VElem& a);
bool leqV(const LatticedKModule& X, const VElem& a, const VElem& b);

// positive-part elements of the layer of I with coefficients up to bound
std::vector<VElem> enumerateLayer(const LatticedKModule& X, std::size_t ideal, long bound);
std::vector<VElem> enumeratePositive(const LatticedKModule& X, long bound);

Report validateLatticedKModule(const LatticedKModule& X);

struct IdealOfLatticed {
    std::size_t ideal;
    LatticedKModule module;
};
std::vector<IdealOfLatticed> idealsOfLatticed(const LatticedKModule& X);

struct Finitized {
    FiniteMonoid monoid;
    std::vector<VElem> elems;  // representative per monoid element, K0 part reduced
    long modulus = 0;          // 0 when every fiber is finite and nothing was reduced
};
// Finite monoid of the positive part. Infinite fibers need cap > 0: K0 classes are then taken
// modulo m * K0 with m = cap times the lcm of all torsion orders, which is a congruence.
Finitized finitizeV(const LatticedKModule& X, long cap = 0);

struct GrRecovery {
    LambdaModule fiber;            // top fiber
    SemilinearSet positiveCone;    // in K0 of the top fiber
    std::vector<Vec> scaleImage;   // K0 images of scale elements found within the bound
    bool scaleBounded = false;     // scaleImage is a listing cut off at the bound
    bool generatesTop = false;     // pushed layers generate K0 of the top fiber
};
GrRecovery grothendieckRecover(const LatticedKModule& X, long bound = 4);

struct VMorphism {
    std::vector<std::size_t> latticeMap;
    std::vector<LambdaMorphism> fiberMaps;  // fiber of I -> fiber of latticeMap[I]
};

VElem applyV(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f, const VElem& a);
// lambdaLinear = false checks the fiber maps as graded homomorphisms only
Report checkVMorphism(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f, bool scaled,
                      bool lambdaLinear = true);
VMorphism identityV(const LatticedKModule& X);
// inverse of an isomorphism (bijective lattice map, invertible fiber maps)
VMorphism inverseV(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f);

struct ExactnessReport {
    Report report;
    bool ok() const { return report.ok(); }
};
ExactnessReport checkVExactness(const LatticedKModule& X, const LatticedKModule& Y, const LatticedKModule& Z,
                                const VMorphism& iota, const VMorphism& pi, long bound = 4);

struct Detection {
    bool verdict = false;         // infinite found / cancellation holds
    bool exact = true;            // false when the verdict rests on a bounded enumeration
    std::string witness;
    std::vector<std::pair<std::string, bool>> quotientInfinite;  // per nonzero ideal
};
Detection detectInfinite(const LatticedKModule& X);
Detection detectCancellation(const LatticedKModule& X, long bound = 3);

enum class CompareMode { Graded, Lambda, Latticed };
const char* modeName(CompareMode m);
CompareMode parseMode(const std::string& s);

struct LatticedIsoResult {
    SearchOutcome outcome = SearchOutcome::Absent;
    std::optional<VMorphism> witness;
    std::string reason;      // why absent, when a cheap invariant differs
    bool complete = true;    // false when an absence rests on bounded images of infinite fibers
    long long nodes = 0;
};
LatticedIsoResult isoSearchLatticed(const LatticedKModule& X, const LatticedKModule& Y, CompareMode mode,
                                    const IsoSearchOptions& opt = {});

}  // namespace lkt
