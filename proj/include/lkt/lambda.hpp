// Truncated Lambda-modules: Z2 x Z+ graded groups with rho, kappa and beta maps.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lkt/common.hpp"
#include "lkt/zmodule.hpp"

namespace lkt {

struct CoefficientSet {
    std::vector<long> moduli;  // sorted, each >= 2

    CoefficientSet() = default;
    explicit CoefficientSet(std::vector<long> ms);
    static CoefficientSet defaults() { return CoefficientSet({2, 3, 4, 6}); }
    static CoefficientSet parse(const std::string& csv);

    bool contains(long n) const;
    bool divisorClosed() const;
    // ordered pairs (m, n) with m, n >= 2 and mn in the set
    std::vector<std::pair<long, long>> pairs() const;
    std::size_t size() const { return moduli.size(); }
    std::string str() const;
    bool operator==(const CoefficientSet& o) const { return moduli == o.moduli; }
};

// Piece numbering: 0 -> G0, 1 -> G1, 2 + 2k -> G_{0,n_k}, 3 + 2k -> G_{1,n_k}.
struct LambdaModule {
    CoefficientSet N;
    std::vector<FgAbGroup> pieces;
    std::map<long, AbHom> rho[2];                        // G_j -> G_{j,n}
    std::map<long, AbHom> beta[2];                       // G_{j,n} -> G_{1-j}
    std::map<std::pair<long, long>, AbHom> kappaUp[2];   // (m,n): kappa_{mn,m}: G_{j,m} -> G_{j,mn}
    std::map<std::pair<long, long>, AbHom> kappaDown[2]; // (m,n): kappa_{n,mn}: G_{j,mn} -> G_{j,n}

    std::size_t pieceCount() const { return pieces.size(); }
    int index(int j, long n) const;  // n == 0 gives G_j
    const FgAbGroup& G(int j) const { return pieces[j]; }
    const FgAbGroup& Gn(int j, long n) const { return pieces[index(j, n)]; }
    std::string pieceName(std::size_t p) const;
    bool allFinite() const;
    // beta_{m,n}^j = rho_m^{1-j} o beta_n^j : G_{j,n} -> G_{1-j,m}
    AbHom betaMN(int j, long m, long n) const;

    struct MapRef {
        std::string name;
        int src, dst;
        const AbHom* f;
    };
    std::vector<MapRef> structureMaps() const;
};

struct LambdaMorphism {
    std::vector<AbHom> comp;  // one per piece
};

LambdaModule zeroLambdaModule(const CoefficientSet& N);
LambdaModule standardLambdaModule(const FgAbGroup& G0, const FgAbGroup& G1, const CoefficientSet& N);
// Lambda-linear map between standard modules induced by group maps on G0 and G1.
LambdaMorphism standardMorphism(const LambdaModule& S, const LambdaModule& T, const AbHom& f0, const AbHom& f1);

Report validateLambdaModule(const LambdaModule& M);
// structural sanity: shapes of every map, presence of every required map
Report structureCheck(const LambdaModule& M);

LambdaMorphism identityMorphism(const LambdaModule& M);
LambdaMorphism zeroMorphism(const LambdaModule& S, const LambdaModule& T);
LambdaMorphism compose(const LambdaMorphism& g, const LambdaMorphism& f);
bool equalMorphisms(const LambdaMorphism& f, const LambdaMorphism& g);
bool isGradedMorphism(const LambdaModule& S, const LambdaModule& T, const LambdaMorphism& f);
bool checkLambdaLinear(const LambdaModule& S, const LambdaModule& T, const LambdaMorphism& f);
bool isGradedIso(const LambdaModule& S, const LambdaModule& T, const LambdaMorphism& f);

struct LambdaSum {
    LambdaModule sum;
    LambdaMorphism inj[2], proj[2];
};
LambdaSum lambdaDirectSum(const LambdaModule& A, const LambdaModule& B);

struct LambdaIsoResult {
    SearchOutcome outcome = SearchOutcome::Absent;
    std::optional<LambdaMorphism> witness;
    long long nodes = 0;
};

struct IsoSearchOptions {
    long freeBound = 2;  // bound for free coordinates of generator images
    long long budget = 20'000'000;
};

LambdaIsoResult gradedIsoSearch(const LambdaModule& A, const LambdaModule& B, const IsoSearchOptions& opt = {});
LambdaIsoResult lambdaIsoSearch(const LambdaModule& A, const LambdaModule& B, const IsoSearchOptions& opt = {});

struct BetaVariantResult {
    SearchOutcome outcome = SearchOutcome::Found;
    std::vector<LambdaModule> representatives;  // pairwise non-isomorphic in Lambda
    std::size_t validAssignments = 0;
    std::size_t candidateAssignments = 0;
};

// Keeps rho and kappa of the standard module and enumerates every beta that makes both
// families of six-term sequences exact; representatives are certified pairwise non-isomorphic.
BetaVariantResult betaVariantSearch(const FgAbGroup& G0, const FgAbGroup& G1, const CoefficientSet& N,
                                    long long budget = 20'000'000);

struct BetaPair {
    bool found = false;
    FgAbGroup G0, G1;
    CoefficientSet N;
    LambdaModule first, second;
    std::vector<std::string> tried;  // group pairs examined, in order
};

// Starts at (G0, G1, N) and then walks through pairs of finite groups of growing total order
// (at most maxOrder) until a graded-isomorphic but not Lambda-isomorphic pair turns up.
BetaPair findGradedNotLambdaPair(const FgAbGroup& G0, const FgAbGroup& G1, const CoefficientSet& N,
                                 long maxOrder = 32, long long budget = 20'000'000);

}  // namespace lkt
