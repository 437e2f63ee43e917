// Finite unions of linear sets  o + N p1 + ... + N pk  inside a finitely generated abelian group.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "lkt/zmodule.hpp"

namespace lkt {

enum class Membership { In, Out, Unknown };

struct LinearComponent {
    Vec offset;
    std::vector<Vec> periods;
};

struct SemilinearSet {
    FgAbGroup ambient;
    std::vector<LinearComponent> components;

    SemilinearSet() = default;
    explicit SemilinearSet(FgAbGroup g) : ambient(std::move(g)) {}

    static SemilinearSet empty(const FgAbGroup& g) { return SemilinearSet(g); }
    static SemilinearSet point(const FgAbGroup& g, const Vec& x);
    // the whole group as one component: offset 0, periods +-free generators and torsion generators
    static SemilinearSet whole(const FgAbGroup& g);

    bool isEmpty() const { return components.empty(); }
    void add(Vec offset, std::vector<Vec> periods);

    // Exact when the cone part of the solution is unique or the search finds a witness;
    // Unknown only when the bounded fallback comes back empty-handed.
    Membership membership(const Vec& x) const;
    bool contains(const Vec& x) const { return membership(x) == Membership::In; }

    // elements o + sum k_i p_i with every k_i <= bound, normalized and deduplicated
    std::set<Vec> enumerate(long bound, std::size_t limit = 200000) const;
    // all elements; the ambient group must be finite
    std::set<Vec> elementsFinite() const;

    std::string str() const;
};

// image under a homomorphism from the ambient group
SemilinearSet pushforward(const AbHom& f, const SemilinearSet& s);
// product inside a direct sum, through the summand inclusions
SemilinearSet productSet(const FgAbGroup& sum, const AbHom& inj0, const SemilinearSet& a, const AbHom& inj1,
                         const SemilinearSet& b);

// Sufficient test for f(a) being contained in b: every component of a lands, offset and
// periods, inside a single component of b.
bool containedSymbolically(const AbHom& f, const SemilinearSet& a, const SemilinearSet& b);

// Whether f(a) is contained in b: symbolic test first, then a search for a counterexample among
// elements of a with coefficients up to bound.
Membership containedIn(const AbHom& f, const SemilinearSet& a, const SemilinearSet& b, long bound = 4);

// membership of x in the monoid generated by gens
Membership inMonoid(const FgAbGroup& g, const std::vector<Vec>& gens, const Vec& x);

}  // namespace lkt
