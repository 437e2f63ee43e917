// Finite pre-ordered commutative monoids given by Cayley tables.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lkt/zmodule.hpp"

namespace lkt {

struct FiniteMonoid {
    std::vector<std::string> names;
    std::size_t neutral = 0;
    std::vector<std::vector<std::size_t>> add;  // add[a][b] = a + b

    FiniteMonoid() = default;
    // throws std::invalid_argument unless the table is a commutative monoid with the given neutral
    FiniteMonoid(std::vector<std::string> names, std::size_t neutral, std::vector<std::vector<std::size_t>> add);

    std::size_t size() const { return names.size(); }
    std::size_t operator()(std::size_t a, std::size_t b) const { return add[a][b]; }
    std::size_t multiple(std::size_t k, std::size_t x) const;
    std::size_t indexOf(const std::string& name) const;

    // {0, 1, ..., cap} with a + b = min(a + b, cap)
    static FiniteMonoid capped(std::size_t cap);
    // {0} disjoint union with the cyclic group Z/n; element "k~" stands for the class of k
    static FiniteMonoid zeroPlusCyclic(std::size_t n);
};

struct PreorderRelation {
    std::vector<std::vector<bool>> leq;
    bool algebraic = true;  // false when supplied by hand
    bool operator()(std::size_t a, std::size_t b) const { return leq[a][b]; }
};

// x <= y iff y = x + z for some z
PreorderRelation algebraicPreorder(const FiniteMonoid& M);
// checks reflexivity, transitivity and compatibility with addition
bool isCompatiblePreorder(const FiniteMonoid& M, const PreorderRelation& P);
PreorderRelation explicitPreorder(const FiniteMonoid& M, std::vector<std::vector<bool>> table);

bool isPositivelyDirected(const FiniteMonoid& M, const PreorderRelation& P);

using Subset = std::vector<bool>;

// All ideals, sorted by size then lexicographically. Uses the hereditary criterion when every
// element is >= 0; crossCheck also runs the general definition and throws on disagreement.
std::vector<Subset> idealsOf(const FiniteMonoid& M, const PreorderRelation& P, bool crossCheck = false);
std::vector<Subset> idealsOf(const FiniteMonoid& M);
// the general definition, by exhaustive scan over submonoids
std::vector<Subset> idealsByDefinition(const FiniteMonoid& M, const PreorderRelation& P);
// hereditary submonoids: x + y in I implies x in I
std::vector<Subset> hereditarySubmonoids(const FiniteMonoid& M);
// smallest ideal in the list containing both
Subset idealJoin(const std::vector<Subset>& ideals, const Subset& a, const Subset& b);

struct GrothendieckResult {
    FgAbGroup group;
    std::vector<Vec> rho;    // image of each monoid element, canonical coordinates
    std::size_t pairClasses = 0;  // number of classes of the pair quotient
};
GrothendieckResult grothendieckFinite(const FiniteMonoid& M);

bool isScale(const FiniteMonoid& M, const PreorderRelation& P, const Subset& delta);
bool hasCancellation(const FiniteMonoid& M);
bool hasInfiniteElement(const FiniteMonoid& M);

}  // namespace lkt
