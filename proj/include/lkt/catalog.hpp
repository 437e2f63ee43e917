// Builders for block values, direct sums, unitizations, stabilizations and unital extensions
// with trivial boundary maps. Every builder validates its output and throws on failure.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lkt/latticed.hpp"

namespace lkt {

struct BlockSpec {
    enum class Kind { StablyFiniteSimple, Kirchberg, O2Stable, Compacts, Zero } kind = Kind::Zero;
    std::string name = "A";
    FgAbGroup k0, k1;
    std::vector<Vec> coneGens;  // stably finite: generators of the positive cone of k0
    std::optional<Vec> unit;    // unit class; none for a stable block
    std::size_t chain = 1;      // O2-stable: number of nonzero ideals, in a chain
    CoefficientSet N = CoefficientSet::defaults();
};

const char* kindName(BlockSpec::Kind k);
BlockSpec::Kind parseKind(const std::string& s);

LatticedKModule buildBlock(const BlockSpec& spec);

LatticedKModule directSum(const LatticedKModule& X, const LatticedKModule& Y);
// adjoins a unit: new top ideal, K0 gains a Z summand, top layer {(v, s) : s >= 1}
LatticedKModule unitize(const LatticedKModule& X, const std::string& topName = "U");
// forgets the scale
LatticedKModule stabilize(const LatticedKModule& X);

// K-theory of the middle term for a non-split class: 0 -> K_j(B) -> K_j(E) -> K_j(A) -> 0
struct ExtensionClass {
    FgAbGroup k0, k1;
    AbHom iota0, pi0, iota1, pi1;
};

struct BuiltExtension {
    LatticedKModule E, B, A;
    LambdaMorphism iotaTop, piTop;  // top fiber of B -> top fiber of E -> top fiber of A
};

// B stable (no scale), A unital with two ideals; class absent means split. An explicit top
// layer replaces the preset.
BuiltExtension buildExtension(const LatticedKModule& B, const LatticedKModule& A,
                              const std::optional<ExtensionClass>& cls, const std::string& topName = "E",
                              const std::optional<SemilinearSet>& topLayer = std::nullopt);

struct CanonicalMaps {
    VMorphism iota, pi;
};
CanonicalMaps canonicalMorphisms(const BuiltExtension& ext);

// Isomorphic copy: ideals permuted and every graded piece moved by a random automorphism.
// The returned witness maps X to the copy.
struct Transported {
    LatticedKModule copy;
    VMorphism witness;
};
Transported transport(const LatticedKModule& X, unsigned long long seed);
// random automorphism of a canonical group; free coordinates keep entries in {-1, 0, 1}
AbHom randomAutomorphism(const FgAbGroup& g, unsigned long long seed);

// name of the extension top-layer preset, as recorded in LatticedKModule::presets
extern const char* const kExtensionLayerPreset;

}  // namespace lkt
