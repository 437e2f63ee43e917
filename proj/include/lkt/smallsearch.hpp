// Backtracking search for families of group homomorphisms subject to commuting squares.
// Works in machine integers; every group involved must have small invariants.
#pragma once

#include <functional>
#include <vector>

#include "lkt/zmodule.hpp"

namespace lkt::search {

struct SGroup {
    std::vector<long> ord;  // 0 marks a free coordinate
    std::size_t n() const { return ord.size(); }
    bool finite() const;
    long cardinality() const;  // only for finite groups
    void normalize(std::vector<long>& v) const;
    bool operator==(const SGroup& o) const { return ord == o.ord; }
};

struct SMat {
    std::size_t rows = 0, cols = 0;
    std::vector<long> a;
    SMat() = default;
    SMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}
    long& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    long operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

SGroup toSmall(const FgAbGroup& g);
SMat toSmall(const IntegerMatrix& m);
IntegerMatrix toBig(const SMat& m);

struct Piece {
    SGroup src, dst;
    long freeBound = 2;  // candidate images use free coordinates in [-freeBound, freeBound]
};

// For every generator e of piece `from`: phi[to] * fx * e == fy * phi[from] * e.
// fx maps src(from) -> src(to); fy maps dst(from) -> dst(to).
struct Edge {
    int from = 0, to = 0;
    SMat fx, fy;
};

struct Problem {
    std::vector<Piece> pieces;
    std::vector<Edge> edges;
    bool requireIso = true;
    // called once a piece is fully assigned; returning false prunes
    std::function<bool(int, const std::vector<SMat>&)> onPieceComplete;
    // called on a complete assignment; returning false rejects it
    std::function<bool(const std::vector<SMat>&)> onComplete;
    long long budget = 20'000'000;
};

enum class Status { Found, Absent, BudgetExceeded };

struct Result {
    Status status = Status::Absent;
    std::vector<SMat> phi;
    long long nodes = 0;
};

// Depth-first over generator images in lexicographic order; the first solution found is the
// lexicographically least one.
Result solve(const Problem& p);

// All elements y of g with k*y == 0 (k == 0: no constraint); free coordinates bounded.
std::vector<std::vector<long>> candidateImages(const SGroup& g, long k, long freeBound);

// Is the map with columns m onto g (g finite or mixed)?
bool surjective(const SGroup& src, const SGroup& dst, const SMat& m);

}  // namespace lkt::search
