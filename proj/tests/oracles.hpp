// Brute-force reference computations used only by the tests.
#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "lkt/zmodule.hpp"

namespace oracle {

using lkt::Int;
using lkt::IntegerMatrix;

inline Int laplaceDeterminant(const IntegerMatrix& m) {
    std::size_t n = m.rows;
    if (n == 0) return 1;
    if (n == 1) return m(0, 0);
    Int det = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (m(0, c) == 0) continue;
        IntegerMatrix minor(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0, k = 0; j < n; ++j)
                if (j != c) minor(i - 1, k++) = m(i, j);
        Int term = m(0, c) * laplaceDeterminant(minor);
        det += (c % 2 ? -term : term);
    }
    return det;
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

// d_k = D_k / D_{k-1} where D_k is the gcd of all k x k minors; stops at the first vanishing D_k.
inline std::vector<Int> invariantFactorsByMinors(const IntegerMatrix& m) {
    std::vector<Int> out;
    Int prev = 1;
    for (std::size_t k = 1; k <= std::min(m.rows, m.cols); ++k) {
        std::vector<std::vector<std::size_t>> rs, cs;
        subsets(m.rows, k, rs);
        subsets(m.cols, k, cs);
        Int g = 0;
        for (auto& r : rs)
            for (auto& c : cs) {
                IntegerMatrix sub(k, k);
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(r[i], c[j]);
                g = gcd(g, laplaceDeterminant(sub));
            }
        if (g == 0) break;
        out.push_back(g / prev);
        prev = g;
    }
    return out;
}

template <class Rng>
lkt::FgAbGroup randomFiniteGroup(Rng& rng, long maxOrder) {
    std::vector<Int> orders;
    long prod = 1;
    int parts = int(rng() % 4);
    for (int i = 0; i < parts; ++i) {
        long d = 2 + long(rng() % 7);
        if (prod * d > maxOrder) break;
        prod *= d;
        orders.push_back(d);
    }
    return lkt::groupFromOrders(orders);
}

template <class Rng>
lkt::AbHom randomHom(Rng& rng, const lkt::FgAbGroup& A, const lkt::FgAbGroup& B) {
    IntegerMatrix m(B.ngens(), A.ngens());
    auto elems = B.elements();
    for (std::size_t i = 0; i < A.ngens(); ++i) {
        std::vector<lkt::Vec> ok;
        for (auto& y : elems) {
            lkt::Vec z = y;
            for (auto& c : z) c *= A.order(i);
            if (B.isZero(z)) ok.push_back(y);
        }
        m.setColumn(i, ok[rng() % ok.size()]);
    }
    return lkt::AbHom(A, B, m);
}

// image(f) == kernel(g) by listing elements
inline bool exactByEnumeration(const lkt::AbHom& f, const lkt::AbHom& g) {
    std::set<lkt::Vec> im, ker;
    for (auto& x : f.src.elements()) im.insert(f.apply(x));
    for (auto& y : g.src.elements())
        if (g.dst.isZero(g.apply(y))) ker.insert(g.src.normalize(y));
    return im == ker;
}

}  // namespace oracle
