#ifndef LOOPFORMS_TEST_UTIL_HPP
#define LOOPFORMS_TEST_UTIL_HPP

#include <vector>

#include "loopforms/complexes.hpp"
#include "loopforms/sparse.hpp"
#include "loopforms/util.hpp"

namespace testutil {

using loopforms::Rational;
using loopforms::SplitMix64;
namespace lin = loopforms::lin;
namespace cx = loopforms::cx;

inline lin::SparseMatrix random_int_matrix(SplitMix64& rng, int rows, int cols, int lo = -4, int hi = 4,
                                           int percent_zero = 40)
{
    std::vector<lin::Entry> ts;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (rng.range(0, 99) < percent_zero)
                continue;
            long v = rng.range(lo, hi);
            if (v)
                ts.push_back({r, c, Rational(v)});
        }
    return lin::SparseMatrix::from_triplets(rows, cols, std::move(ts));
}

/* random invertible integer matrix: product of elementary shears and swaps */
inline lin::SparseMatrix random_invertible(SplitMix64& rng, int n, int ops = 12)
{
    lin::SparseMatrix m = lin::SparseMatrix::identity(n);
    if (n < 2)
        return m;
    for (int k = 0; k < ops; ++k) {
        int i = int(rng.range(0, n - 1)), j = int(rng.range(0, n - 1));
        if (i == j)
            continue;
        lin::SparseMatrix e = lin::SparseMatrix::identity(n);
        e.entries.push_back({i, j, Rational(rng.range(-3, 3))});
        e = lin::SparseMatrix::from_triplets(n, n, std::move(e.entries));
        m = lin::mul(m, e);
    }
    return m;
}

/* fraction-free Bareiss elimination rank oracle over the integers */
inline int bareiss_rank(const lin::SparseMatrix& m)
{
    int rows = m.rows, cols = m.cols;
    std::vector<std::vector<long long>> a(rows, std::vector<long long>(cols, 0));
    for (const auto& e : m.entries) {
        if (!e.val.is_integer())
            throw std::invalid_argument("bareiss oracle wants integer matrices");
        a[e.row][e.col] = e.val.num().get_si();
    }
    long long prev = 1;
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (a[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0)
            continue;
        std::swap(a[piv], a[rank]);
        for (int r = rank + 1; r < rows; ++r) {
            for (int c = col + 1; c < cols; ++c)
                a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
            a[r][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return rank;
}

/* random bounded complex with known-good d∘d = 0: a direct sum of shifted
 * two-term identity pieces and zero slots, conjugated by random invertible
 * basis changes per slot */
inline cx::BigradedComplex random_complex(SplitMix64& rng, int pieces = 4)
{
    std::map<cx::Slot, int> dims;
    std::map<cx::Slot, std::vector<std::pair<int, int>>> arrows;  // src slot -> (src idx, tgt idx)
    for (int k = 0; k < pieces; ++k) {
        int d = int(rng.range(-3, 2));
        int w = int(rng.range(0, 2));
        if (rng.range(0, 2) == 0) {
            dims[{d, w}] += 1;  // lone slot, contributes homology
        } else {
            int i = dims[{d, w}]++;
            int j = dims[{d + 1, w}]++;
            arrows[{d, w}].push_back({i, j});
        }
    }
    cx::BigradedComplex c;
    for (const auto& [s, n] : dims) {
        std::vector<std::string> labels;
        for (int i = 0; i < n; ++i)
            labels.push_back("b" + std::to_string(s.deg) + "_" + std::to_string(s.weight) + "_" +
                             std::to_string(i));
        c.set_slot(s, std::move(labels));
    }
    std::map<cx::Slot, lin::SparseMatrix> change, change_inv;
    for (const auto& [s, n] : dims) {
        lin::SparseMatrix g = random_invertible(rng, n, 6);
        change[s] = g;
    }
    auto get_change = [&](cx::Slot s) {
        auto it = change.find(s);
        return it == change.end() ? lin::SparseMatrix::identity(0) : it->second;
    };
    /* inverse via solving g x = e_i */
    auto invert = [&](const lin::SparseMatrix& g) {
        int n = g.rows;
        std::vector<lin::Entry> ts;
        for (int i = 0; i < n; ++i) {
            std::vector<Rational> e(n, Rational(0));
            e[i] = Rational(1);
            auto x = lin::solve(g, e);
            for (int r = 0; r < n; ++r)
                if (!(*x)[r].is_zero())
                    ts.push_back({r, i, (*x)[r]});
        }
        return lin::SparseMatrix::from_triplets(n, n, std::move(ts));
    };
    for (const auto& [s, n] : dims)
        change_inv[s] = invert(change[s]);

    for (const auto& [s, pairs] : arrows) {
        cx::Slot s1{s.deg + 1, s.weight};
        std::vector<lin::Entry> ts;
        for (auto [i, j] : pairs)
            ts.push_back({j, i, Rational(1)});
        lin::SparseMatrix d0 = lin::SparseMatrix::from_triplets(dims[s1], dims[s], std::move(ts));
        lin::SparseMatrix d = lin::mul(get_change(s1), lin::mul(d0, change_inv[s]));
        c.set_diff(s, d);
    }
    c.validate();
    return c;
}

}  // namespace testutil

#endif
