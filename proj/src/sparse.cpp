#include "loopforms/sparse.hpp"

#include <algorithm>
#include <map>

#include "loopforms/errors.hpp"

namespace loopforms {
namespace lin {

SparseMatrix SparseMatrix::identity(int n)
{
    SparseMatrix m(n, n);
    m.entries.reserve(n);
    for (int i = 0; i < n; ++i)
        m.entries.push_back({i, i, Rational(1)});
    return m;
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Entry> triplets)
{
    std::map<std::pair<int, int>, Rational> acc;
    for (auto& e : triplets) {
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
            throw std::out_of_range("matrix entry out of bounds");
        acc[{e.row, e.col}] += e.val;
    }
    SparseMatrix m(rows, cols);
    for (auto& [pos, v] : acc)
        if (!v.is_zero())
            m.entries.push_back({pos.first, pos.second, v});
    return m;
}

Rational SparseMatrix::at(int r, int c) const
{
    auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(r, c),
                               [](const Entry& e, const std::pair<int, int>& p) {
                                   return std::make_pair(e.row, e.col) < p;
                               });
    if (it != entries.end() && it->row == r && it->col == c)
        return it->val;
    return Rational(0);
}

bool SparseMatrix::operator==(const SparseMatrix& o) const
{
    if (rows != o.rows || cols != o.cols || entries.size() != o.entries.size())
        return false;
    for (size_t i = 0; i < entries.size(); ++i)
        if (entries[i].row != o.entries[i].row || entries[i].col != o.entries[i].col ||
            entries[i].val != o.entries[i].val)
            return false;
    return true;
}

std::vector<Rational> SparseMatrix::apply(const std::vector<Rational>& v) const
{
    if (int(v.size()) != cols)
        throw std::invalid_argument("apply: vector length mismatch");
    std::vector<Rational> out(rows, Rational(0));
    for (const auto& e : entries)
        if (!v[e.col].is_zero())
            out[e.row] += e.val * v[e.col];
    return out;
}

SparseMatrix mul(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.cols != b.rows)
        throw std::invalid_argument("mul: dimension mismatch");
    /* index b by row */
    std::vector<std::pair<size_t, size_t>> brow(b.rows, {0, 0});
    {
        size_t i = 0;
        for (int r = 0; r < b.rows; ++r) {
            size_t start = i;
            while (i < b.entries.size() && b.entries[i].row == r)
                ++i;
            brow[r] = {start, i};
        }
    }
    std::vector<Entry> triplets;
    for (const auto& ea : a.entries) {
        auto [lo, hi] = brow[ea.col];
        for (size_t j = lo; j < hi; ++j)
            triplets.push_back({ea.row, b.entries[j].col, ea.val * b.entries[j].val});
    }
    return SparseMatrix::from_triplets(a.rows, b.cols, std::move(triplets));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument("add: dimension mismatch");
    std::vector<Entry> triplets = a.entries;
    triplets.insert(triplets.end(), b.entries.begin(), b.entries.end());
    return SparseMatrix::from_triplets(a.rows, a.cols, std::move(triplets));
}

SparseMatrix scale(const SparseMatrix& a, const Rational& c)
{
    SparseMatrix m(a.rows, a.cols);
    if (c.is_zero())
        return m;
    m.entries = a.entries;
    for (auto& e : m.entries)
        e.val *= c;
    return m;
}

SparseMatrix transpose(const SparseMatrix& a)
{
    std::vector<Entry> triplets;
    triplets.reserve(a.entries.size());
    for (const auto& e : a.entries)
        triplets.push_back({e.col, e.row, e.val});
    return SparseMatrix::from_triplets(a.cols, a.rows, std::move(triplets));
}

SparseMatrix hstack(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.rows != b.rows)
        throw std::invalid_argument("hstack: row mismatch");
    std::vector<Entry> triplets = a.entries;
    for (const auto& e : b.entries)
        triplets.push_back({e.row, e.col + a.cols, e.val});
    return SparseMatrix::from_triplets(a.rows, a.cols + b.cols, std::move(triplets));
}

/* ---- elimination ---- */

namespace {

using SparseRow = std::vector<std::pair<int, Rational>>;  // sorted by col

SparseRow axpy(const SparseRow& x, const Rational& c, const SparseRow& y)
{
    /* x + c*y */
    SparseRow out;
    out.reserve(x.size() + y.size());
    size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            out.push_back(x[i++]);
        } else if (i == x.size() || y[j].first < x[i].first) {
            out.emplace_back(y[j].first, c * y[j].second);
            ++j;
        } else {
            Rational v = x[i].second + c * y[j].second;
            if (!v.is_zero())
                out.emplace_back(x[i].first, v);
            ++i;
            ++j;
        }
    }
    return out;
}

RrefResult rref_sparse(const SparseMatrix& m)
{
    std::vector<SparseRow> rows(m.rows);
    for (const auto& e : m.entries)
        rows[e.row].emplace_back(e.col, e.val);

    std::vector<int> pivot_cols;
    std::vector<int> pivot_row_of;  // parallel to pivot_cols
    std::vector<bool> used(m.rows, false);
    for (int col = 0; col < m.cols; ++col) {
        int pr = -1;
        for (int r = 0; r < m.rows; ++r) {
            if (used[r])
                continue;
            if (!rows[r].empty() && rows[r].front().first == col) {
                pr = r;
                break;
            }
        }
        if (pr < 0)
            continue;
        used[pr] = true;
        Rational inv = rows[pr].front().second.inverse();
        for (auto& [c, v] : rows[pr])
            v *= inv;
        for (int r = 0; r < m.rows; ++r) {
            if (r == pr || rows[r].empty())
                continue;
            Rational coef = Rational(0);
            auto it = std::lower_bound(rows[r].begin(), rows[r].end(), col,
                                       [](const std::pair<int, Rational>& p, int c) { return p.first < c; });
            if (it != rows[r].end() && it->first == col)
                coef = it->second;
            if (!coef.is_zero())
                rows[r] = axpy(rows[r], -coef, rows[pr]);
        }
        pivot_cols.push_back(col);
        pivot_row_of.push_back(pr);
    }

    RrefResult res;
    res.rank = int(pivot_cols.size());
    res.pivot_cols = pivot_cols;
    res.matrix = SparseMatrix(m.rows, m.cols);
    /* pivot rows first in pivot-column order, then zero rows */
    for (size_t k = 0; k < pivot_row_of.size(); ++k)
        for (auto& [c, v] : rows[pivot_row_of[k]])
            res.matrix.entries.push_back({int(k), c, v});
    std::sort(res.matrix.entries.begin(), res.matrix.entries.end(), [](const Entry& a, const Entry& b) {
        return std::make_pair(a.row, a.col) < std::make_pair(b.row, b.col);
    });
    return res;
}

RrefResult rref_dense(const SparseMatrix& m)
{
    std::vector<std::vector<Rational>> a(m.rows, std::vector<Rational>(m.cols, Rational(0)));
    for (const auto& e : m.entries)
        a[e.row][e.col] = e.val;

    std::vector<int> pivot_cols;
    int next_row = 0;
    for (int col = 0; col < m.cols && next_row < m.rows; ++col) {
        int pr = -1;
        for (int r = next_row; r < m.rows; ++r)
            if (!a[r][col].is_zero()) {
                pr = r;
                break;
            }
        if (pr < 0)
            continue;
        std::swap(a[pr], a[next_row]);
        Rational inv = a[next_row][col].inverse();
        for (int c = col; c < m.cols; ++c)
            a[next_row][c] *= inv;
        for (int r = 0; r < m.rows; ++r) {
            if (r == next_row || a[r][col].is_zero())
                continue;
            Rational coef = a[r][col];
            for (int c = col; c < m.cols; ++c)
                a[r][c] -= coef * a[next_row][c];
        }
        pivot_cols.push_back(col);
        ++next_row;
    }

    RrefResult res;
    res.rank = int(pivot_cols.size());
    res.pivot_cols = pivot_cols;
    std::vector<Entry> triplets;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            if (!a[r][c].is_zero())
                triplets.push_back({r, c, a[r][c]});
    res.matrix = SparseMatrix::from_triplets(m.rows, m.cols, std::move(triplets));
    return res;
}

}  // namespace

RrefResult rref(const SparseMatrix& m)
{
    if (m.rows == 0 || m.cols == 0) {
        RrefResult res;
        res.matrix = m;
        return res;
    }
    double density = double(m.nnz()) / (double(m.rows) * double(m.cols));
    if (density > 0.5)
        return rref_dense(m);
    return rref_sparse(m);
}

int rank(const SparseMatrix& m)
{
    return rref(m).rank;
}

std::vector<std::vector<Rational>> kernel_basis(const SparseMatrix& m)
{
    RrefResult r = rref(m);
    std::vector<bool> is_pivot(m.cols, false);
    for (int c : r.pivot_cols)
        is_pivot[c] = true;

    std::vector<std::vector<Rational>> basis;
    for (int free_col = 0; free_col < m.cols; ++free_col) {
        if (is_pivot[free_col])
            continue;
        std::vector<Rational> v(m.cols, Rational(0));
        v[free_col] = Rational(1);
        /* pivot row k has leading 1 at pivot_cols[k] */
        for (const auto& e : r.matrix.entries) {
            if (e.col == free_col && e.row < r.rank)
                v[r.pivot_cols[e.row]] = -e.val;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

int homology_dim(const SparseMatrix& d_in, const SparseMatrix& d_out)
{
    if (d_out.cols != d_in.rows)
        throw std::invalid_argument("homology_dim: middle dimension mismatch");
    if (!mul(d_out, d_in).is_zero())
        throw CompositionNonzero("homology_dim");
    return d_out.cols - rank(d_out) - rank(d_in);
}

std::vector<Rational> RowSpace::reduce(const std::vector<Rational>& v) const
{
    std::vector<Rational> r = v;
    for (size_t i = 0; i < rows_.size(); ++i) {
        const Rational& c = r[leads_[i]];
        if (c.is_zero())
            continue;
        Rational coef = c;  // rows are monic at their lead
        for (size_t j = 0; j < r.size(); ++j)
            if (!rows_[i][j].is_zero())
                r[j] -= coef * rows_[i][j];
    }
    return r;
}

bool RowSpace::insert(const std::vector<Rational>& v)
{
    std::vector<Rational> r = reduce(v);
    int lead = -1;
    for (size_t j = 0; j < r.size(); ++j)
        if (!r[j].is_zero()) {
            lead = int(j);
            break;
        }
    if (lead < 0)
        return false;
    Rational inv = r[lead].inverse();
    for (auto& x : r)
        x *= inv;
    rows_.push_back(std::move(r));
    leads_.push_back(lead);
    return true;
}

HomologyResult homology_reps(const SparseMatrix& d_in, const SparseMatrix& d_out)
{
    HomologyResult res;
    res.dim = homology_dim(d_in, d_out);

    RowSpace boundaries;
    {
        /* columns of d_in as vectors in the middle space */
        std::vector<std::vector<Rational>> cols(d_in.cols, std::vector<Rational>(d_in.rows, Rational(0)));
        for (const auto& e : d_in.entries)
            cols[e.col][e.row] = e.val;
        for (auto& c : cols)
            boundaries.insert(c);
    }
    for (const auto& z : kernel_basis(d_out)) {
        std::vector<Rational> r = boundaries.reduce(z);
        bool nonzero = false;
        for (const auto& x : r)
            if (!x.is_zero()) {
                nonzero = true;
                break;
            }
        if (nonzero) {
            res.reps.push_back(r);
            boundaries.insert(r);
        }
    }
    if (int(res.reps.size()) != res.dim)
        throw std::logic_error("homology_reps: representative count mismatch");
    return res;
}

std::optional<std::vector<Rational>> solve(const SparseMatrix& a, const std::vector<Rational>& b)
{
    if (int(b.size()) != a.rows)
        throw std::invalid_argument("solve: rhs length mismatch");
    std::vector<Entry> triplets = a.entries;
    for (int r = 0; r < a.rows; ++r)
        if (!b[r].is_zero())
            triplets.push_back({r, a.cols, b[r]});
    SparseMatrix aug = SparseMatrix::from_triplets(a.rows, a.cols + 1, std::move(triplets));
    RrefResult rr = rref(aug);
    std::vector<Rational> x(a.cols, Rational(0));
    for (int k = 0; k < rr.rank; ++k) {
        if (rr.pivot_cols[k] == a.cols)
            return std::nullopt;  // pivot in the rhs column: inconsistent
        x[rr.pivot_cols[k]] = rr.matrix.at(k, a.cols);
    }
    return x;
}

}  // namespace lin
}  // namespace loopforms
