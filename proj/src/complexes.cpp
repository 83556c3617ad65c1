#include "loopforms/complexes.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "loopforms/errors.hpp"
#include "loopforms/util.hpp"

namespace loopforms {
namespace cx {

int BigradedComplex::dim(Slot s) const
{
    auto it = basis.find(s);
    return it == basis.end() ? 0 : int(it->second.size());
}

lin::SparseMatrix BigradedComplex::diff_at(Slot s) const
{
    auto it = diff.find(s);
    if (it != diff.end())
        return it->second;
    return lin::SparseMatrix(dim({s.deg + 1, s.weight}), dim(s));
}

void BigradedComplex::set_slot(Slot s, std::vector<std::string> labels)
{
    if (long(labels.size()) > max_basis_cap())
        throw SlotCapExceeded("slot (" + std::to_string(s.deg) + "," + std::to_string(s.weight) + ")");
    if (!labels.empty())
        basis[s] = std::move(labels);
}

void BigradedComplex::set_diff(Slot s, lin::SparseMatrix m)
{
    if (m.cols != dim(s) || m.rows != dim({s.deg + 1, s.weight}))
        throw std::invalid_argument("set_diff: dimension mismatch");
    if (!m.is_zero())
        diff[s] = std::move(m);
}

void BigradedComplex::validate() const
{
    for (const auto& [s, d] : diff) {
        if (d.cols != dim(s) || d.rows != dim({s.deg + 1, s.weight}))
            throw std::invalid_argument("differential dimension mismatch");
        Slot next{s.deg + 1, s.weight};
        if (diff.count(next)) {
            if (!lin::mul(diff_at(next), d).is_zero())
                throw CompositionNonzero("slot (" + std::to_string(s.deg) + "," +
                                         std::to_string(s.weight) + ")");
        }
    }
}

bool BigradedComplex::operator==(const BigradedComplex& o) const
{
    return basis == o.basis && diff == o.diff;
}

lin::SparseMatrix ChainMap::mat_at(Slot s) const
{
    auto it = mats.find(s);
    if (it != mats.end())
        return it->second;
    return lin::SparseMatrix(target.dim({s.deg + deg_shift, s.weight + weight_shift}), source.dim(s));
}

bool ChainMap::commutes() const
{
    Rational sign((deg_shift % 2) ? -1 : 1);
    for (const auto& [s, labels] : source.basis) {
        Slot ts{s.deg + deg_shift, s.weight + weight_shift};
        lin::SparseMatrix lhs = lin::mul(mat_at({s.deg + 1, s.weight}), source.diff_at(s));
        lin::SparseMatrix rhs = lin::scale(lin::mul(target.diff_at(ts), mat_at(s)), sign);
        if (!(lhs == rhs))
            return false;
    }
    return true;
}

lin::SparseMatrix MixedComplex::B_at(Slot s) const
{
    auto it = B.find(s);
    if (it != B.end())
        return it->second;
    return lin::SparseMatrix(c.dim({s.deg - 1, s.weight}), c.dim(s));
}

void MixedComplex::validate() const
{
    c.validate();
    for (const auto& [s, labels] : c.basis) {
        Slot dn{s.deg - 1, s.weight};
        Slot up{s.deg + 1, s.weight};
        if (!lin::mul(B_at(dn), B_at(s)).is_zero())
            throw MixedIdentityFailure("B^2 at (" + std::to_string(s.deg) + "," +
                                       std::to_string(s.weight) + ")");
        lin::SparseMatrix anti = lin::add(lin::mul(c.diff_at(dn), B_at(s)), lin::mul(B_at(up), c.diff_at(s)));
        if (!anti.is_zero())
            throw MixedIdentityFailure("bB+Bb at (" + std::to_string(s.deg) + "," +
                                       std::to_string(s.weight) + ")");
    }
}

SlotHomology homology(const BigradedComplex& c, Slot s)
{
    lin::SparseMatrix d_in = c.diff_at({s.deg - 1, s.weight});
    lin::SparseMatrix d_out = c.diff_at(s);
    lin::HomologyResult h = lin::homology_reps(d_in, d_out);
    return {h.dim, std::move(h.reps)};
}

/******** tensor ********/

namespace {

struct PairBlock {
    Slot sa, sb;
    int offset;  // start index inside the tensor slot
};

}  // namespace

BigradedComplex tensor(const BigradedComplex& c, const BigradedComplex& d)
{
    BigradedComplex t;
    std::map<Slot, std::vector<PairBlock>> blocks;

    for (const auto& [sa, ba] : c.basis)
        for (const auto& [sb, bb] : d.basis) {
            Slot s{sa.deg + sb.deg, sa.weight + sb.weight};
            blocks[s].push_back({sa, sb, 0});
        }
    for (auto& [s, bl] : blocks) {
        std::sort(bl.begin(), bl.end(),
                  [](const PairBlock& x, const PairBlock& y) { return std::tie(x.sa, x.sb) < std::tie(y.sa, y.sb); });
        std::vector<std::string> labels;
        for (auto& b : bl) {
            b.offset = int(labels.size());
            for (const auto& la : c.basis.at(b.sa))
                for (const auto& lb : d.basis.at(b.sb))
                    labels.push_back("[" + la + "|" + lb + "]");
        }
        t.set_slot(s, std::move(labels));
    }

    auto offset_of = [&](Slot s, Slot sa, Slot sb) -> int {
        auto it = blocks.find(s);
        if (it == blocks.end())
            return -1;
        for (const auto& b : it->second)
            if (b.sa == sa && b.sb == sb)
                return b.offset;
        return -1;
    };

    for (const auto& [s, bl] : blocks) {
        Slot s1{s.deg + 1, s.weight};
        std::vector<lin::Entry> triplets;
        for (const auto& b : bl) {
            int na = int(c.basis.at(b.sa).size());
            int nb = int(d.basis.at(b.sb).size());
            lin::SparseMatrix da = c.diff_at(b.sa);
            if (!da.is_zero()) {
                int off1 = offset_of(s1, {b.sa.deg + 1, b.sa.weight}, b.sb);
                for (const auto& e : da.entries)
                    for (int j = 0; j < nb; ++j)
                        triplets.push_back({off1 + e.row * nb + j, b.offset + e.col * nb + j, e.val});
            }
            lin::SparseMatrix db = d.diff_at(b.sb);
            if (!db.is_zero()) {
                Rational sign((b.sa.deg % 2) ? -1 : 1);
                int off2 = offset_of(s1, b.sa, {b.sb.deg + 1, b.sb.weight});
                for (int i = 0; i < na; ++i)
                    for (const auto& e : db.entries)
                        triplets.push_back({off2 + i * db.rows + e.row, b.offset + i * nb + e.col,
                                            e.val * sign});
            }
        }
        if (!triplets.empty())
            t.set_diff(s, lin::SparseMatrix::from_triplets(t.dim(s1), t.dim(s), std::move(triplets)));
    }
    t.validate();
    return t;
}

BigradedComplex shear(const BigradedComplex& c, int n)
{
    BigradedComplex out;
    for (const auto& [s, labels] : c.basis)
        out.basis[{s.deg - n * s.weight, s.weight}] = labels;
    for (const auto& [s, m] : c.diff)
        out.diff[{s.deg - n * s.weight, s.weight}] = m;
    return out;
}

BigradedComplex cone(const ChainMap& f)
{
    if (f.deg_shift != 0 || f.weight_shift != 0)
        throw NotChainMap("cone needs a degree-0, weight-0 map");
    if (!f.commutes())
        throw NotChainMap("map does not commute with differentials");

    /* Cone^(n,w) = C^(n+1,w) ⊕ D^(n,w), d(c,x) = (-dc, f(c) + dx) */
    BigradedComplex out;
    auto src_dim = [&](Slot s) { return f.source.dim({s.deg + 1, s.weight}); };
    std::map<Slot, bool> slots;
    for (const auto& [s, l] : f.source.basis)
        slots[{s.deg - 1, s.weight}] = true;
    for (const auto& [s, l] : f.target.basis)
        slots[s] = true;

    for (const auto& [s, _] : slots) {
        std::vector<std::string> labels;
        Slot cs{s.deg + 1, s.weight};
        if (f.source.basis.count(cs))
            for (const auto& l : f.source.basis.at(cs))
                labels.push_back("c:" + l);
        if (f.target.basis.count(s))
            for (const auto& l : f.target.basis.at(s))
                labels.push_back("t:" + l);
        out.set_slot(s, std::move(labels));
    }
    for (const auto& [s, _] : slots) {
        Slot s1{s.deg + 1, s.weight};
        Slot cs{s.deg + 1, s.weight};
        int nc = src_dim(s), nt = f.target.dim(s);
        int nc1 = src_dim(s1);
        std::vector<lin::Entry> triplets;
        lin::SparseMatrix dc = f.source.diff_at(cs);
        for (const auto& e : dc.entries)
            triplets.push_back({e.row, e.col, -e.val});
        lin::SparseMatrix fm = f.mat_at(cs);
        for (const auto& e : fm.entries)
            triplets.push_back({nc1 + e.row, e.col, e.val});
        lin::SparseMatrix dt = f.target.diff_at(s);
        for (const auto& e : dt.entries)
            triplets.push_back({nc1 + e.row, nc + e.col, e.val});
        if (!triplets.empty())
            out.set_diff(s, lin::SparseMatrix::from_triplets(out.dim(s1), nc + nt, std::move(triplets)));
    }
    out.validate();
    return out;
}

/******** mixed totalization ********/

BigradedComplex totalize_mixed(const MixedComplex& m, Totalization variant, int lo, int hi)
{
    if (lo > hi)
        throw std::invalid_argument("empty degree window");

    /* degree support per weight */
    std::map<int, std::pair<int, int>> span;  // weight -> [dmin, dmax]
    for (const auto& [s, l] : m.c.basis) {
        auto it = span.find(s.weight);
        if (it == span.end())
            span[s.weight] = {s.deg, s.deg};
        else {
            it->second.first = std::min(it->second.first, s.deg);
            it->second.second = std::max(it->second.second, s.deg);
        }
    }

    auto column_ok = [&](int p) {
        switch (variant) {
            case Totalization::Cyclic: return p <= 0;
            case Totalization::Negative: return p >= 0;
            case Totalization::Periodic: return true;
        }
        return false;
    };

    /* columns contributing to output degree D at weight w:
     * those p with dmin <= D - 2p <= dmax */
    auto columns = [&](int D, int w) {
        std::vector<int> out;
        auto it = span.find(w);
        if (it == span.end())
            return out;
        auto [dmin, dmax] = it->second;
        for (int p = (D - dmax - 1) / 2 - 1; p <= (D - dmin) / 2 + 1; ++p) {
            int d = D - 2 * p;
            if (d < dmin || d > dmax)
                continue;
            if (!column_ok(p))
                continue;
            if (m.c.dim({d, w}) > 0)
                out.push_back(p);
        }
        return out;
    };

    BigradedComplex out;
    std::map<std::pair<int, int>, std::map<int, int>> offsets;  // (D,w) -> p -> offset

    for (const auto& [w, sp] : span) {
        for (int D = lo - 1; D <= hi + 1; ++D) {
            std::vector<std::string> labels;
            for (int p : columns(D, w)) {
                offsets[{D, w}][p] = int(labels.size());
                for (const auto& l : m.c.basis.at({D - 2 * p, w}))
                    labels.push_back("u^" + std::to_string(p) + "|" + l);
            }
            out.set_slot({D, w}, std::move(labels));
        }
    }

    for (const auto& [w, sp] : span) {
        for (int D = lo - 1; D <= hi; ++D) {
            Slot s{D, w}, s1{D + 1, w};
            if (out.dim(s) == 0 || out.dim(s1) == 0)
                continue;
            std::vector<lin::Entry> triplets;
            auto& offs = offsets[{D, w}];
            auto& offs1 = offsets[{D + 1, w}];
            for (auto& [p, off] : offs) {
                Slot src{D - 2 * p, w};
                /* b within column p */
                if (offs1.count(p)) {
                    lin::SparseMatrix b = m.c.diff_at(src);
                    for (const auto& e : b.entries)
                        triplets.push_back({offs1[p] + e.row, off + e.col, e.val});
                }
                /* B into column p+1 */
                if (offs1.count(p + 1)) {
                    lin::SparseMatrix B = m.B_at(src);
                    for (const auto& e : B.entries)
                        triplets.push_back({offs1[p + 1] + e.row, off + e.col, e.val});
                }
            }
            if (!triplets.empty())
                out.set_diff(s, lin::SparseMatrix::from_triplets(out.dim(s1), out.dim(s), std::move(triplets)));
        }
    }
    out.validate();
    return out;
}

std::vector<DimRow> homology_table(const BigradedComplex& c, int lo, int hi, bool parallel)
{
    std::map<int, bool> weights;
    for (const auto& [s, l] : c.basis)
        weights[s.weight] = true;

    std::vector<DimRow> rows;
    for (int deg = hi; deg >= lo; --deg)
        for (const auto& [w, _] : weights)
            rows.push_back({deg, w, 0});

    auto compute = [&](size_t i) { rows[i].dim = homology(c, {rows[i].deg, rows[i].weight}).dim; };
    if (!parallel || rows.size() < 2) {
        for (size_t i = 0; i < rows.size(); ++i)
            compute(i);
    } else {
        unsigned nthreads = std::min<unsigned>(std::thread::hardware_concurrency(), 8);
        if (nthreads < 2)
            nthreads = 2;
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                    compute(i);
            });
        for (auto& th : pool)
            th.join();
    }

    /* Euler characteristic invariant, per weight slice whose whole degree
     * support sits inside the window */
    for (const auto& [w, _] : weights) {
        int dmin = hi + 1, dmax = lo - 1;
        int chi_slots = 0;
        for (const auto& [s, labels] : c.basis)
            if (s.weight == w) {
                dmin = std::min(dmin, s.deg);
                dmax = std::max(dmax, s.deg);
                chi_slots += (s.deg % 2 ? -1 : 1) * int(labels.size());
            }
        if (dmin < lo || dmax > hi)
            continue;
        int chi_h = 0;
        for (const auto& r : rows)
            if (r.weight == w)
                chi_h += (r.deg % 2 ? -1 : 1) * r.dim;
        if (chi_slots != chi_h)
            throw std::logic_error("Euler characteristic mismatch in weight " + std::to_string(w));
    }
    return rows;
}

}  // namespace cx
}  // namespace loopforms
