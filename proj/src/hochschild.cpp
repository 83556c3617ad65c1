#include "loopforms/hochschild.hpp"

#include <algorithm>
#include <bit>
#include <functional>

#include "loopforms/derham.hpp"
#include "loopforms/errors.hpp"

namespace loopforms {
namespace hoch {

namespace {

bool vec_mono_less(const std::vector<alg::Monomial>& a, const std::vector<alg::Monomial>& b)
{
    if (a.size() != b.size())
        return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i) {
        if (alg::mono_less(a[i], b[i]))
            return true;
        if (alg::mono_less(b[i], a[i]))
            return false;
    }
    return false;
}

void check_bar_supported(const alg::GCAlgebra& a)
{
    for (const auto& g : a.gens)
        if (g.coh_degree != 0)
            throw GradingError("bar complex needs generators of coh-degree 0 (got " + g.name + ")");
    if (!a.is_weight_graded())
        throw GradingError("bar complex needs a poly-weight-graded rewriting basis");
}

std::string tensor_label(const alg::GCAlgebra& a, const std::vector<alg::Monomial>& t)
{
    std::string s;
    for (size_t i = 0; i < t.size(); ++i) {
        if (i)
            s += "|";
        s += a.monomial_str(t[i]);
    }
    return s;
}

}  // namespace

int BarComplex::tensor_index(cx::Slot s, const std::vector<alg::Monomial>& t) const
{
    auto it = tensors.find(s);
    if (it == tensors.end())
        return -1;
    const auto& v = it->second;
    auto pos = std::lower_bound(v.begin(), v.end(), t, vec_mono_less);
    if (pos == v.end() || !(*pos == t))
        return -1;
    return int(pos - v.begin());
}

BarComplex bar_complex(const alg::GCAlgebra& a, int max_weight, int min_degree)
{
    check_bar_supported(a);
    if (max_weight < 0)
        throw std::invalid_argument("max_weight must be >= 0");

    BarComplex bar;
    bar.a = a;
    bar.max_weight = max_weight;
    bar.min_degree = min_degree;

    /* monomial bases per exact poly-weight */
    std::vector<std::vector<alg::Monomial>> mono(max_weight + 1);
    for (int w = 0; w <= max_weight; ++w)
        mono[w] = alg::monomials_of_weight(a, w);

    /* enumerate a0 ⊗ ... ⊗ an, inner factors nonunit; built down to degree
     * -max_weight so the truncation is closed under both b and B */
    for (int w = 0; w <= max_weight; ++w) {
        for (int n = 0; n <= w; ++n) {
            std::vector<std::vector<alg::Monomial>> slot;
            std::vector<alg::Monomial> cur(n + 1);
            std::function<void(int, int)> rec = [&](int pos, int remaining) {
                if (pos == n + 1) {
                    if (remaining == 0)
                        slot.push_back(cur);
                    return;
                }
                int minw = pos == 0 ? 0 : 1;
                int reserve = n - pos;  // inner factors still to place
                for (int wi = minw; wi <= remaining - reserve; ++wi) {
                    for (const auto& m : mono[wi]) {
                        cur[pos] = m;
                        rec(pos + 1, remaining - wi);
                    }
                }
            };
            rec(0, w);
            if (slot.empty())
                continue;
            std::sort(slot.begin(), slot.end(), vec_mono_less);
            std::vector<std::string> labels;
            labels.reserve(slot.size());
            for (const auto& t : slot)
                labels.push_back(tensor_label(a, t));
            cx::Slot s{-n, w};
            bar.bc.set_slot(s, std::move(labels));
            bar.tensors[s] = std::move(slot);
        }
    }

    /* Hochschild boundary */
    for (const auto& [s, slot] : bar.tensors) {
        int n = -s.deg;
        if (n == 0)
            continue;
        cx::Slot target{s.deg + 1, s.weight};
        std::vector<lin::Entry> triplets;
        for (int col = 0; col < int(slot.size()); ++col) {
            const auto& t = slot[col];
            auto emit = [&](const std::vector<alg::Monomial>& parts, int merged_pos,
                            const alg::AlgebraElement& prod, const Rational& sign) {
                for (const auto& term : prod.terms) {
                    if (merged_pos > 0 && term.mon.poly_weight() == 0)
                        continue;  // unit dies in the normalized complex
                    std::vector<alg::Monomial> nt = parts;
                    nt[merged_pos] = term.mon;
                    int row = bar.tensor_index(target, nt);
                    if (row < 0)
                        throw std::logic_error("bar boundary left the truncation");
                    triplets.push_back({row, col, sign * term.coef});
                }
            };
            for (int i = 0; i + 1 <= n; ++i) {
                alg::AlgebraElement prod =
                    bar.a.mul_nf(alg::e_term(t[i], Rational(1)), alg::e_term(t[i + 1], Rational(1)));
                if (prod.is_zero())
                    continue;
                std::vector<alg::Monomial> parts;
                for (int k = 0; k <= n; ++k)
                    if (k != i + 1)
                        parts.push_back(t[k]);
                emit(parts, i, prod, Rational((i % 2) ? -1 : 1));
            }
            /* wrap-around term, lands in position 0 */
            {
                alg::AlgebraElement prod =
                    bar.a.mul_nf(alg::e_term(t[n], Rational(1)), alg::e_term(t[0], Rational(1)));
                if (!prod.is_zero()) {
                    std::vector<alg::Monomial> parts;
                    parts.push_back(t[0]);  // placeholder, overwritten by emit
                    for (int k = 1; k <= n - 1; ++k)
                        parts.push_back(t[k]);
                    emit(parts, 0, prod, Rational((n % 2) ? -1 : 1));
                }
            }
        }
        if (!triplets.empty())
            bar.bc.set_diff(s, lin::SparseMatrix::from_triplets(bar.bc.dim(target), int(slot.size()),
                                                                std::move(triplets)));
    }
    bar.bc.validate();
    return bar;
}

cx::MixedComplex connes_B(const BarComplex& bar)
{
    cx::MixedComplex mixed;
    mixed.c = bar.bc;
    for (const auto& [s, slot] : bar.tensors) {
        int n = -s.deg;
        cx::Slot target{s.deg - 1, s.weight};
        if (bar.bc.dim(target) == 0)
            continue;
        std::vector<lin::Entry> triplets;
        alg::Monomial unit = bar.a.one();
        for (int col = 0; col < int(slot.size()); ++col) {
            const auto& t = slot[col];
            if (t[0].poly_weight() == 0)
                continue;  // B vanishes when a0 is the unit
            for (int i = 0; i <= n; ++i) {
                std::vector<alg::Monomial> nt;
                nt.push_back(unit);
                for (int k = i; k <= n; ++k)
                    nt.push_back(t[k]);
                for (int k = 0; k < i; ++k)
                    nt.push_back(t[k]);
                int row = bar.tensor_index(target, nt);
                if (row < 0)
                    throw std::logic_error("connes_B left the truncation");
                triplets.push_back({row, col, Rational(((n * i) % 2) ? -1 : 1)});
            }
        }
        if (!triplets.empty())
            mixed.B[s] = lin::SparseMatrix::from_triplets(bar.bc.dim(target), int(slot.size()),
                                                          std::move(triplets));
    }
    mixed.validate();  // throws MixedIdentityFailure on a sign bug
    return mixed;
}

/******** Koszul backend and HKR ********/

namespace {

/* p-forms over a polynomial algebra: (coefficient monomial, dx mask) */
struct PolyForms {
    const alg::GCAlgebra* a;
    int nvars;

    std::vector<std::pair<alg::Monomial, uint64_t>> basis(int p, int w) const
    {
        std::vector<std::pair<alg::Monomial, uint64_t>> out;
        if (p < 0 || p > nvars || w < p)
            return out;
        std::vector<alg::Monomial> coeffs = alg::monomials_of_weight(*a, w - p);
        for (uint64_t mask = 0; mask < (uint64_t(1) << nvars); ++mask) {
            if (std::popcount(mask) != p)
                continue;
            for (const auto& m : coeffs)
                out.push_back({m, mask});
        }
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
            if (x.second != y.second)
                return x.second < y.second;
            return alg::mono_less(x.first, y.first);
        });
        return out;
    }

    std::string label(const std::pair<alg::Monomial, uint64_t>& f) const
    {
        std::string s = a->monomial_str(f.first);
        for (int i = 0; i < nvars; ++i)
            if ((f.second >> i) & 1)
                s += "*d" + a->gens[a->even_gens[i]].name;
        return s;
    }

    /* de Rham differential: (m, M) -> sum_i exp_i (m/x_i, M ∪ i) with the
     * wedge sign (-1)^{#(j in M, j < i)} */
    std::vector<std::tuple<alg::Monomial, uint64_t, Rational>> d(
        const std::pair<alg::Monomial, uint64_t>& f) const
    {
        std::vector<std::tuple<alg::Monomial, uint64_t, Rational>> out;
        for (int i = 0; i < nvars; ++i) {
            int e = f.first.even_exp[i];
            if (!e || ((f.second >> i) & 1))
                continue;
            alg::Monomial m = f.first;
            m.even_exp[i] -= 1;
            int below = std::popcount(f.second & ((uint64_t(1) << i) - 1));
            out.push_back({std::move(m), f.second | (uint64_t(1) << i),
                           Rational(e) * Rational((below % 2) ? -1 : 1)});
        }
        return out;
    }
};

int find_form(const std::vector<std::pair<alg::Monomial, uint64_t>>& basis,
              const alg::Monomial& m, uint64_t mask)
{
    for (size_t i = 0; i < basis.size(); ++i)
        if (basis[i].second == mask && basis[i].first == m)
            return int(i);
    return -1;
}

/* all permutations of idx with signs */
std::vector<std::pair<std::vector<int>, int>> signed_permutations(std::vector<int> idx)
{
    std::vector<std::pair<std::vector<int>, int>> out;
    std::sort(idx.begin(), idx.end());
    do {
        int inv = 0;
        for (size_t i = 0; i < idx.size(); ++i)
            for (size_t j = i + 1; j < idx.size(); ++j)
                if (idx[i] > idx[j])
                    ++inv;
        out.push_back({idx, (inv % 2) ? -1 : 1});
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

Rational factorial(int n)
{
    Rational r(1);
    for (int i = 2; i <= n; ++i)
        r *= Rational(i);
    return r;
}

}  // namespace

cx::BigradedComplex koszul_hh(const alg::GCAlgebra& a, int max_weight)
{
    if (a.is_polynomial()) {
        PolyForms forms{&a, a.n_even()};
        cx::BigradedComplex out;
        for (int w = 0; w <= max_weight; ++w)
            for (int p = 0; p <= std::min(w, a.n_even()); ++p) {
                auto b = forms.basis(p, w);
                if (b.empty())
                    continue;
                std::vector<std::string> labels;
                for (const auto& f : b)
                    labels.push_back(forms.label(f));
                /* the diagonal generators x_i⊗1 - 1⊗x_i die after base
                 * change, so the differential is zero */
                out.set_slot({-p, w}, std::move(labels));
            }
        return out;
    }
    /* declared-regular-sequence smooth quotient: Jacobian-presented forms */
    dr::OmegaAlgebra omega = dr::kaehler(a);
    cx::BigradedComplex out;
    for (int w = 0; w <= max_weight; ++w)
        for (int p = 0; p <= a.n_even(); ++p) {
            auto b = alg::basis_exact_weight(omega.omega, p, p, w);
            if (b.empty())
                continue;
            std::vector<std::string> labels;
            for (const auto& m : b)
                labels.push_back(omega.omega.monomial_str(m));
            out.set_slot({-p, w}, std::move(labels));
        }
    return out;
}

cx::ChainMap hkr_map(const alg::GCAlgebra& a, int n, int max_weight)
{
    if (!a.is_polynomial())
        throw NotSmooth("hkr_map is defined for polynomial algebras");
    BarComplex bar = bar_complex(a, max_weight, -max_weight);
    PolyForms forms{&a, a.n_even()};

    cx::ChainMap f;
    f.source = koszul_hh(a, max_weight);
    f.target = bar.bc;

    for (int w = 0; w <= max_weight; ++w) {
        auto fb = forms.basis(n, w);
        if (fb.empty())
            continue;
        cx::Slot s{-n, w};
        std::vector<lin::Entry> triplets;
        for (int col = 0; col < int(fb.size()); ++col) {
            const auto& [m, mask] = fb[col];
            std::vector<int> idx;
            for (int i = 0; i < a.n_even(); ++i)
                if ((mask >> i) & 1)
                    idx.push_back(i);
            for (const auto& [perm, sgn] : signed_permutations(idx)) {
                std::vector<alg::Monomial> t;
                t.push_back(m);
                for (int i : perm)
                    t.push_back(a.gen_monomial(a.even_gens[i]));
                int row = bar.tensor_index(s, t);
                if (row < 0)
                    throw std::logic_error("hkr image outside bar truncation");
                triplets.push_back({row, col, Rational(sgn)});
            }
        }
        f.mats[s] = lin::SparseMatrix::from_triplets(bar.bc.dim(s), int(fb.size()), std::move(triplets));
    }
    return f;
}

bool hkr_is_quasi_iso(const alg::GCAlgebra& a, int n, int max_weight)
{
    cx::ChainMap f = hkr_map(a, n, max_weight);
    if (!f.commutes())
        return false;  // image not made of cycles
    for (int w = 0; w <= max_weight; ++w) {
        cx::Slot s{-n, w};
        int src_dim = f.source.dim(s);
        cx::SlotHomology h = cx::homology(f.target, s);
        if (h.dim != src_dim)
            return false;
        /* residues of the image columns must stay independent mod boundaries */
        lin::RowSpace space;
        lin::SparseMatrix d_in = f.target.diff_at({s.deg - 1, s.weight});
        std::vector<std::vector<Rational>> cols(d_in.cols, std::vector<Rational>(d_in.rows, Rational(0)));
        for (const auto& e : d_in.entries)
            cols[e.col][e.row] = e.val;
        for (auto& c : cols)
            space.insert(c);
        int boundary_dim = space.dim();
        lin::SparseMatrix mat = f.mat_at(s);
        for (int col = 0; col < src_dim; ++col) {
            std::vector<Rational> v(mat.rows, Rational(0));
            for (const auto& e : mat.entries)
                if (e.col == col)
                    v[e.row] = e.val;
            if (!space.insert(v))
                return false;  // dies or collides in homology
        }
        if (space.dim() - boundary_dim != h.dim)
            return false;
    }
    return true;
}

BScalar verify_B_is_deRham(const alg::GCAlgebra& a, int n, int max_weight)
{
    if (!a.is_polynomial())
        throw NotSmooth("verify_B_is_deRham is defined for polynomial algebras");
    BarComplex bar = bar_complex(a, max_weight, -max_weight);
    cx::MixedComplex mixed = connes_B(bar);
    cx::ChainMap eps_n = hkr_map(a, n, max_weight);
    cx::ChainMap eps_n1 = hkr_map(a, n + 1, max_weight);
    PolyForms forms{&a, a.n_even()};

    Rational inv_n = factorial(n).inverse();
    Rational inv_n1 = factorial(n + 1).inverse();

    bool have_c = false;
    Rational c(0);
    std::vector<std::pair<std::vector<Rational>, std::vector<Rational>>> constraints;

    for (int w = 0; w <= max_weight; ++w) {
        auto fb = forms.basis(n, w);
        if (fb.empty())
            continue;
        cx::Slot sn{-n, w};
        cx::Slot sn1{-n - 1, w};
        auto fb1 = forms.basis(n + 1, w);

        lin::SparseMatrix lhs = lin::scale(lin::mul(mixed.B_at(sn), eps_n.mat_at(sn)), inv_n);

        /* rhs = eps_{n+1} ∘ d as a matrix on the form bases */
        std::vector<lin::Entry> dtrip;
        for (int col = 0; col < int(fb.size()); ++col)
            for (const auto& [m, mask, coef] : forms.d(fb[col])) {
                int row = find_form(fb1, m, mask);
                if (row < 0)
                    throw std::logic_error("d left the form basis");
                dtrip.push_back({row, col, coef});
            }
        lin::SparseMatrix dmat =
            lin::SparseMatrix::from_triplets(int(fb1.size()), int(fb.size()), std::move(dtrip));
        lin::SparseMatrix rhs = lin::scale(lin::mul(eps_n1.mat_at(sn1), dmat), inv_n1);

        /* compare cycles mod boundaries in the bar slot (-n-1, w) */
        lin::RowSpace boundaries;
        lin::SparseMatrix d_in = mixed.c.diff_at({sn1.deg - 1, w});
        std::vector<std::vector<Rational>> cols(d_in.cols, std::vector<Rational>(d_in.rows, Rational(0)));
        for (const auto& e : d_in.entries)
            cols[e.col][e.row] = e.val;
        for (auto& cvec : cols)
            boundaries.insert(cvec);

        int rows = mixed.c.dim(sn1);
        for (int col = 0; col < int(fb.size()); ++col) {
            std::vector<Rational> v1(rows, Rational(0)), v2(rows, Rational(0));
            for (const auto& e : lhs.entries)
                if (e.col == col)
                    v1[e.row] = e.val;
            for (const auto& e : rhs.entries)
                if (e.col == col)
                    v2[e.row] = e.val;
            std::vector<Rational> r1 = boundaries.reduce(v1);
            std::vector<Rational> r2 = boundaries.reduce(v2);
            constraints.push_back({r1, r2});
            if (!have_c) {
                for (int k = 0; k < rows; ++k)
                    if (!r2[k].is_zero()) {
                        c = r1[k] / r2[k];
                        have_c = true;
                        break;
                    }
            }
        }
    }

    if (!have_c)
        c = Rational(n + 1);  // all maps vanish; convention
    for (const auto& [r1, r2] : constraints)
        for (size_t k = 0; k < r1.size(); ++k)
            if (r1[k] != c * r2[k])
                throw NoScalarWorks("n=" + std::to_string(n) + ", candidate c=" + c.str());
    return {c, true};
}

/******** dimension tables ********/

std::vector<cx::DimRow> hh_table(const alg::GCAlgebra& a, int max_weight, int lo, int hi,
                                 bool cross_check, bool parallel)
{
    BarComplex bar;
    try {
        bar = bar_complex(a, max_weight, lo);
    } catch (const GradingError& bar_err) {
        /* bar truncation is not exact here; the Koszul backend may still
         * apply (smooth quotients) */
        try {
            cx::BigradedComplex k = koszul_hh(a, max_weight);
            return cx::homology_table(k, lo, hi, parallel);
        } catch (const NotSmooth&) {
            throw bar_err;
        }
    }
    std::vector<cx::DimRow> rows = cx::homology_table(bar.bc, lo, hi, parallel);
    /* the backends must agree where both apply, i.e. on polynomial algebras;
     * the generic Jacobian gate is too weak to certify smoothness of a
     * weight-graded quotient (a cone is singular at the origin) */
    if (cross_check && a.is_polynomial()) {
        cx::BigradedComplex k = koszul_hh(a, max_weight);
        for (const auto& r : rows) {
            int expect = cx::homology(k, {r.deg, r.weight}).dim;
            if (expect != r.dim)
                throw Error(Error::Kind::Verification,
                            "hh backend disagreement at (" + std::to_string(r.deg) + "," +
                                std::to_string(r.weight) + "): bar=" + std::to_string(r.dim) +
                                " koszul=" + std::to_string(expect));
        }
    }
    return rows;
}

static std::vector<cx::DimRow> cyclic_variant_table(const alg::GCAlgebra& a, int max_weight, int lo,
                                                    int hi, cx::Totalization variant, bool parallel)
{
    BarComplex bar = bar_complex(a, max_weight, -max_weight);
    cx::MixedComplex mixed = connes_B(bar);
    cx::BigradedComplex tot = cx::totalize_mixed(mixed, variant, lo, hi);
    return cx::homology_table(tot, lo, hi, parallel);
}

std::vector<cx::DimRow> hc_table(const alg::GCAlgebra& a, int max_weight, int lo, int hi, bool parallel)
{
    return cyclic_variant_table(a, max_weight, lo, hi, cx::Totalization::Cyclic, parallel);
}

std::vector<cx::DimRow> hc_negative_table(const alg::GCAlgebra& a, int max_weight, int lo, int hi,
                                          bool parallel)
{
    return cyclic_variant_table(a, max_weight, lo, hi, cx::Totalization::Negative, parallel);
}

std::vector<cx::DimRow> hp_table(const alg::GCAlgebra& a, int max_weight, int lo, int hi, bool parallel)
{
    return cyclic_variant_table(a, max_weight, lo, hi, cx::Totalization::Periodic, parallel);
}

}  // namespace hoch
}  // namespace loopforms
