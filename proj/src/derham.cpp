#include "loopforms/derham.hpp"

#include <algorithm>
#include <bit>

#include "loopforms/errors.hpp"
#include "loopforms/util.hpp"

namespace loopforms {
namespace dr {

alg::AlgebraElement partial(const alg::GCAlgebra&, const alg::AlgebraElement& e, int i)
{
    std::vector<alg::Term> ts;
    for (const auto& t : e.terms) {
        int ex = t.mon.even_exp[i];
        if (!ex)
            continue;
        alg::Monomial m = t.mon;
        m.even_exp[i] -= 1;
        ts.push_back({std::move(m), t.coef * Rational(ex)});
    }
    alg::AlgebraElement out;
    for (auto& t : ts)
        out = alg::e_add(out, alg::e_term(t.mon, t.coef));
    return out;
}

alg::AlgebraElement OmegaAlgebra::lift(const alg::AlgebraElement& base_elt) const
{
    /* base generators occupy the same even slots in omega */
    alg::AlgebraElement out;
    for (const auto& t : base_elt.terms) {
        alg::Monomial m = omega.one();
        for (size_t i = 0; i < t.mon.even_exp.size(); ++i)
            m.even_exp[i] = t.mon.even_exp[i];
        out = alg::e_add(out, alg::e_term(std::move(m), t.coef));
    }
    return out;
}

namespace {

/* evaluate a base element at a rational point */
Rational eval_at(const alg::AlgebraElement& e, const std::vector<Rational>& pt)
{
    Rational out(0);
    for (const auto& t : e.terms) {
        Rational v = t.coef;
        for (size_t i = 0; i < t.mon.even_exp.size(); ++i)
            for (int k = 0; k < t.mon.even_exp[i]; ++k)
                v *= pt[i];
        out += v;
    }
    return out;
}

void check_base(const alg::GCAlgebra& base)
{
    for (const auto& g : base.gens)
        if (g.coh_degree != 0 || g.form_weight != 0)
            throw NotSmooth("de Rham base must be generated in bidegree (0,0); got " + g.name);
}

void jacobian_spot_check(const alg::GCAlgebra& base)
{
    int c = int(base.relations.size());
    int n = base.n_even();
    if (c == 0)
        return;
    if (c > n)
        throw NotSmooth("more relations than variables");
    SplitMix64 rng(0x5eedf00dULL);
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<Rational> pt;
        for (int i = 0; i < n; ++i)
            pt.push_back(Rational(rng.range(1, 23), rng.range(1, 7)));
        std::vector<lin::Entry> triplets;
        for (int r = 0; r < c; ++r)
            for (int j = 0; j < n; ++j) {
                Rational v = eval_at(partial(base, base.relations[r], j), pt);
                if (!v.is_zero())
                    triplets.push_back({r, j, v});
            }
        lin::SparseMatrix jac = lin::SparseMatrix::from_triplets(c, n, std::move(triplets));
        if (lin::rank(jac) == c)
            return;
    }
    throw NotSmooth("Jacobian of the declared sequence is generically rank-deficient");
}

}  // namespace

OmegaAlgebra kaehler(const alg::GCAlgebra& base)
{
    check_base(base);
    jacobian_spot_check(base);

    OmegaAlgebra o;
    o.base = base;
    o.nvars = base.n_even();

    std::vector<alg::Generator> gens = base.gens;
    for (int i = 0; i < o.nvars; ++i)
        gens.push_back({"d" + base.gens[base.even_gens[i]].name, 1, 1});

    /* relations: the base relations plus their differentials */
    alg::GCAlgebra shape = alg::make_algebra(base.name + "_omega", gens);
    std::vector<alg::AlgebraElement> rels;
    OmegaAlgebra tmp;
    tmp.base = base;
    tmp.omega = shape;
    tmp.nvars = o.nvars;
    for (const auto& f : base.relations) {
        alg::AlgebraElement lf = tmp.lift(f);
        rels.push_back(lf);
        /* df = sum_i (∂f/∂x_i) dx_i */
        alg::AlgebraElement df;
        for (int i = 0; i < o.nvars; ++i) {
            alg::AlgebraElement pi = tmp.lift(partial(base, f, i));
            alg::Monomial dxi = shape.gen_monomial(int(base.gens.size()) + i);
            df = alg::e_add(df, alg::e_mul(pi, alg::e_term(dxi, Rational(1))));
        }
        if (!df.is_zero()) {
            rels.push_back(df);
            o.relation_strs.push_back(shape.element_str(df));
        }
    }
    o.omega = alg::make_algebra(base.name + "_omega", gens, std::move(rels));
    for (int i = 0; i < o.nvars; ++i) {
        o.var_gen.push_back(base.even_gens[i]);
        o.dx_gen.push_back(int(base.gens.size()) + i);
    }
    return o;
}

alg::AlgebraElement form_d(const OmegaAlgebra& o, const alg::AlgebraElement& e)
{
    alg::AlgebraElement out;
    for (const auto& t : e.terms) {
        for (int i = 0; i < o.nvars; ++i) {
            int ex = t.mon.even_exp[i];
            if (!ex)
                continue;
            alg::Monomial coeff = t.mon;
            coeff.even_exp[i] -= 1;
            uint64_t oddpart = coeff.odd_mask;
            coeff.odd_mask = 0;
            /* d(x^a · dx_M) = a_i x^{a-e_i} dx_i ∧ dx_M */
            alg::Monomial dxi = o.omega.gen_monomial(o.dx_gen[i]);
            auto p1 = alg::mono_mul(coeff, dxi);
            alg::Monomial rest = o.omega.one();
            rest.odd_mask = oddpart;
            auto p2 = alg::mono_mul(p1->first, rest);
            if (!p2)
                continue;  // dx_i already present
            out = alg::e_add(out, alg::e_term(p2->first,
                                              t.coef * Rational(ex) * Rational(p1->second * p2->second)));
        }
    }
    return o.omega.normal_form(out);
}

std::vector<alg::Monomial> form_basis(const OmegaAlgebra& o, int p, int w)
{
    return alg::basis_exact_weight(o.omega, p, p, w);
}

cx::BigradedComplex derham_complex(const OmegaAlgebra& o, int max_p, int cap)
{
    if (!o.weight_graded())
        throw GradingError("derham_complex needs a poly-weight-graded base");
    cx::BigradedComplex out;
    std::map<cx::Slot, std::vector<alg::Monomial>> bases;
    for (int p = 0; p <= max_p; ++p)
        for (int w = 0; w <= cap; ++w) {
            auto b = form_basis(o, p, w);
            if (b.empty())
                continue;
            std::vector<std::string> labels;
            for (const auto& m : b)
                labels.push_back(o.omega.monomial_str(m));
            out.set_slot({p, w}, std::move(labels));
            bases[{p, w}] = std::move(b);
        }
    for (const auto& [s, b] : bases) {
        cx::Slot s1{s.deg + 1, s.weight};
        auto it = bases.find(s1);
        if (it == bases.end())
            continue;
        const auto& target = it->second;
        std::vector<lin::Entry> triplets;
        for (int col = 0; col < int(b.size()); ++col) {
            alg::AlgebraElement img = form_d(o, alg::e_term(b[col], Rational(1)));
            for (const auto& t : img.terms) {
                auto pos = std::lower_bound(target.begin(), target.end(), t.mon, alg::mono_less);
                if (pos == target.end() || !(*pos == t.mon))
                    throw std::logic_error("d left the weight slice");
                triplets.push_back({int(pos - target.begin()), col, t.coef});
            }
        }
        if (!triplets.empty())
            out.set_diff(s, lin::SparseMatrix::from_triplets(int(target.size()), int(b.size()),
                                                             std::move(triplets)));
    }
    out.validate();
    return out;
}

DerhamResult derham_cohomology(const OmegaAlgebra& o, int p, int cap)
{
    DerhamResult res;
    if (o.weight_graded()) {
        cx::BigradedComplex c = derham_complex(o, std::min(p + 1, o.nvars), cap);
        res.sliced = true;
        for (int w = 0; w <= cap; ++w)
            res.rows.push_back({p, w, cx::homology(c, {p, w}).dim});
        return res;
    }

    /* filtration case: one truncated complex over all weights <= cap */
    res.sliced = false;
    auto collect = [&](int q) {
        std::vector<alg::Monomial> b;
        for (int w = 0; w <= cap; ++w) {
            auto bw = form_basis(o, q, w);
            b.insert(b.end(), bw.begin(), bw.end());
        }
        std::sort(b.begin(), b.end(), alg::mono_less);
        return b;
    };
    auto dmat = [&](const std::vector<alg::Monomial>& src, const std::vector<alg::Monomial>& dst) {
        std::vector<lin::Entry> triplets;
        for (int col = 0; col < int(src.size()); ++col) {
            alg::AlgebraElement img = form_d(o, alg::e_term(src[col], Rational(1)));
            for (const auto& t : img.terms) {
                auto pos = std::lower_bound(dst.begin(), dst.end(), t.mon, alg::mono_less);
                if (pos == dst.end() || !(*pos == t.mon))
                    throw std::logic_error("d left the truncation");
                triplets.push_back({int(pos - dst.begin()), col, t.coef});
            }
        }
        return lin::SparseMatrix::from_triplets(int(dst.size()), int(src.size()), std::move(triplets));
    };
    std::vector<alg::Monomial> below = p > 0 ? collect(p - 1) : std::vector<alg::Monomial>{};
    std::vector<alg::Monomial> here = collect(p);
    std::vector<alg::Monomial> above = collect(p + 1);
    lin::SparseMatrix d_in = p > 0 ? dmat(below, here) : lin::SparseMatrix(int(here.size()), 0);
    lin::SparseMatrix d_out = dmat(here, above);
    res.rows.push_back({p, -1, lin::homology_dim(d_in, d_out)});
    return res;
}

std::vector<cx::DimRow> negative_convention(const std::vector<DerhamRow>& rows)
{
    std::vector<cx::DimRow> out;
    for (const auto& r : rows)
        out.push_back({-r.p, r.weight, r.dim});
    return out;
}

/******** Omega[d] ********/

namespace {

/* sign operator: m -> (-1)^{coh degree} m, termwise */
alg::AlgebraElement parity_twist(const alg::GCAlgebra& a, const alg::AlgebraElement& e)
{
    alg::AlgebraElement out = e;
    for (auto& t : out.terms)
        if (a.coh_degree(t.mon) % 2 != 0)
            t.coef = -t.coef;
    return out;
}

}  // namespace

OmegaDElement OmegaD::delta() const
{
    return {alg::e_zero(), alg::e_term(base.omega.one(), Rational(1))};
}

OmegaDElement OmegaD::mul(const OmegaDElement& x, const OmegaDElement& y) const
{
    const alg::GCAlgebra& om = base.omega;
    /* (a0 + a1 δ)(b0 + b1 δ)
     *   = a0 b0 + a1 d(b0)  +  [a0 b1 + a1 ε(b0) b... ] δ
     * with δ b = ε(b) δ + d(b), ε the parity twist, δ² = 0 */
    alg::AlgebraElement even = om.mul_nf(x.a0, y.a0);
    even = alg::e_add(even, om.mul_nf(x.a1, form_d(base, y.a0)));
    alg::AlgebraElement odd = om.mul_nf(x.a0, y.a1);
    odd = alg::e_add(odd, om.mul_nf(x.a1, parity_twist(om, y.a0)));
    odd = alg::e_add(odd, om.mul_nf(x.a1, form_d(base, y.a1)));
    return {om.normal_form(even), om.normal_form(odd)};
}

bool OmegaD::confluence_check(int cap) const
{
    /* δ(δ·m) must normalize to zero for every basis monomial; unwinding the
     * rewriting this is exactly d(d m) = 0 plus the sign coherences */
    OmegaDElement d = delta();
    for (int w = 0; w <= cap; ++w)
        for (const auto& m : alg::monomials_of_weight(base.omega, w)) {
            OmegaDElement el{alg::e_term(m, Rational(1)), alg::e_zero()};
            OmegaDElement r = mul(d, mul(d, el));
            if (!r.a0.is_zero() || !r.a1.is_zero())
                return false;
            /* [δ, m] = d m */
            OmegaDElement lhs = mul(d, el);
            OmegaDElement sign_el{parity_twist(base.omega, el.a0), alg::e_zero()};
            OmegaDElement rhs = mul(sign_el, d);
            alg::AlgebraElement comm0 = alg::e_sub(lhs.a0, rhs.a0);
            alg::AlgebraElement comm1 = alg::e_sub(lhs.a1, rhs.a1);
            if (!comm1.is_zero())
                return false;
            if (!(comm0 == form_d(base, el.a0)))
                return false;
        }
    return true;
}

OmegaD build_omega_d(const OmegaAlgebra& o)
{
    OmegaD od{o};
    if (!od.confluence_check(2))
        throw MixedIdentityFailure("omega[d] rewriting is not confluent");
    return od;
}

/******** connections ********/

Connection make_connection(const alg::GCAlgebra& base, int rank,
                           const std::vector<std::vector<std::string>>& gamma_exprs)
{
    Connection c;
    c.omega = kaehler(base);
    c.rank = rank;
    c.gamma.assign(rank, std::vector<alg::AlgebraElement>(rank));
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) {
            if (i < int(gamma_exprs.size()) && j < int(gamma_exprs[i].size()) &&
                !gamma_exprs[i][j].empty()) {
                alg::AlgebraElement e = alg::parse_element(c.omega.omega, gamma_exprs[i][j]);
                for (const auto& t : e.terms)
                    if (c.omega.omega.coh_degree(t.mon) != 1)
                        throw GradingError("connection entries must be 1-forms");
                c.gamma[i][j] = e;
            }
        }
    return c;
}

Connection connection_from_decl(const alg::ConnectionDecl& decl, const alg::GCAlgebra& base)
{
    std::vector<std::vector<std::string>> exprs(decl.rank, std::vector<std::string>(decl.rank));
    for (const auto& e : decl.entries)
        exprs[e.i][e.j] = e.expr;
    return make_connection(base, decl.rank, exprs);
}

Section delta_action(const Connection& c, const Section& s)
{
    if (int(s.size()) != c.rank)
        throw std::invalid_argument("section rank mismatch");
    Section out(c.rank);
    for (int j = 0; j < c.rank; ++j) {
        alg::AlgebraElement acc = form_d(c.omega, s[j]);
        for (int k = 0; k < c.rank; ++k)
            acc = alg::e_add(acc, c.omega.omega.mul_nf(c.gamma[j][k], s[k]));
        out[j] = c.omega.omega.normal_form(acc);
    }
    return out;
}

std::vector<std::vector<alg::AlgebraElement>> curvature(const Connection& c)
{
    std::vector<std::vector<alg::AlgebraElement>> R(c.rank, std::vector<alg::AlgebraElement>(c.rank));
    for (int i = 0; i < c.rank; ++i)
        for (int j = 0; j < c.rank; ++j) {
            alg::AlgebraElement acc = form_d(c.omega, c.gamma[i][j]);
            for (int k = 0; k < c.rank; ++k)
                acc = alg::e_add(acc, c.omega.omega.mul_nf(c.gamma[i][k], c.gamma[k][j]));
            R[i][j] = c.omega.omega.normal_form(acc);
        }
    return R;
}

Section curvature_action(const Connection& c, const Section& s)
{
    auto R = curvature(c);
    Section out(c.rank);
    for (int j = 0; j < c.rank; ++j) {
        alg::AlgebraElement acc;
        for (int k = 0; k < c.rank; ++k)
            acc = alg::e_add(acc, c.omega.omega.mul_nf(R[j][k], s[k]));
        out[j] = acc;
    }
    return out;
}

FlatDescent flat_descend(const Connection& c)
{
    FlatDescent res;
    res.obstruction = curvature(c);
    res.flat = true;
    for (const auto& row : res.obstruction)
        for (const auto& e : row)
            if (!e.is_zero())
                res.flat = false;
    return res;
}

CurvatureCharacter central_character(const Connection& c)
{
    auto R = curvature(c);
    for (int i = 0; i < c.rank; ++i)
        for (int j = 0; j < c.rank; ++j) {
            if (i == j)
                continue;
            if (!R[i][j].is_zero())
                throw NotCentral("off-diagonal curvature at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
        }
    for (int i = 1; i < c.rank; ++i)
        if (!(R[i][i] == R[0][0]))
            throw NotCentral("distinct diagonal curvatures");
    CurvatureCharacter ch{R[0][0]};
    if (!form_d(c.omega, ch.omega2).is_zero())
        throw MixedIdentityFailure("central curvature fails to be de Rham closed");
    return ch;
}

std::optional<alg::AlgebraElement> character_equivalent(const OmegaAlgebra& o,
                                                        const alg::AlgebraElement& omega1,
                                                        const alg::AlgebraElement& omega2, int cap)
{
    alg::AlgebraElement delta = alg::e_sub(omega2, omega1);
    for (const auto& t : delta.terms) {
        if (o.omega.coh_degree(t.mon) != 2)
            throw GradingError("character_equivalent compares 2-forms");
        cap = std::max(cap, t.mon.poly_weight());
    }
    /* solve d(alpha) = delta over 1-forms of weight <= cap; rewriting never
     * raises poly-weight, so the truncation is d-stable */
    std::vector<alg::Monomial> ones, twos;
    for (int w = 0; w <= cap; ++w) {
        auto b1 = form_basis(o, 1, w);
        ones.insert(ones.end(), b1.begin(), b1.end());
        auto b2 = form_basis(o, 2, w);
        twos.insert(twos.end(), b2.begin(), b2.end());
    }
    std::sort(ones.begin(), ones.end(), alg::mono_less);
    std::sort(twos.begin(), twos.end(), alg::mono_less);

    std::vector<lin::Entry> triplets;
    for (int col = 0; col < int(ones.size()); ++col) {
        alg::AlgebraElement img = form_d(o, alg::e_term(ones[col], Rational(1)));
        for (const auto& t : img.terms) {
            auto pos = std::lower_bound(twos.begin(), twos.end(), t.mon, alg::mono_less);
            if (pos == twos.end() || !(*pos == t.mon))
                throw std::logic_error("d left the truncation");
            triplets.push_back({int(pos - twos.begin()), col, t.coef});
        }
    }
    lin::SparseMatrix dmat =
        lin::SparseMatrix::from_triplets(int(twos.size()), int(ones.size()), std::move(triplets));
    std::vector<Rational> rhs(twos.size(), Rational(0));
    for (const auto& t : delta.terms) {
        auto pos = std::lower_bound(twos.begin(), twos.end(), t.mon, alg::mono_less);
        if (pos == twos.end() || !(*pos == t.mon))
            return std::nullopt;  // outside the cap
        rhs[pos - twos.begin()] = t.coef;
    }
    auto sol = lin::solve(dmat, rhs);
    if (!sol)
        return std::nullopt;
    alg::AlgebraElement alpha;
    for (size_t i = 0; i < ones.size(); ++i)
        if (!(*sol)[i].is_zero())
            alpha = alg::e_add(alpha, alg::e_term(ones[i], (*sol)[i]));
    return alpha;
}

}  // namespace dr
}  // namespace loopforms
