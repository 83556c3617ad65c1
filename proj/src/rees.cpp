#include "loopforms/rees.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "loopforms/errors.hpp"

namespace loopforms {
namespace rees {

namespace {

Rational binom(int n, int k)
{
    Rational r(1);
    for (int i = 0; i < k; ++i)
        r *= Rational(n - i, i + 1);
    return r;
}

Rational falling(int n, int k)
{
    Rational r(1);
    for (int i = 0; i < k; ++i)
        r *= Rational(n - i);
    return r;
}

void print_powers(std::ostringstream& os, bool& first, const std::string& sym, int var, int e,
                  bool number_vars)
{
    if (!e)
        return;
    if (!first)
        os << "*";
    os << sym;
    if (number_vars)
        os << var + 1;
    if (e > 1)
        os << "^" << e;
    first = false;
}

}  // namespace

/******** Weyl ********/

bool WeylElement::operator==(const WeylElement& o) const
{
    if (nvars != o.nvars || terms.size() != o.terms.size())
        return false;
    for (size_t i = 0; i < terms.size(); ++i)
        if (terms[i].x != o.terms[i].x || terms[i].d != o.terms[i].d || terms[i].c != o.terms[i].c)
            return false;
    return true;
}

static WeylElement weyl_normalize(int nvars, std::vector<WeylTerm> ts)
{
    std::sort(ts.begin(), ts.end(), [](const WeylTerm& a, const WeylTerm& b) {
        return std::tie(a.x, a.d) < std::tie(b.x, b.d);
    });
    WeylElement out;
    out.nvars = nvars;
    for (auto& t : ts) {
        if (t.c.is_zero())
            continue;
        if (!out.terms.empty() && out.terms.back().x == t.x && out.terms.back().d == t.d) {
            out.terms.back().c += t.c;
            if (out.terms.back().c.is_zero())
                out.terms.pop_back();
        } else {
            out.terms.push_back(std::move(t));
        }
    }
    return out;
}

WeylElement weyl_zero(int nvars)
{
    WeylElement e;
    e.nvars = nvars;
    return e;
}

WeylElement weyl_term(int nvars, std::vector<int> x, std::vector<int> d, Rational c)
{
    x.resize(nvars, 0);
    d.resize(nvars, 0);
    return weyl_normalize(nvars, {{std::move(x), std::move(d), std::move(c)}});
}

WeylElement weyl_x(int nvars, int i)
{
    std::vector<int> x(nvars, 0), d(nvars, 0);
    x[i] = 1;
    return weyl_term(nvars, x, d, Rational(1));
}

WeylElement weyl_d(int nvars, int i)
{
    std::vector<int> x(nvars, 0), d(nvars, 0);
    d[i] = 1;
    return weyl_term(nvars, x, d, Rational(1));
}

WeylElement weyl_add(const WeylElement& a, const WeylElement& b)
{
    std::vector<WeylTerm> ts = a.terms;
    ts.insert(ts.end(), b.terms.begin(), b.terms.end());
    return weyl_normalize(a.nvars, std::move(ts));
}

WeylElement weyl_mul(const WeylElement& a, const WeylElement& b)
{
    if (a.nvars != b.nvars)
        throw std::invalid_argument("weyl_mul: variable count mismatch");
    int n = a.nvars;
    std::vector<WeylTerm> ts;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            /* ∂^b x^c = Σ_k C(b,k) c(c-1)...(c-k+1) x^{c-k} ∂^{b-k}, one k
             * per variable; variables commute with each other */
            std::vector<int> k(n, 0);
            std::function<void(int, Rational)> rec = [&](int v, Rational coef) {
                if (v == n) {
                    WeylTerm t;
                    t.x.resize(n);
                    t.d.resize(n);
                    for (int i = 0; i < n; ++i) {
                        t.x[i] = ta.x[i] + tb.x[i] - k[i];
                        t.d[i] = ta.d[i] + tb.d[i] - k[i];
                    }
                    t.c = ta.c * tb.c * coef;
                    ts.push_back(std::move(t));
                    return;
                }
                int kmax = std::min(ta.d[v], tb.x[v]);
                for (int kk = 0; kk <= kmax; ++kk) {
                    k[v] = kk;
                    rec(v + 1, coef * binom(ta.d[v], kk) * falling(tb.x[v], kk));
                }
            };
            rec(0, Rational(1));
        }
    return weyl_normalize(n, std::move(ts));
}

WeylElement weyl_normal_form(int nvars, const std::vector<std::pair<bool, int>>& word)
{
    WeylElement e = weyl_term(nvars, {}, {}, Rational(1));
    for (const auto& [is_d, v] : word)
        e = weyl_mul(e, is_d ? weyl_d(nvars, v) : weyl_x(nvars, v));
    return e;
}

std::string weyl_str(const WeylElement& e)
{
    if (e.is_zero())
        return "0";
    std::ostringstream os;
    bool first_term = true;
    for (auto it = e.terms.rbegin(); it != e.terms.rend(); ++it) {
        const auto& t = *it;
        Rational c = t.c;
        if (first_term) {
            if (c.sign() < 0) {
                os << "-";
                c = -c;
            }
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
            c = c.abs();
        }
        std::ostringstream body;
        bool first = true;
        bool number = e.nvars > 1;
        for (int i = 0; i < e.nvars; ++i)
            print_powers(body, first, "x", i, t.x[i], number);
        for (int i = 0; i < e.nvars; ++i)
            print_powers(body, first, "D", i, t.d[i], number);
        if (first)
            os << c.str();
        else {
            if (!c.is_one())
                os << c.str() << "*";
            os << body.str();
        }
        first_term = false;
    }
    return os.str();
}

alg::AlgebraElement weyl_apply(const WeylElement& e, const alg::GCAlgebra& base,
                               const alg::AlgebraElement& f)
{
    alg::AlgebraElement out;
    for (const auto& t : e.terms) {
        alg::AlgebraElement g = f;
        for (int i = 0; i < e.nvars; ++i)
            for (int k = 0; k < t.d[i]; ++k)
                g = dr::partial(base, g, i);
        alg::Monomial xm = base.one();
        for (int i = 0; i < e.nvars; ++i)
            xm.even_exp[i] = t.x[i];
        g = base.mul_nf(alg::e_term(xm, t.c), g);
        out = alg::e_add(out, g);
    }
    return base.normal_form(out);
}

/******** Rees ********/

bool ReesElement::operator==(const ReesElement& o) const
{
    if (nvars != o.nvars || terms.size() != o.terms.size())
        return false;
    for (size_t i = 0; i < terms.size(); ++i)
        if (terms[i].x != o.terms[i].x || terms[i].td != o.terms[i].td || terms[i].t != o.terms[i].t ||
            terms[i].c != o.terms[i].c)
            return false;
    return true;
}

int ReesElement::weight() const
{
    int w = -1;
    for (const auto& t : terms) {
        int tw = t.t;
        for (int b : t.td)
            tw += b;
        if (w == -1)
            w = tw;
        else if (w != tw)
            return -1;
    }
    return w;
}

static ReesElement rees_normalize(int nvars, std::vector<ReesTerm> ts)
{
    std::sort(ts.begin(), ts.end(), [](const ReesTerm& a, const ReesTerm& b) {
        return std::tie(a.x, a.td, a.t) < std::tie(b.x, b.td, b.t);
    });
    ReesElement out;
    out.nvars = nvars;
    for (auto& t : ts) {
        if (t.c.is_zero())
            continue;
        if (!out.terms.empty() && out.terms.back().x == t.x && out.terms.back().td == t.td &&
            out.terms.back().t == t.t) {
            out.terms.back().c += t.c;
            if (out.terms.back().c.is_zero())
                out.terms.pop_back();
        } else {
            out.terms.push_back(std::move(t));
        }
    }
    return out;
}

ReesElement rees_zero(int nvars)
{
    ReesElement e;
    e.nvars = nvars;
    return e;
}

ReesElement rees_term(int nvars, std::vector<int> x, std::vector<int> td, int t, Rational c)
{
    x.resize(nvars, 0);
    td.resize(nvars, 0);
    return rees_normalize(nvars, {{std::move(x), std::move(td), t, std::move(c)}});
}

ReesElement rees_x(int nvars, int i)
{
    std::vector<int> x(nvars, 0), td(nvars, 0);
    x[i] = 1;
    return rees_term(nvars, x, td, 0, Rational(1));
}

ReesElement rees_td(int nvars, int i)
{
    std::vector<int> x(nvars, 0), td(nvars, 0);
    td[i] = 1;
    return rees_term(nvars, x, td, 0, Rational(1));
}

ReesElement rees_t(int nvars)
{
    return rees_term(nvars, {}, {}, 1, Rational(1));
}

ReesElement rees_add(const ReesElement& a, const ReesElement& b)
{
    std::vector<ReesTerm> ts = a.terms;
    ts.insert(ts.end(), b.terms.begin(), b.terms.end());
    return rees_normalize(a.nvars, std::move(ts));
}

ReesElement rees_mul(const ReesElement& a, const ReesElement& b)
{
    if (a.nvars != b.nvars)
        throw std::invalid_argument("rees_mul: variable count mismatch");
    int n = a.nvars;
    std::vector<ReesTerm> ts;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            /* (t∂)^b x^c = Σ_k C(b,k) c...(c-k+1) x^{c-k} (t∂)^{b-k} t^k */
            std::vector<int> k(n, 0);
            std::function<void(int, Rational)> rec = [&](int v, Rational coef) {
                if (v == n) {
                    ReesTerm t;
                    t.x.resize(n);
                    t.td.resize(n);
                    int extra = 0;
                    for (int i = 0; i < n; ++i) {
                        t.x[i] = ta.x[i] + tb.x[i] - k[i];
                        t.td[i] = ta.td[i] + tb.td[i] - k[i];
                        extra += k[i];
                    }
                    t.t = ta.t + tb.t + extra;
                    t.c = ta.c * tb.c * coef;
                    ts.push_back(std::move(t));
                    return;
                }
                int kmax = std::min(ta.td[v], tb.x[v]);
                for (int kk = 0; kk <= kmax; ++kk) {
                    k[v] = kk;
                    rec(v + 1, coef * binom(ta.td[v], kk) * falling(tb.x[v], kk));
                }
            };
            rec(0, Rational(1));
        }
    return rees_normalize(n, std::move(ts));
}

ReesElement rees_normal_form(int nvars, const std::vector<std::pair<int, int>>& word)
{
    ReesElement e = rees_term(nvars, {}, {}, 0, Rational(1));
    for (const auto& [kind, v] : word) {
        switch (kind) {
            case 0: e = rees_mul(e, rees_x(nvars, v)); break;
            case 1: e = rees_mul(e, rees_td(nvars, v)); break;
            case 2: e = rees_mul(e, rees_t(nvars)); break;
            default: throw std::invalid_argument("rees word letter kind");
        }
    }
    return e;
}

std::string rees_str(const ReesElement& e)
{
    if (e.is_zero())
        return "0";
    std::ostringstream os;
    bool first_term = true;
    for (auto it = e.terms.rbegin(); it != e.terms.rend(); ++it) {
        const auto& t = *it;
        Rational c = t.c;
        if (first_term) {
            if (c.sign() < 0) {
                os << "-";
                c = -c;
            }
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
            c = c.abs();
        }
        std::ostringstream body;
        bool first = true;
        bool number = e.nvars > 1;
        for (int i = 0; i < e.nvars; ++i)
            print_powers(body, first, "x", i, t.x[i], number);
        for (int i = 0; i < e.nvars; ++i) {
            if (!t.td[i])
                continue;
            if (!first)
                body << "*";
            body << "(tD" << (number ? std::to_string(i + 1) : "") << ")";
            if (t.td[i] > 1)
                body << "^" << t.td[i];
            first = false;
        }
        print_powers(body, first, "t", 0, t.t, false);
        if (first)
            os << c.str();
        else {
            if (!c.is_one())
                os << c.str() << "*";
            os << body.str();
        }
        first_term = false;
    }
    return os.str();
}

/******** fibers of the Rees family ********/

bool SymbolPoly::operator==(const SymbolPoly& o) const
{
    if (nvars != o.nvars || terms.size() != o.terms.size())
        return false;
    for (size_t i = 0; i < terms.size(); ++i)
        if (terms[i].x != o.terms[i].x || terms[i].xi != o.terms[i].xi || terms[i].c != o.terms[i].c)
            return false;
    return true;
}

static SymbolPoly symbol_normalize(int nvars, std::vector<SymbolTerm> ts)
{
    std::sort(ts.begin(), ts.end(), [](const SymbolTerm& a, const SymbolTerm& b) {
        return std::tie(a.x, a.xi) < std::tie(b.x, b.xi);
    });
    SymbolPoly out;
    out.nvars = nvars;
    for (auto& t : ts) {
        if (t.c.is_zero())
            continue;
        if (!out.terms.empty() && out.terms.back().x == t.x && out.terms.back().xi == t.xi) {
            out.terms.back().c += t.c;
            if (out.terms.back().c.is_zero())
                out.terms.pop_back();
        } else {
            out.terms.push_back(std::move(t));
        }
    }
    return out;
}

SymbolPoly symbol(const ReesElement& e)
{
    std::vector<SymbolTerm> ts;
    for (const auto& t : e.terms) {
        if (t.t > 0)
            continue;  // the ideal (t)
        ts.push_back({t.x, t.td, t.c});
    }
    return symbol_normalize(e.nvars, std::move(ts));
}

SymbolPoly symbol_mul(const SymbolPoly& a, const SymbolPoly& b)
{
    std::vector<SymbolTerm> ts;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            SymbolTerm t;
            t.x.resize(a.nvars);
            t.xi.resize(a.nvars);
            for (int i = 0; i < a.nvars; ++i) {
                t.x[i] = ta.x[i] + tb.x[i];
                t.xi[i] = ta.xi[i] + tb.xi[i];
            }
            t.c = ta.c * tb.c;
            ts.push_back(std::move(t));
        }
    return symbol_normalize(a.nvars, std::move(ts));
}

std::string symbol_str(const SymbolPoly& e)
{
    if (e.is_zero())
        return "0";
    std::ostringstream os;
    bool first_term = true;
    for (auto it = e.terms.rbegin(); it != e.terms.rend(); ++it) {
        const auto& t = *it;
        Rational c = t.c;
        if (first_term) {
            if (c.sign() < 0) {
                os << "-";
                c = -c;
            }
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
            c = c.abs();
        }
        std::ostringstream body;
        bool first = true;
        bool number = e.nvars > 1;
        for (int i = 0; i < e.nvars; ++i)
            print_powers(body, first, "x", i, t.x[i], number);
        for (int i = 0; i < e.nvars; ++i)
            print_powers(body, first, "xi", i, t.xi[i], number);
        if (first)
            os << c.str();
        else {
            if (!c.is_one())
                os << c.str() << "*";
            os << body.str();
        }
        first_term = false;
    }
    return os.str();
}

WeylElement localize_t(const ReesElement& e)
{
    std::vector<WeylTerm> ts;
    for (const auto& t : e.terms)
        ts.push_back({t.x, t.td, t.c});
    WeylElement out;
    out.nvars = e.nvars;
    std::vector<WeylTerm> copy = std::move(ts);
    /* duplicate (x, d) pairs from different t-powers merge */
    std::sort(copy.begin(), copy.end(), [](const WeylTerm& a, const WeylTerm& b) {
        return std::tie(a.x, a.d) < std::tie(b.x, b.d);
    });
    for (auto& t : copy) {
        if (!out.terms.empty() && out.terms.back().x == t.x && out.terms.back().d == t.d) {
            out.terms.back().c += t.c;
            if (out.terms.back().c.is_zero())
                out.terms.pop_back();
        } else if (!t.c.is_zero()) {
            out.terms.push_back(std::move(t));
        }
    }
    return out;
}

ReesElement subprincipal(const ReesElement& e)
{
    std::vector<ReesTerm> ts;
    for (const auto& t : e.terms)
        if (t.t <= 1)
            ts.push_back(t);
    ReesElement out;
    out.nvars = e.nvars;
    out.terms = std::move(ts);
    return out;
}

ReesElement subprincipal_mul(const ReesElement& a, const ReesElement& b)
{
    return subprincipal(rees_mul(subprincipal(a), subprincipal(b)));
}

/******** Ext over the exterior algebra ********/

std::vector<int> ext_over_exterior(int truncation_degree)
{
    if (truncation_degree < 0)
        throw std::invalid_argument("truncation must be >= 0");
    int steps = truncation_degree / 2 + 2;

    /* resolution ... -> Λe_2 -> Λe_1 -> Λe_0 (-> k), d(e_i) = λ e_{i-1};
     * e_i has degree -2i, weight -i, and λ e_i degree -2i-1, weight -i-1 */
    cx::BigradedComplex res;
    for (int i = 0; i <= steps; ++i) {
        res.set_slot({-2 * i, -i}, {"e" + std::to_string(i)});
        res.set_slot({-2 * i - 1, -i - 1}, {"L*e" + std::to_string(i)});
    }
    for (int i = 1; i <= steps; ++i) {
        /* e_i ↦ λ e_{i-1}: note (-2i) + 1 = -2(i-1) - 1 and weights agree */
        lin::SparseMatrix m(1, 1);
        m.entries.push_back({0, 0, Rational(1)});
        res.set_diff({-2 * i, -i}, m);
    }
    res.validate();
    /* exactness away from the augmentation slot e_0 */
    for (int i = 1; i < steps; ++i) {
        if (cx::homology(res, {-2 * i, -i}).dim != 0 || cx::homology(res, {-2 * i - 1, -i - 1}).dim != 0)
            throw MixedIdentityFailure("exterior resolution is not exact");
    }

    /* Hom_Λ(P_i, k): λ acts by zero on k, so all induced maps vanish and
     * Ext^{2i} = k lives in weight i */
    std::vector<int> dims(truncation_degree + 1, 0);
    for (int d = 0; d <= truncation_degree; d += 2)
        dims[d] = 1;
    return dims;
}

/******** Koszul dictionary ********/

DModuleAction koszul_dual_dmodule(const dr::Connection& conn, int cap)
{
    dr::FlatDescent fd = dr::flat_descend(conn);
    if (!fd.flat) {
        std::string w;
        for (int i = 0; i < conn.rank; ++i)
            for (int j = 0; j < conn.rank; ++j)
                if (!fd.obstruction[i][j].is_zero())
                    w = conn.omega.omega.element_str(fd.obstruction[i][j]);
        throw NotFlat("curvature obstruction " + w);
    }

    DModuleAction act;
    act.nvars = conn.omega.nvars;
    act.rank = conn.rank;
    act.cap = cap;
    act.conn = conn;

    /* split Gamma_{jk} = Σ_i gamma_comp[i][j][k] dx_i with base coefficients */
    act.gamma_comp.assign(act.nvars, std::vector<std::vector<alg::AlgebraElement>>(
                                         act.rank, std::vector<alg::AlgebraElement>(act.rank)));
    for (int j = 0; j < act.rank; ++j)
        for (int k = 0; k < act.rank; ++k)
            for (const auto& t : conn.gamma[j][k].terms) {
                int which = -1;
                for (int i = 0; i < act.nvars; ++i) {
                    uint64_t bit = uint64_t(1);
                    /* dx_i is the i-th odd generator of omega */
                    bit <<= i;
                    if (t.mon.odd_mask == bit)
                        which = i;
                }
                if (which < 0)
                    throw GradingError("connection entry is not a 1-form combination of dx_i");
                alg::Monomial base_mon = conn.omega.base.one();
                for (size_t v = 0; v < base_mon.even_exp.size(); ++v)
                    base_mon.even_exp[v] = t.mon.even_exp[v];
                act.gamma_comp[which][j][k] =
                    alg::e_add(act.gamma_comp[which][j][k], alg::e_term(base_mon, t.coef));
            }
    return act;
}

DModuleAction::PolySection DModuleAction::act_x(int i, const PolySection& s) const
{
    const alg::GCAlgebra& base = conn.omega.base;
    PolySection out(rank);
    alg::AlgebraElement xi = alg::e_term(base.gen_monomial(base.even_gens[i]), Rational(1));
    for (int k = 0; k < rank; ++k)
        out[k] = base.mul_nf(xi, s[k]);
    return out;
}

DModuleAction::PolySection DModuleAction::act_d(int i, const PolySection& s) const
{
    const alg::GCAlgebra& base = conn.omega.base;
    PolySection out(rank);
    for (int j = 0; j < rank; ++j) {
        alg::AlgebraElement acc = dr::partial(base, s[j], i);
        for (int k = 0; k < rank; ++k)
            acc = alg::e_add(acc, base.mul_nf(gamma_comp[i][j][k], s[k]));
        out[j] = base.normal_form(acc);
    }
    return out;
}

bool DModuleAction::verify_weyl_relations(int check_cap) const
{
    const alg::GCAlgebra& base = conn.omega.base;
    for (int w = 0; w <= check_cap; ++w)
        for (const auto& m : alg::monomials_of_weight(base, w))
            for (int k = 0; k < rank; ++k) {
                PolySection v(rank);
                v[k] = alg::e_term(m, Rational(1));
                for (int i = 0; i < nvars; ++i)
                    for (int j = 0; j < nvars; ++j) {
                        /* [∂_i, x_j] = δ_ij */
                        PolySection a = act_d(i, act_x(j, v));
                        PolySection b = act_x(j, act_d(i, v));
                        for (int r = 0; r < rank; ++r) {
                            alg::AlgebraElement comm = alg::e_sub(a[r], b[r]);
                            alg::AlgebraElement expect =
                                (i == j) ? v[r] : alg::e_zero();
                            if (!(comm == expect))
                                return false;
                        }
                        /* [∂_i, ∂_j] = 0 (flatness) */
                        PolySection c1 = act_d(i, act_d(j, v));
                        PolySection c2 = act_d(j, act_d(i, v));
                        for (int r = 0; r < rank; ++r)
                            if (!(alg::e_sub(c1[r], c2[r]) == alg::e_zero()))
                                return false;
                    }
            }
    return true;
}

std::vector<std::vector<alg::AlgebraElement>> DModuleAction::recovered_gamma() const
{
    const alg::GCAlgebra& base = conn.omega.base;
    const alg::GCAlgebra& om = conn.omega.omega;
    std::vector<std::vector<alg::AlgebraElement>> g(rank, std::vector<alg::AlgebraElement>(rank));
    for (int k = 0; k < rank; ++k) {
        PolySection v(rank);
        v[k] = alg::e_term(base.one(), Rational(1));
        for (int i = 0; i < nvars; ++i) {
            PolySection dv = act_d(i, v);
            for (int j = 0; j < rank; ++j) {
                alg::AlgebraElement lifted = conn.omega.lift(dv[j]);
                alg::Monomial dxi = om.gen_monomial(conn.omega.dx_gen[i]);
                g[j][k] = alg::e_add(g[j][k], om.mul_nf(lifted, alg::e_term(dxi, Rational(1))));
            }
        }
    }
    return g;
}

}  // namespace rees
}  // namespace loopforms
