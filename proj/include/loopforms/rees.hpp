#ifndef LOOPFORMS_REES_HPP
#define LOOPFORMS_REES_HPP

#include <string>
#include <vector>

#include "loopforms/derham.hpp"
#include "loopforms/rational.hpp"

namespace loopforms {
namespace rees {

/* Weyl algebra on n variables, normal order x's left of ∂'s, realized by the
 * rewriting ∂_i x_j = x_j ∂_i + δ_ij. */
struct WeylTerm {
    std::vector<int> x, d;
    Rational c;
};
struct WeylElement {
    int nvars = 0;
    std::vector<WeylTerm> terms;  // canonical sorted order, no zeros

    bool is_zero() const { return terms.empty(); }
    bool operator==(const WeylElement& o) const;
};

WeylElement weyl_zero(int nvars);
WeylElement weyl_term(int nvars, std::vector<int> x, std::vector<int> d, Rational c);
WeylElement weyl_x(int nvars, int i);
WeylElement weyl_d(int nvars, int i);
WeylElement weyl_add(const WeylElement& a, const WeylElement& b);
WeylElement weyl_mul(const WeylElement& a, const WeylElement& b);
/* word letters: (is_d, var index); the product of the letters in order */
WeylElement weyl_normal_form(int nvars, const std::vector<std::pair<bool, int>>& word);
std::string weyl_str(const WeylElement& e);

/* act on a polynomial of the base algebra (x_i by multiplication, ∂_i by
 * formal differentiation) */
alg::AlgebraElement weyl_apply(const WeylElement& e, const alg::GCAlgebra& base,
                               const alg::AlgebraElement& f);

/* Rees algebra of the order filtration: terms c · x^a (t∂)^b t^g, weight
 * |b| + g, with (t∂_i) x_j = x_j (t∂_i) + δ_ij t and t central. */
struct ReesTerm {
    std::vector<int> x, td;
    int t = 0;
    Rational c;
};
struct ReesElement {
    int nvars = 0;
    std::vector<ReesTerm> terms;

    bool is_zero() const { return terms.empty(); }
    bool operator==(const ReesElement& o) const;
    /* weight of a homogeneous element; -1 when mixed or zero */
    int weight() const;
};

ReesElement rees_zero(int nvars);
ReesElement rees_term(int nvars, std::vector<int> x, std::vector<int> td, int t, Rational c);
ReesElement rees_x(int nvars, int i);
ReesElement rees_td(int nvars, int i);
ReesElement rees_t(int nvars);
ReesElement rees_add(const ReesElement& a, const ReesElement& b);
ReesElement rees_mul(const ReesElement& a, const ReesElement& b);
/* word letters: kind 0 = x_i, 1 = t∂_i, 2 = t */
ReesElement rees_normal_form(int nvars, const std::vector<std::pair<int, int>>& word);
std::string rees_str(const ReesElement& e);

/* commutative polynomial in x, xi */
struct SymbolTerm {
    std::vector<int> x, xi;
    Rational c;
};
struct SymbolPoly {
    int nvars = 0;
    std::vector<SymbolTerm> terms;

    bool is_zero() const { return terms.empty(); }
    bool operator==(const SymbolPoly& o) const;
};
SymbolPoly symbol_mul(const SymbolPoly& a, const SymbolPoly& b);
std::string symbol_str(const SymbolPoly& e);

/* reduction mod t: the associated graded, t∂_i -> xi_i */
SymbolPoly symbol(const ReesElement& e);
/* t -> 1: the generic fiber, back to the Weyl algebra */
WeylElement localize_t(const ReesElement& e);
/* truncation to R/t^2: drops t-degree >= 2 */
ReesElement subprincipal(const ReesElement& e);
ReesElement subprincipal_mul(const ReesElement& a, const ReesElement& b);

/* Ext over k[λ]/(λ²) of the trivial module via the explicit 2-periodic free
 * resolution; dims 1,0,1,0,... in degrees 0..truncation. Exactness of the
 * truncated resolution is verified on the way. */
std::vector<int> ext_over_exterior(int truncation_degree);

/* D-module structure on E ⊗ A from a flat connection: ∂_i acts by the i-th
 * component of ∇. Weyl relations are verified symbolically on the monomial
 * basis up to `cap`. */
struct DModuleAction {
    int nvars = 0, rank = 1, cap = 0;
    dr::Connection conn;
    std::vector<std::vector<std::vector<alg::AlgebraElement>>> gamma_comp;  // [i][j][k]: dx_i part

    /* sections are vectors of base-algebra polynomials */
    using PolySection = std::vector<alg::AlgebraElement>;
    PolySection act_x(int i, const PolySection& s) const;
    PolySection act_d(int i, const PolySection& s) const;

    bool verify_weyl_relations(int check_cap) const;
    /* read Gamma back from the action on weight-0 sections */
    std::vector<std::vector<alg::AlgebraElement>> recovered_gamma() const;
};

DModuleAction koszul_dual_dmodule(const dr::Connection& conn, int cap);

}  // namespace rees
}  // namespace loopforms

#endif
