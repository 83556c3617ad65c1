#ifndef LOOPFORMS_DERHAM_HPP
#define LOOPFORMS_DERHAM_HPP

#include <optional>

#include "loopforms/complexes.hpp"
#include "loopforms/presentations.hpp"

namespace loopforms {
namespace dr {

/* Differential forms of a smooth affine base in the classical (sheared)
 * convention: dx_i sits in coh-degree +1, form-weight +1, and d has degree
 * +1. For quotient bases the presentation carries both the defining
 * relations and their Jacobian differentials. */
struct OmegaAlgebra {
    alg::GCAlgebra base;
    alg::GCAlgebra omega;
    int nvars = 0;
    std::vector<int> var_gen;  // omega generator index of x_i
    std::vector<int> dx_gen;   // omega generator index of dx_i
    std::vector<std::string> relation_strs;  // printable Jacobian relations

    alg::AlgebraElement lift(const alg::AlgebraElement& base_elt) const;
    bool weight_graded() const { return omega.is_weight_graded(); }
};

/* partial derivative along the i-th even generator (base elements) */
alg::AlgebraElement partial(const alg::GCAlgebra& a, const alg::AlgebraElement& e, int i);

/* Smoothness gate: polynomial bases pass; quotient bases need generic full
 * Jacobian rank, spot-checked at pseudo-random rational points (3 tries). */
OmegaAlgebra kaehler(const alg::GCAlgebra& base);

/* de Rham differential on omega elements, normalized */
alg::AlgebraElement form_d(const OmegaAlgebra& o, const alg::AlgebraElement& e);

/* p-forms of exact poly-weight w (coefficient degree + p) */
std::vector<alg::Monomial> form_basis(const OmegaAlgebra& o, int p, int w);

/* the de Rham complex as a bigraded complex, slots (p, w), weight-graded
 * bases only */
cx::BigradedComplex derham_complex(const OmegaAlgebra& o, int max_p, int cap);

struct DerhamRow {
    int p, weight, dim;
};
struct DerhamResult {
    bool sliced = true;  // false: weight is a filtration; rows carry weight -1
    std::vector<DerhamRow> rows;
};
DerhamResult derham_cohomology(const OmegaAlgebra& o, int p, int cap);

/* Dictionary between the classical convention used here (p-forms in degree
 * +p) and the homological one (p-forms in degree -p, the regrading by twice
 * the form degree). Exposed explicitly, never applied silently. */
std::vector<cx::DimRow> negative_convention(const std::vector<DerhamRow>& rows);

/* ---- the extended algebra Omega[d] ---- */

/* elements are w0 + w1·delta with delta odd, delta^2 = 0 and
 * delta*w = (-1)^{|w|} w*delta + dw */
struct OmegaDElement {
    alg::AlgebraElement a0, a1;
};

struct OmegaD {
    OmegaAlgebra base;

    OmegaDElement mul(const OmegaDElement& x, const OmegaDElement& y) const;
    OmegaDElement delta() const;  // the distinguished derivation
    /* normalizes delta*(delta*m) on every basis monomial of weight <= cap;
     * equivalent to the critical-pair check (reduces to d^2 = 0) */
    bool confluence_check(int cap) const;
};

OmegaD build_omega_d(const OmegaAlgebra& o);

/* ---- connections ---- */

struct Connection {
    OmegaAlgebra omega;
    int rank = 1;
    std::vector<std::vector<alg::AlgebraElement>> gamma;  // r x r of 1-forms
};

Connection connection_from_decl(const alg::ConnectionDecl& decl, const alg::GCAlgebra& base);
Connection make_connection(const alg::GCAlgebra& base, int rank,
                           const std::vector<std::vector<std::string>>& gamma_exprs);

/* a section of E ⊗ Omega: component k multiplies e_k */
using Section = std::vector<alg::AlgebraElement>;

/* delta(e_k ⊗ w) = sum_j e_j ⊗ (Gamma_jk ∧ w) + e_k ⊗ dw */
Section delta_action(const Connection& c, const Section& s);

/* R = dGamma + Gamma ∧ Gamma */
std::vector<std::vector<alg::AlgebraElement>> curvature(const Connection& c);

/* multiplication by the curvature matrix on a section */
Section curvature_action(const Connection& c, const Section& s);

struct FlatDescent {
    bool flat = false;
    std::vector<std::vector<alg::AlgebraElement>> obstruction;  // curvature when not flat
};
FlatDescent flat_descend(const Connection& c);

struct CurvatureCharacter {
    alg::AlgebraElement omega2;  // closed 2-form
};
/* rank-agnostic: requires R = id ⊗ omega, throws NotCentral otherwise;
 * closedness is asserted (Bianchi makes it automatic for scalar R) */
CurvatureCharacter central_character(const Connection& c);

/* decides omega2 - omega1 = d(alpha) within the poly-weight cap, returning
 * the witness alpha when it exists */
std::optional<alg::AlgebraElement> character_equivalent(const OmegaAlgebra& o,
                                                        const alg::AlgebraElement& omega1,
                                                        const alg::AlgebraElement& omega2, int cap);

}  // namespace dr
}  // namespace loopforms

#endif
