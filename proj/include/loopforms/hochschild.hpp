#ifndef LOOPFORMS_HOCHSCHILD_HPP
#define LOOPFORMS_HOCHSCHILD_HPP

#include <map>

#include "loopforms/complexes.hpp"
#include "loopforms/presentations.hpp"

namespace loopforms {
namespace hoch {

/* Normalized cyclic bar complex of A, truncated by poly-weight: the slot at
 * (-n, w) has basis a0 ⊗ a1 ⊗ ... ⊗ an with ai normal monomials, ai nonunit
 * for i >= 1, total poly-weight w. Truncation is exact: b and B preserve
 * poly-weight, so slots are built for every degree down to -max_weight
 * regardless of the requested reporting window. */
struct BarComplex {
    alg::GCAlgebra a;
    int max_weight = 0;
    int min_degree = 0;  // reporting hint only; construction is weight-complete
    std::map<cx::Slot, std::vector<std::vector<alg::Monomial>>> tensors;
    cx::BigradedComplex bc;

    int tensor_index(cx::Slot s, const std::vector<alg::Monomial>& t) const;  // -1 if absent
};

/* requires every generator of coh-degree 0 and a poly-weight-graded
 * rewriting basis (covers the whole bar corpus of this artifact) */
BarComplex bar_complex(const alg::GCAlgebra& a, int max_weight, int min_degree);

/* attaches the normalized Connes operator and checks the mixed identities */
cx::MixedComplex connes_B(const BarComplex& bar);

/* Koszul-resolution-of-the-diagonal backend for HH: for polynomial A the
 * base-changed complex Sym_A(Omega[1]) with zero differential; for a
 * declared-regular-sequence smooth quotient, the Jacobian-presented forms. */
cx::BigradedComplex koszul_hh(const alg::GCAlgebra& a, int max_weight);

/* antisymmetrization map from the degree -n Koszul slots into bar cycles */
cx::ChainMap hkr_map(const alg::GCAlgebra& a, int n, int max_weight);

/* per (degree, weight) slot: the induced map on homology is bijective */
bool hkr_is_quasi_iso(const alg::GCAlgebra& a, int n, int max_weight);

struct BScalar {
    Rational scalar;
    bool verified = false;
};
/* finds the unique scalar c with B∘eps_n = c * eps_{n+1}∘d on homology
 * slots, eps normalized by 1/n! for the comparison; expected c = n+1 */
BScalar verify_B_is_deRham(const alg::GCAlgebra& a, int n, int max_weight);

std::vector<cx::DimRow> hh_table(const alg::GCAlgebra& a, int max_weight, int lo, int hi,
                                 bool cross_check = true, bool parallel = false);
std::vector<cx::DimRow> hc_table(const alg::GCAlgebra& a, int max_weight, int lo, int hi,
                                 bool parallel = false);
std::vector<cx::DimRow> hc_negative_table(const alg::GCAlgebra& a, int max_weight, int lo, int hi,
                                          bool parallel = false);
std::vector<cx::DimRow> hp_table(const alg::GCAlgebra& a, int max_weight, int lo, int hi,
                                 bool parallel = false);

}  // namespace hoch
}  // namespace loopforms

#endif
