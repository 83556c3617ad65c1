#ifndef LOOPFORMS_COMPLEXES_HPP
#define LOOPFORMS_COMPLEXES_HPP

#include <map>
#include <string>
#include <vector>

#include "loopforms/sparse.hpp"

namespace loopforms {
namespace cx {

struct Slot {
    int deg = 0, weight = 0;
    auto operator<=>(const Slot&) const = default;
};

/* Finite based bigraded cochain complex over Q. The differential has degree
 * +1 and weight 0; d composed with d is checked to vanish on construction
 * (validate). Basis labels are stable so maps between complexes stay
 * checkable. */
struct BigradedComplex {
    std::map<Slot, std::vector<std::string>> basis;
    std::map<Slot, lin::SparseMatrix> diff;  // keyed by source slot

    int dim(Slot s) const;
    /* differential out of s, sized dim(deg+1,w) x dim(s), zero if absent */
    lin::SparseMatrix diff_at(Slot s) const;

    void set_slot(Slot s, std::vector<std::string> labels);
    void set_diff(Slot s, lin::SparseMatrix m);

    /* throws CompositionNonzero if some d∘d != 0 */
    void validate() const;

    bool operator==(const BigradedComplex& o) const;
};

struct ChainMap {
    BigradedComplex source, target;
    int deg_shift = 0, weight_shift = 0;
    std::map<Slot, lin::SparseMatrix> mats;  // keyed by source slot

    lin::SparseMatrix mat_at(Slot s) const;
    /* f d = (-1)^deg_shift d f on every slot */
    bool commutes() const;
};

/* b is the complex differential (degree +1), B has degree -1 and weight 0;
 * b^2 = B^2 = bB + Bb = 0 are all checked by validate. */
struct MixedComplex {
    BigradedComplex c;
    std::map<Slot, lin::SparseMatrix> B;  // keyed by source slot

    lin::SparseMatrix B_at(Slot s) const;
    void validate() const;  // throws MixedIdentityFailure
};

struct SlotHomology {
    int dim = 0;
    std::vector<std::vector<Rational>> reps;  // cycles reduced mod boundaries
};

SlotHomology homology(const BigradedComplex& c, Slot s);

/* usual sign rule: d(x⊗y) = dx⊗y + (-1)^{deg x} x⊗dy */
BigradedComplex tensor(const BigradedComplex& c, const BigradedComplex& d);

/* slot (d, w) moves to (d - n*w, w) */
BigradedComplex shear(const BigradedComplex& c, int n);

BigradedComplex cone(const ChainMap& f);

enum class Totalization { Cyclic, Negative, Periodic };

/* (b,B)-bicomplex totalization per weight slice; column index p is the
 * u-power (u of degree 2, weight 1), cyclic takes p <= 0, negative p >= 0,
 * periodic all p. Slots are built for degrees [lo-1, hi+1] so homology is
 * exact inside [lo, hi]. */
BigradedComplex totalize_mixed(const MixedComplex& m, Totalization variant, int lo, int hi);

/* dims per slot of the given complex's homology over a degree window; rows
 * ordered by degree descending then weight ascending. Slot computations are
 * independent, so `parallel` fans them out without changing the result. */
struct DimRow {
    int deg, weight, dim;
};
std::vector<DimRow> homology_table(const BigradedComplex& c, int lo, int hi, bool parallel = false);

}  // namespace cx
}  // namespace loopforms

#endif
