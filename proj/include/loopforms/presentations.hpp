#ifndef LOOPFORMS_PRESENTATIONS_HPP
#define LOOPFORMS_PRESENTATIONS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loopforms/rational.hpp"

namespace loopforms {
namespace alg {

struct Generator {
    std::string name;
    int coh_degree = 0;
    int form_weight = 0;
    bool is_odd() const { return coh_degree % 2 != 0; }
};

/* Normal-ordered monomial: commuting (even) part as an exponent vector over
 * the algebra's even generators, exterior (odd) part as a bitmask over the
 * odd generators in declaration order. Koszul signs come only from
 * reordering odd factors; an odd generator squares to zero. */
struct Monomial {
    std::vector<int> even_exp;
    uint64_t odd_mask = 0;

    bool is_one() const;
    int poly_weight() const;  // total even degree + odd factor count
    bool operator==(const Monomial& o) const { return even_exp == o.even_exp && odd_mask == o.odd_mask; }
};

/* graded-lex: poly-weight first, then even exponents (earlier generator =
 * higher precedence), then the odd mask; compatible with multiplication */
bool mono_less(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& d, const Monomial& m);

/* product with Koszul sign; nullopt when odd parts collide (square = 0) */
std::optional<std::pair<Monomial, int>> mono_mul(const Monomial& a, const Monomial& b);

struct Term {
    Monomial mon;
    Rational coef;
};

/* Sum of terms, sorted lead-first (descending monomial order), no zero
 * coefficients. Arithmetic is free graded-commutative; reduction against a
 * presentation happens in GCAlgebra::normal_form. */
struct AlgebraElement {
    std::vector<Term> terms;

    bool is_zero() const { return terms.empty(); }
    const Term& lead() const { return terms.front(); }
    bool operator==(const AlgebraElement& o) const;
};

AlgebraElement e_zero();
AlgebraElement e_term(Monomial m, Rational c);
AlgebraElement e_add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement e_sub(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement e_scale(const AlgebraElement& a, const Rational& c);
AlgebraElement e_mul_mono(const AlgebraElement& a, const Monomial& m, const Rational& c);
AlgebraElement e_mul(const AlgebraElement& a, const AlgebraElement& b);

struct GCAlgebra {
    std::string name;
    std::vector<Generator> gens;
    std::vector<int> even_gens;  // even slot -> generator index
    std::vector<int> odd_gens;   // odd slot -> generator index
    std::vector<AlgebraElement> relations;  // normalized input relations
    std::vector<AlgebraElement> rewrite;    // reduced completion, monic, sorted by lead

    int n_even() const { return int(even_gens.size()); }
    int n_odd() const { return int(odd_gens.size()); }
    int gen_index(const std::string& name) const;  // -1 if absent

    int coh_degree(const Monomial& m) const;
    int form_weight(const Monomial& m) const;

    Monomial one() const;
    Monomial gen_monomial(int gen_index) const;

    AlgebraElement normal_form(const AlgebraElement& e) const;
    AlgebraElement mul_nf(const AlgebraElement& a, const AlgebraElement& b) const;

    bool is_polynomial() const { return odd_gens.empty() && rewrite.empty(); }
    /* every rewrite rule has a weight-homogeneous tail of the lead's weight
     * (or no tail); then poly-weight truncation is exact */
    bool is_weight_graded() const;

    std::string monomial_str(const Monomial& m) const;
    std::string element_str(const AlgebraElement& e) const;
};

/* constructs the algebra, normalizes relations (grading and odd-square
 * checks included) and computes the rewriting basis */
GCAlgebra make_algebra(std::string name, std::vector<Generator> gens,
                       std::vector<AlgebraElement> raw_relations = {});

/* Groebner-style completion; S-pairs plus odd-generator saturation. Throws
 * NonterminationGuard past `cap` basis elements. */
std::vector<AlgebraElement> buchberger(const GCAlgebra& shape, std::vector<AlgebraElement> input,
                                       int cap = 512);

/* all normal-form monomials of the exact (coh-degree, form-weight) bidegree
 * with poly-weight <= cap, ascending monomial order */
std::vector<Monomial> weight_basis(const GCAlgebra& a, int coh_degree, int weight, int cap);
/* same but poly-weight == w exactly */
std::vector<Monomial> basis_exact_weight(const GCAlgebra& a, int coh_degree, int weight, int w);
/* normal monomials of exact poly-weight w, any bidegree */
std::vector<Monomial> monomials_of_weight(const GCAlgebra& a, int w);

/* ---- DSL ---- */

struct ConnectionDecl {
    std::string name;
    std::string base;
    int rank = 0;
    struct ConnEntry {
        int i, j;
        std::string expr;
    };
    std::vector<ConnEntry> entries;
};

struct ParsedFile {
    std::vector<GCAlgebra> algebras;
    std::vector<ConnectionDecl> modules;
};

ParsedFile parse_file(const std::string& text);
GCAlgebra parse_algebra(const std::string& text);  // first algebra item of text
/* parse an expression over a's generators, returns the normal form */
AlgebraElement parse_element(const GCAlgebra& a, const std::string& expr);

}  // namespace alg
}  // namespace loopforms

#endif
