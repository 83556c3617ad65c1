#ifndef LOOPFORMS_SPARSE_HPP
#define LOOPFORMS_SPARSE_HPP

#include <optional>
#include <vector>

#include "loopforms/rational.hpp"

namespace loopforms {
namespace lin {

struct Entry {
    int row, col;
    Rational val;
};

/* Sparse matrix over Q. entries are row-major sorted, hold no zeros and no
 * duplicate positions, so equality is structural. Matrices act on column
 * vectors: an m x n matrix maps Q^n -> Q^m. */
struct SparseMatrix {
    int rows = 0, cols = 0;
    std::vector<Entry> entries;

    SparseMatrix() = default;
    SparseMatrix(int r, int c) : rows(r), cols(c) {}

    static SparseMatrix identity(int n);
    /* sums duplicates, drops zeros, sorts row-major */
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Entry> triplets);

    Rational at(int r, int c) const;
    bool is_zero() const { return entries.empty(); }
    int nnz() const { return int(entries.size()); }

    std::vector<Rational> apply(const std::vector<Rational>& v) const;

    bool operator==(const SparseMatrix& o) const;
};

SparseMatrix mul(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix scale(const SparseMatrix& a, const Rational& c);
SparseMatrix transpose(const SparseMatrix& a);
SparseMatrix hstack(const SparseMatrix& a, const SparseMatrix& b);

struct RrefResult {
    SparseMatrix matrix;
    int rank = 0;
    std::vector<int> pivot_cols;
};

/* Unique reduced row-echelon form. Pivot search walks columns left to right
 * and takes the smallest-index unused row with a nonzero entry; switches to a
 * dense elimination when density > 0.5. */
RrefResult rref(const SparseMatrix& m);

int rank(const SparseMatrix& m);

/* basis of { v : m v = 0 }, size = cols - rank, deterministic order */
std::vector<std::vector<Rational>> kernel_basis(const SparseMatrix& m);

/* dim ker(d_out) - rank(d_in); pre: d_out * d_in = 0 (checked) */
int homology_dim(const SparseMatrix& d_in, const SparseMatrix& d_out);

struct HomologyResult {
    int dim = 0;
    /* cycles reduced mod boundaries, one per homology dimension */
    std::vector<std::vector<Rational>> reps;
};
HomologyResult homology_reps(const SparseMatrix& d_in, const SparseMatrix& d_out);

/* one solution of A x = b, if any */
std::optional<std::vector<Rational>> solve(const SparseMatrix& a, const std::vector<Rational>& b);

/* coordinates of v in the span of the columns of basis_mat joined with the
 * quotient construction below; helper for reducing cycles mod boundaries */
class RowSpace {
  public:
    /* echelonizes vectors incrementally; insert returns the residue of v
     * after reduction (zero vector iff v was already in the span) */
    std::vector<Rational> reduce(const std::vector<Rational>& v) const;
    bool insert(const std::vector<Rational>& v);  // true if dimension grew
    int dim() const { return int(rows_.size()); }

  private:
    std::vector<std::vector<Rational>> rows_;  // echelon, leading 1s
    std::vector<int> leads_;
};

}  // namespace lin
}  // namespace loopforms

#endif
