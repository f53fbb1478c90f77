#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>
#include <iosfwd>

namespace ncfsi {

/// Factorization hit a zero/tiny pivot. `pivot` is the offending row/column
/// index when it can be determined, -1 otherwise.
struct SingularMatrix : std::runtime_error {
    long pivot;
    SingularMatrix(long pivot_, const std::string& what_)
        : std::runtime_error(what_), pivot(pivot_) {}
};

/// Solve finished but the residual contract could not be met.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Triplet {
    int row;
    int col;
    double value;
};

/// Square sparse matrix in compressed-row storage. Column indices are sorted
/// and unique within each row; the pattern is fixed after construction.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int n, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> vals);

    /// Builds from (row, col, value) triplets; duplicate entries are summed.
    static SparseMatrix from_triplets(int n, std::span<const Triplet> triplets);

    int size() const { return n_; }
    int nnz() const { return static_cast<int>(cols_.size()); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return cols_; }
    const std::vector<double>& values() const { return vals_; }
    std::vector<double>& values() { return vals_; }

    /// Value at (i, j), zero if the entry is not in the pattern.
    double coeff(int i, int j) const;
    /// Reference to an existing entry; throws std::out_of_range if absent.
    double& coeff_ref(int i, int j);
    bool has_entry(int i, int j) const;

    std::vector<double> multiply(const std::vector<double>& x) const;

    /// Plain-text coordinate dump, one `row col value` line per entry.
    void write_coordinate(std::ostream& os) const;

private:
    int n_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> cols_;
    std::vector<double> vals_;
    int find(int i, int j) const; // value index or -1
};

using DirichletConstraint = std::pair<int, double>;

/// Replaces constrained rows by identity rows with b = value and eliminates
/// the corresponding columns into b, so a symmetric matrix stays symmetric.
/// The sparsity pattern is preserved (eliminated entries are zeroed).
/// Conflicting duplicate constraints on the same dof are an error.
void apply_dirichlet_in_place(SparseMatrix& A, std::vector<double>& b,
                              std::span<const DirichletConstraint> constraints);

std::pair<SparseMatrix, std::vector<double>>
apply_dirichlet(const SparseMatrix& A, const std::vector<double>& b,
                std::span<const DirichletConstraint> constraints);

/// Sparse direct LU with a cached symbolic analysis. The monolithic system is
/// refactorized every time step on an unchanged pattern, so the symbolic
/// phase is paid once.
class SparseFactor {
public:
    SparseFactor();
    ~SparseFactor();
    SparseFactor(SparseFactor&&) noexcept;
    SparseFactor& operator=(SparseFactor&&) noexcept;

    /// Numeric factorization; runs the symbolic analysis on first use (or
    /// when the pattern changed). Throws SingularMatrix on pivot failure.
    void factorize(const SparseMatrix& A);
    bool factorized() const;

    /// Back-substitution only; factorize() must have succeeded.
    std::vector<double> solve(const std::vector<double>& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Factorize-and-solve through a caller-owned factor (so the symbolic
/// analysis survives across time steps), enforcing the residual contract
/// ||Ax - b|| / ||b|| <= 1e-10 (b != 0) with iterative refinement; throws
/// SolverFailure when the bound is unattainable.
std::vector<double> solve_checked(SparseFactor& factor, const SparseMatrix& A,
                                  const std::vector<double>& b);

/// One-shot direct solve with the same residual contract.
std::vector<double> factor_solve(const SparseMatrix& A, const std::vector<double>& b);

} // namespace ncfsi
