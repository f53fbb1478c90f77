#include "ncfsi/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace ncfsi {

SparseMatrix::SparseMatrix(int n, std::vector<int> row_ptr, std::vector<int> cols,
                           std::vector<double> vals)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
    if (n_ < 0 || static_cast<int>(row_ptr_.size()) != n_ + 1 || cols_.size() != vals_.size() ||
        row_ptr_.front() != 0 || row_ptr_.back() != static_cast<int>(cols_.size()))
        throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
    for (int i = 0; i < n_; ++i) {
        if (row_ptr_[i] > row_ptr_[i + 1])
            throw std::invalid_argument("SparseMatrix: row pointers not monotone");
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            if (cols_[k] < 0 || cols_[k] >= n_)
                throw std::invalid_argument("SparseMatrix: column index out of range");
            if (k > row_ptr_[i] && cols_[k] <= cols_[k - 1])
                throw std::invalid_argument("SparseMatrix: columns not sorted/unique");
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(int n, std::span<const Triplet> triplets) {
    std::vector<int> count(n + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw std::invalid_argument("from_triplets: index out of range");
        ++count[t.row + 1];
    }
    std::vector<int> start(n + 1, 0);
    for (int i = 0; i < n; ++i) start[i + 1] = start[i] + count[i + 1];
    std::vector<int> cols(triplets.size());
    std::vector<double> vals(triplets.size());
    std::vector<int> cursor(start.begin(), start.end() - 1);
    for (const auto& t : triplets) {
        const int k = cursor[t.row]++;
        cols[k] = t.col;
        vals[k] = t.value;
    }
    // Sort each row and merge duplicates.
    std::vector<int> row_ptr(n + 1, 0);
    std::vector<int> out_cols;
    std::vector<double> out_vals;
    out_cols.reserve(triplets.size());
    out_vals.reserve(triplets.size());
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n; ++i) {
        row.clear();
        for (int k = start[i]; k < start[i + 1]; ++k) row.emplace_back(cols[k], vals[k]);
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (!out_cols.empty() && static_cast<int>(out_cols.size()) > row_ptr[i] &&
                out_cols.back() == row[k].first) {
                out_vals.back() += row[k].second;
            } else {
                out_cols.push_back(row[k].first);
                out_vals.push_back(row[k].second);
            }
        }
        row_ptr[i + 1] = static_cast<int>(out_cols.size());
    }
    return SparseMatrix(n, std::move(row_ptr), std::move(out_cols), std::move(out_vals));
}

int SparseMatrix::find(int i, int j) const {
    const auto begin = cols_.begin() + row_ptr_[i];
    const auto end = cols_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return -1;
    return static_cast<int>(it - cols_.begin());
}

double SparseMatrix::coeff(int i, int j) const {
    const int k = find(i, j);
    return k < 0 ? 0.0 : vals_[k];
}

double& SparseMatrix::coeff_ref(int i, int j) {
    const int k = find(i, j);
    if (k < 0) throw std::out_of_range("SparseMatrix::coeff_ref: entry not in pattern");
    return vals_[k];
}

bool SparseMatrix::has_entry(int i, int j) const { return find(i, j) >= 0; }

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
        y[i] = s;
    }
    return y;
}

void SparseMatrix::write_coordinate(std::ostream& os) const {
    char buf[64];
    for (int i = 0; i < n_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, cols_[k], vals_[k]);
            os << buf;
        }
    }
}

void apply_dirichlet_in_place(SparseMatrix& A, std::vector<double>& b,
                              std::span<const DirichletConstraint> constraints) {
    const int n = A.size();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("apply_dirichlet: rhs size mismatch");
    std::vector<char> fixed(n, 0);
    std::vector<double> value(n, 0.0);
    for (const auto& [dof, v] : constraints) {
        if (dof < 0 || dof >= n) throw std::invalid_argument("apply_dirichlet: dof out of range");
        if (fixed[dof] && value[dof] != v)
            throw std::invalid_argument("apply_dirichlet: conflicting constraints on dof " +
                                        std::to_string(dof));
        fixed[dof] = 1;
        value[dof] = v;
    }
    const auto& row_ptr = A.row_ptr();
    const auto& cols = A.cols();
    auto& vals = A.values();
    for (int i = 0; i < n; ++i) {
        if (fixed[i]) {
            bool diag_found = false;
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                if (cols[k] == i) {
                    vals[k] = 1.0;
                    diag_found = true;
                } else {
                    vals[k] = 0.0;
                }
            }
            if (!diag_found)
                throw std::invalid_argument("apply_dirichlet: missing diagonal for constrained dof " +
                                            std::to_string(i));
            b[i] = value[i];
        } else {
            // Column elimination: move known values to the right-hand side.
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                const int j = cols[k];
                if (fixed[j]) {
                    b[i] -= vals[k] * value[j];
                    vals[k] = 0.0;
                }
            }
        }
    }
}

std::pair<SparseMatrix, std::vector<double>>
apply_dirichlet(const SparseMatrix& A, const std::vector<double>& b,
                std::span<const DirichletConstraint> constraints) {
    SparseMatrix A2 = A;
    std::vector<double> b2 = b;
    apply_dirichlet_in_place(A2, b2, constraints);
    return {std::move(A2), std::move(b2)};
}

namespace {

long parse_index(const std::string& msg) {
    // Eigen's error strings mention the failing column when known.
    for (std::size_t i = 0; i < msg.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(msg[i]))) {
            return std::strtol(msg.c_str() + i, nullptr, 10);
        }
    }
    return -1;
}

long find_empty_row_or_col(const SparseMatrix& A) {
    const int n = A.size();
    std::vector<char> col_used(n, 0);
    for (int i = 0; i < n; ++i) {
        bool any = false;
        for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
            if (A.values()[k] != 0.0) {
                any = true;
                col_used[A.cols()[k]] = 1;
            }
        }
        if (!any) return i;
    }
    for (int j = 0; j < n; ++j)
        if (!col_used[j]) return j;
    return -1;
}

} // namespace

struct SparseFactor::Impl {
    Eigen::SparseMatrix<double> mat; // column-major copy handed to SparseLU
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    bool numeric_ok = false;
    std::vector<int> pattern_rows; // pattern snapshot to detect changes
    std::vector<int> pattern_cols;
};

SparseFactor::SparseFactor() : impl_(std::make_unique<Impl>()) {}
SparseFactor::~SparseFactor() = default;
SparseFactor::SparseFactor(SparseFactor&&) noexcept = default;
SparseFactor& SparseFactor::operator=(SparseFactor&&) noexcept = default;

void SparseFactor::factorize(const SparseMatrix& A) {
    const int n = A.size();
    impl_->numeric_ok = false;
    const bool same_pattern = impl_->analyzed && impl_->pattern_rows == A.row_ptr() &&
                              impl_->pattern_cols == A.cols() && impl_->mat.rows() == n;
    if (!same_pattern) {
        using T = Eigen::Triplet<double>;
        std::vector<T> trips;
        trips.reserve(A.nnz());
        for (int i = 0; i < n; ++i)
            for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
                trips.emplace_back(i, A.cols()[k], A.values()[k]);
        impl_->mat.resize(n, n);
        impl_->mat.setFromTriplets(trips.begin(), trips.end());
        impl_->mat.makeCompressed();
        impl_->lu.analyzePattern(impl_->mat);
        impl_->analyzed = true;
        impl_->pattern_rows = A.row_ptr();
        impl_->pattern_cols = A.cols();
    } else {
        // Same pattern: overwrite values in place. CSR rows map to CSC columns
        // of the transpose, so rebuild values through the stored pattern.
        double* v = impl_->mat.valuePtr();
        const int* outer = impl_->mat.outerIndexPtr();
        const int* inner = impl_->mat.innerIndexPtr();
        // Column-major fill from CSR: walk rows, scatter into per-column cursors.
        std::vector<int> cursor(n);
        for (int j = 0; j < n; ++j) cursor[j] = outer[j];
        for (int i = 0; i < n; ++i) {
            for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) {
                const int j = A.cols()[k];
                int& c = cursor[j];
                // Entries in a CSC column arrive in increasing row order when
                // we sweep CSR rows in order, so the cursor walk is exact.
                v[c] = A.values()[k];
                if (inner[c] != i)
                    throw std::logic_error("SparseFactor: pattern mismatch during refill");
                ++c;
            }
        }
    }
    const long empty = find_empty_row_or_col(A);
    if (empty >= 0)
        throw SingularMatrix(empty, "structurally singular: empty row/column " +
                                        std::to_string(empty));
    impl_->lu.factorize(impl_->mat);
    if (impl_->lu.info() != Eigen::Success) {
        const std::string msg = impl_->lu.lastErrorMessage();
        throw SingularMatrix(parse_index(msg), "sparse LU factorization failed: " + msg);
    }
    impl_->numeric_ok = true;
}

bool SparseFactor::factorized() const { return impl_->numeric_ok; }

std::vector<double> SparseFactor::solve(const std::vector<double>& b) const {
    if (!impl_->numeric_ok) throw std::logic_error("SparseFactor::solve before factorize");
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = impl_->lu.solve(bm);
    if (impl_->lu.info() != Eigen::Success)
        throw SolverFailure("sparse LU back-substitution failed");
    return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> solve_checked(SparseFactor& factor, const SparseMatrix& A,
                                  const std::vector<double>& b) {
    if (static_cast<int>(b.size()) != A.size())
        throw std::invalid_argument("solve_checked: size mismatch");
    factor.factorize(A);
    std::vector<double> x = factor.solve(b);

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return x; // unique solution of a nonsingular system is 0

    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> r = A.multiply(x);
        double rnorm = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] = b[i] - r[i];
            rnorm += r[i] * r[i];
        }
        rnorm = std::sqrt(rnorm);
        if (rnorm <= 1e-10 * bnorm) return x;
        const std::vector<double> dx = factor.solve(r);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }
    std::vector<double> r = A.multiply(x);
    double rnorm = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double d = b[i] - r[i];
        rnorm += d * d;
    }
    if (std::sqrt(rnorm) <= 1e-10 * bnorm) return x;
    throw SolverFailure("solve: residual contract 1e-10 not met after refinement");
}

std::vector<double> factor_solve(const SparseMatrix& A, const std::vector<double>& b) {
    SparseFactor f;
    return solve_checked(f, A, b);
}

} // namespace ncfsi
