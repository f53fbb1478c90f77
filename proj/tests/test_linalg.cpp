#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ncfsi/linalg.hpp"
#include "oracles.hpp"

using namespace ncfsi;

namespace {

SparseMatrix dense_to_sparse(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<Triplet> trips;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (a[i][j] != 0.0) trips.push_back({i, j, a[i][j]});
    return SparseMatrix::from_triplets(n, trips);
}

} // namespace

TEST_CASE("CSR construction sorts and merges duplicate triplets") {
    std::vector<Triplet> trips{{1, 1, 2.0}, {0, 1, 1.0}, {0, 0, 1.0}, {0, 1, 0.5}, {1, 0, -1.0}};
    SparseMatrix A = SparseMatrix::from_triplets(2, trips);
    CHECK(A.nnz() == 4);
    CHECK(A.coeff(0, 1) == doctest::Approx(1.5));
    CHECK(A.coeff(0, 0) == doctest::Approx(1.0));
    CHECK(A.coeff(1, 1) == doctest::Approx(2.0));
    CHECK(A.has_entry(0, 1));
    CHECK(A.coeff(1, 1) == A.coeff_ref(1, 1));
    // Columns sorted and unique within each row.
    for (int i = 0; i < A.size(); ++i)
        for (int k = A.row_ptr()[i] + 1; k < A.row_ptr()[i + 1]; ++k)
            CHECK(A.cols()[k] > A.cols()[k - 1]);
}

TEST_CASE("factor_solve: identity and a hand-checkable 2x2") {
    const SparseMatrix I = dense_to_sparse({{1, 0}, {0, 1}});
    const std::vector<double> b{3.0, -7.5};
    CHECK(factor_solve(I, b) == b);

    const SparseMatrix A = dense_to_sparse({{2, 1}, {1, 2}});
    const auto x = factor_solve(A, {3.0, 3.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("factor_solve matches the dense oracle on a random SPD system") {
    oracles::Rng rng(42);
    const int n = 50;
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = rng.uniform(-1.0, 1.0);
    // SPD: A = M^T M + n I
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) a[i][j] += m[k][i] * m[k][j];
            if (i == j) a[i][j] += n;
        }
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) b[i] = rng.uniform(-2.0, 2.0);

    const SparseMatrix A = dense_to_sparse(a);
    const auto x = factor_solve(A, b);
    const auto x_oracle = oracles::dense_solve(a, b);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(x_oracle[i]).epsilon(1e-9));

    const auto r = A.multiply(x);
    double rn = 0.0, bn = 0.0;
    for (int i = 0; i < n; ++i) {
        rn += (r[i] - b[i]) * (r[i] - b[i]);
        bn += b[i] * b[i];
    }
    CHECK(std::sqrt(rn) <= 1e-10 * std::sqrt(bn));
}

TEST_CASE("factor_solve recovers x0 from A*x0 (property)") {
    oracles::Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 20;
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                if (rng.uniform() < 0.3) a[i][j] = rng.uniform(-1.0, 1.0);
            a[i][i] += 4.0; // diagonally dominant => well conditioned
        }
        std::vector<double> x0(n);
        for (int i = 0; i < n; ++i) x0[i] = rng.uniform(-5.0, 5.0);
        const SparseMatrix A = dense_to_sparse(a);
        const auto x = factor_solve(A, A.multiply(x0));
        double err = 0.0, ref = 0.0;
        for (int i = 0; i < n; ++i) {
            err += (x[i] - x0[i]) * (x[i] - x0[i]);
            ref += x0[i] * x0[i];
        }
        CHECK(std::sqrt(err) <= 1e-9 * std::sqrt(ref));
    }
}

TEST_CASE("singular matrices are reported with a pivot index") {
    SUBCASE("structurally empty row") {
        const SparseMatrix A = dense_to_sparse({{1, 2, 0}, {0, 0, 0}, {0, 1, 1}});
        CHECK_THROWS_AS((void)factor_solve(A, {1, 1, 1}), SingularMatrix);
        try {
            (void)factor_solve(A, {1, 1, 1});
        } catch (const SingularMatrix& e) {
            CHECK(e.pivot == 1);
        }
    }
    SUBCASE("numerically singular") {
        const SparseMatrix A = dense_to_sparse({{1, 1}, {1, 1}});
        CHECK_THROWS_AS((void)factor_solve(A, {1, 1}), SingularMatrix);
    }
}

TEST_CASE("apply_dirichlet") {
    SUBCASE("empty constraint list leaves the system unchanged") {
        const SparseMatrix A = dense_to_sparse({{2, 1}, {1, 2}});
        const std::vector<double> b{1.0, 2.0};
        auto [A2, b2] = apply_dirichlet(A, b, {});
        CHECK(A2.values() == A.values());
        CHECK(b2 == b);
    }
    SUBCASE("constraining every dof to zero forces the zero solution") {
        const SparseMatrix A = dense_to_sparse({{2, 1}, {1, 2}});
        std::vector<DirichletConstraint> cons{{0, 0.0}, {1, 0.0}};
        auto [A2, b2] = apply_dirichlet(A, {5.0, -3.0}, cons);
        const auto x = factor_solve(A2, b2);
        CHECK(x[0] == 0.0);
        CHECK(x[1] == 0.0);
    }
    SUBCASE("1D Laplacian with fixed ends gives a linear ramp") {
        const int n = 5;
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            a[i][i] = 2.0;
            if (i > 0) a[i][i - 1] = -1.0;
            if (i + 1 < n) a[i][i + 1] = -1.0;
        }
        const SparseMatrix A = dense_to_sparse(a);
        std::vector<DirichletConstraint> cons{{0, 0.0}, {n - 1, 1.0}};
        auto [A2, b2] = apply_dirichlet(A, std::vector<double>(n, 0.0), cons);
        const auto x = factor_solve(A2, b2);
        for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(i / 4.0).epsilon(1e-12));
    }
    SUBCASE("symmetry is preserved") {
        oracles::Rng rng(11);
        const int n = 12;
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                if (rng.uniform() < 0.4 || i == j) {
                    const double v = rng.uniform(-1.0, 1.0) + (i == j ? 3.0 : 0.0);
                    a[i][j] = a[j][i] = v;
                }
            }
        const SparseMatrix A = dense_to_sparse(a);
        std::vector<DirichletConstraint> cons{{2, 1.5}, {7, -0.5}, {11, 2.0}};
        auto [A2, b2] = apply_dirichlet(A, std::vector<double>(n, 1.0), cons);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(A2.coeff(i, j) == A2.coeff(j, i));
    }
    SUBCASE("conflicting duplicate constraints are rejected") {
        const SparseMatrix A = dense_to_sparse({{1, 0}, {0, 1}});
        std::vector<DirichletConstraint> cons{{0, 1.0}, {0, 2.0}};
        std::vector<double> b{0.0, 0.0};
        CHECK_THROWS((void)apply_dirichlet(A, b, cons));
    }
}

TEST_CASE("coordinate-format dump") {
    const SparseMatrix A = dense_to_sparse({{1.5, 0}, {0, -2}});
    std::ostringstream os;
    A.write_coordinate(os);
    CHECK(os.str() == "0 0 1.5\n1 1 -2\n");
}
