#include <Eigen/Dense>

#include "doctest.h"
#include "mqc/config.hpp"
#include "mqc/linalg.hpp"
#include "mqc/rng.hpp"

using namespace mqc;

namespace {

Eigen::MatrixXcd to_eigen(const CMatrix& a) {
    Eigen::MatrixXcd e(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
    return e;
}

CMatrix reconstruct(const EigResult<cplx>& e) {
    const std::size_t n = e.values.size();
    CMatrix r(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) += e.vectors(i, k) * e.values[k] * std::conj(e.vectors(j, k));
    return r;
}

}  // namespace

TEST_CASE("Jacobi eigenvalues agree with Eigen on random Hermitian matrices") {
    Rng rng(11);
    for (std::size_t n = 1; n <= 12; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            CMatrix a = random_hermitian(n, rng) * cplx(3.0);
            auto mine = herm_eig(a);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
            for (std::size_t k = 0; k < n; ++k)
                CHECK(mine.values[k] == doctest::Approx(es.eigenvalues()(static_cast<Eigen::Index>(n - 1 - k))).epsilon(1e-12));
            CHECK((reconstruct(mine) - a).max_abs() < 1e-12);
            CMatrix vv = mine.vectors.adjoint() * mine.vectors;
            CHECK((vv - CMatrix::identity(n)).max_abs() < 1e-12);
            for (std::size_t k = 1; k < n; ++k) CHECK(mine.values[k - 1] >= mine.values[k]);
        }
    }
}

TEST_CASE("Jacobi handles degenerate and trivial spectra") {
    CMatrix id = CMatrix::identity(5);
    auto e = herm_eig(id);
    for (double v : e.values) CHECK(v == doctest::Approx(1.0));
    CMatrix zero(4, 4);
    auto z = herm_eig(zero);
    for (double v : z.values) CHECK(v == 0.0);
    // Rank-one projector with a four-fold degenerate zero eigenvalue.
    CVector v{cplx(0.5), cplx(0, 0.5), cplx(-0.5), cplx(0.5)};
    auto p = herm_eig(projector(v));
    CHECK(p.values[0] == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(p.values[k]) < 1e-13);
    CMatrix one{{cplx(2.5)}};
    CHECK(herm_eig(one).values[0] == doctest::Approx(2.5));
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
    CMatrix a{{cplx(1), cplx(2)}, {cplx(0), cplx(1)}};
    CHECK_THROWS_AS(herm_eig(a), NonHermitianError);
    CMatrix rect(2, 3);
    CHECK_THROWS_AS(herm_eig(rect), ShapeError);
}

TEST_CASE("trace norm of Hermitian and general matrices matches singular values") {
    Rng rng(5);
    for (std::size_t n = 1; n <= 8; ++n) {
        CMatrix h = random_hermitian(n, rng);
        CMatrix g = ginibre(n, n, rng);
        Eigen::JacobiSVD<Eigen::MatrixXcd> sh(to_eigen(h)), sg(to_eigen(g));
        CHECK(trace_norm(h) == doctest::Approx(sh.singularValues().sum()).epsilon(1e-11));
        CHECK(trace_norm(g) == doctest::Approx(sg.singularValues().sum()).epsilon(1e-11));
        CHECK(op_norm(g) == doctest::Approx(sg.singularValues()(0)).epsilon(1e-11));
    }
    CMatrix pauli_y{{cplx(0), cplx(0, -1)}, {cplx(0, 1), cplx(0)}};
    CHECK(trace_norm(pauli_y) == doctest::Approx(2.0));
}

TEST_CASE("PSD projection is the nearest PSD matrix and idempotent") {
    Rng rng(9);
    for (int rep = 0; rep < 10; ++rep) {
        CMatrix a = random_hermitian(6, rng);
        CMatrix p = psd_project(a);
        CHECK(min_eigval(p) > -1e-13);
        CHECK((psd_project(p) - p).max_abs() < 1e-12);
        // The removed part is the negative spectral part, so p - a is PSD.
        CHECK(min_eigval(p - a) > -1e-13);
        // Frobenius distance equals the norm of the negative eigenvalues.
        double neg = 0;
        for (double x : herm_eigvals(a))
            if (x < 0) neg += x * x;
        CHECK((a - p).frobenius_norm() == doctest::Approx(std::sqrt(neg)).epsilon(1e-10));
    }
}

TEST_CASE("determinant and inverse agree with Eigen") {
    Rng rng(3);
    for (std::size_t n = 1; n <= 7; ++n) {
        RMatrix a = real_ginibre(n, n, rng);
        Eigen::MatrixXd e(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j);
        CHECK(det(a) == doctest::Approx(e.determinant()).epsilon(1e-10));
        RMatrix prod = a * inverse(a);
        CHECK((prod - RMatrix::identity(n)).max_abs() < 1e-9);
    }
    RMatrix singular{{1, 2}, {2, 4}};
    CHECK(det(singular) == doctest::Approx(0.0));
    CHECK_THROWS_AS(inverse(singular), InvalidArgument);
}

TEST_CASE("matrix exponential") {
    RMatrix gen{{0, 1}, {-1, 0}};
    RMatrix r = expm(gen * 0.7);
    CHECK(r(0, 0) == doctest::Approx(std::cos(0.7)));
    CHECK(r(0, 1) == doctest::Approx(std::sin(0.7)));
    Rng rng(1);
    RMatrix a = real_ginibre(4, 4, rng) * 2.0;
    RMatrix prod = expm(a) * expm(a * -1.0);
    CHECK((prod - RMatrix::identity(4)).max_abs() < 1e-9);
}

TEST_CASE("Kronecker product and traces") {
    CMatrix a{{cplx(1), cplx(2)}, {cplx(3), cplx(4)}};
    CMatrix b{{cplx(0), cplx(1)}, {cplx(1), cplx(0)}};
    CMatrix k = kron(a, b);
    CHECK(k(0, 1) == cplx(1));
    CHECK(k(3, 2) == cplx(4));
    CHECK(k.trace() == a.trace() * b.trace());
    CHECK(trace_product(a, b) == (a * b).trace());
}

TEST_CASE("tolerance overrides") {
    Tolerances t = apply_overrides(Tolerances{}, "psd=1e-7,sdp_max_iter=10");
    CHECK(t.psd == doctest::Approx(1e-7));
    CHECK(t.sdp_max_iter == 10);
    CHECK_THROWS_AS(apply_overrides(Tolerances{}, "nonsense=1"), InvalidArgument);
    CHECK_THROWS_AS(apply_overrides(Tolerances{}, "psd=abc"), InvalidArgument);
}
