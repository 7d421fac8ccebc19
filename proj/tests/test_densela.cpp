#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pairspec/errors.hpp"
#include "pairspec/rng.hpp"

#include <cmath>
#include <numbers>

using namespace pairspec;

namespace {

CMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    CMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (auto r : rows) {
        std::size_t j = 0;
        for (double x : r) m(i, j++) = x;
        ++i;
    }
    return m;
}

CMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = rng.normal();
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = rng.complex_normal();
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

} // namespace

TEST_CASE("jacobi_eigen small cases") {
    auto ev = jacobi_eigen(DenseHermitian(CMatrix::diagonal({3, 1, 2}))).eigenvalues;
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(2.0));
    CHECK(ev[2] == doctest::Approx(3.0));

    ev = jacobi_eigen(DenseHermitian(real_matrix({{1, 1}, {1, -1}}))).eigenvalues;
    CHECK(std::abs(ev[0] + std::numbers::sqrt2) < 1e-14);
    CHECK(std::abs(ev[1] - std::numbers::sqrt2) < 1e-14);

    ev = jacobi_eigen(DenseHermitian(real_matrix({{0, 1}, {1, 0}}))).eigenvalues;
    CHECK(std::abs(ev[0] + 1.0) < 1e-15);
    CHECK(std::abs(ev[1] - 1.0) < 1e-15);
}

TEST_CASE("jacobi_eigen matches the reference eigensolver and is unitary") {
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const std::size_t n = 1 + s % 12;
        const CMatrix m = random_hermitian(n, s);
        const DenseSpectrum sp = jacobi_eigen(DenseHermitian(m));
        CHECK(oracle::max_abs_diff(sp.eigenvalues, oracle::hermitian_eigenvalues(m)) < 1e-12);
        const CMatrix u = sp.eigenvectors;
        CHECK(oracle::max_abs_diff(u.adjoint() * u, CMatrix::identity(n)) < 1e-12);
        CMatrix d(n, n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = sp.eigenvalues[i];
        CHECK(oracle::max_abs_diff(u * d * u.adjoint(), m) < 1e-11);
    }
}

TEST_CASE("DenseHermitian rejects asymmetric input") {
    CHECK_THROWS_AS(DenseHermitian(real_matrix({{1, 2}, {0, 1}})), PreconditionError);
    CMatrix c(2, 2);
    c(0, 1) = cplx(0, 1);
    c(1, 0) = cplx(0, 1); // should be -i
    CHECK_THROWS_AS(DenseHermitian{c}, PreconditionError);
    CHECK_THROWS_AS(DenseHermitian(CMatrix(2, 3)), PreconditionError);
}

TEST_CASE("spectral_norm") {
    const NormEstimate id = spectral_norm(as_operator(CMatrix::identity(7)));
    CHECK(id.converged);
    CHECK(std::abs(id.value - 1.0) < 1e-12);
    CHECK(std::abs(spectral_norm(as_operator(CMatrix::diagonal({1, -3, 2}))).value - 3.0) < 1e-12);
    CHECK(std::abs(spectral_norm(as_operator(real_matrix({{1, 1}, {1, -1}}))).value - std::numbers::sqrt2) < 1e-10);
    CHECK(spectral_norm(as_operator(CMatrix(4, 4))).value == 0.0);

    for (std::uint64_t s = 1; s <= 10; ++s) {
        const CMatrix m = random_hermitian(10 + 5 * s, 100 + s);
        const NormEstimate e = spectral_norm(as_operator(m), {4000, 1e-12, s, 80});
        CHECK(e.converged);
        CHECK(std::abs(e.value - oracle::hermitian_norm(m)) < 1e-10);
    }
}

TEST_CASE("spectral_norm handles a +-norm pair and a degenerate top") {
    // eigenvalues -5, 5, 5 and smaller ones
    CHECK(std::abs(spectral_norm(as_operator(CMatrix::diagonal({-5, 5, 5, 1, 0.5}))).value - 5.0) < 1e-12);
}

TEST_CASE("commutator") {
    const DenseHermitian a(real_matrix({{0, 1}, {1, 0}}));
    const DenseHermitian b(CMatrix::diagonal({1, -1}));
    const CMatrix c = commutator(a, b).matrix();
    // i[A,B] with [A,B] = [[0,-2],[2,0]]
    CHECK(std::abs(c(0, 1) - cplx(0, -2)) < 1e-15);
    CHECK(std::abs(c(1, 0) - cplx(0, 2)) < 1e-15);
    const auto ev = oracle::hermitian_eigenvalues(c);
    CHECK(std::abs(ev[0] + 2) < 1e-14);
    CHECK(std::abs(ev[1] - 2) < 1e-14);

    CHECK(commutator(a, a).matrix().max_abs() == 0.0);
    CHECK(commutator(DenseHermitian(CMatrix::diagonal({1, 2})), b).matrix().max_abs() == 0.0);

    const CMatrix h1 = random_hermitian(6, 5), h2 = random_hermitian(6, 6);
    const CMatrix ref = cplx(0, 1) * (h1 * h2 - h2 * h1);
    CHECK(oracle::max_abs_diff(commutator(DenseHermitian(h1), DenseHermitian(h2)).matrix(), ref) < 1e-13);
}

TEST_CASE("kron_apply against explicit Kronecker products") {
    const CVector v{1, 2, 3, 4};
    const Operator id2 = as_operator(CMatrix::identity(2));
    const Operator ii[2] = {id2, id2};
    CHECK(kron_apply(ii, v) == v);

    const Operator zi[2] = {as_operator(CMatrix::diagonal({1, -1})), id2};
    CVector e2(4, 0.0);
    e2[2] = 1.0;
    const CVector r = kron_apply(zi, e2);
    CHECK(r[2] == cplx(-1.0));
    CHECK(norm(r + e2) == 0.0);

    for (std::uint64_t s = 1; s <= 5; ++s) {
        const CMatrix a = random_hermitian(2 + s % 3, s), b = random_hermitian(3 + s % 2, s + 50),
                      c = random_hermitian(2, s + 99);
        const Operator f[3] = {as_operator(a), as_operator(b), as_operator(c)};
        const CMatrix k = oracle::kron(oracle::kron(a, b), c);
        Rng rng(s);
        CVector x(k.cols());
        for (auto& z : x) z = rng.complex_normal();
        CHECK(norm(kron_apply(f, x) - k.apply(x)) < 1e-12);
    }
    CHECK_THROWS_AS(kron_apply(ii, CVector(3)), PreconditionError);
}

TEST_CASE("random_projection") {
    CHECK(random_projection(5, 0, 1).matrix().max_abs() == 0.0);
    CHECK(oracle::max_abs_diff(random_projection(5, 5, 1).matrix(), CMatrix::identity(5)) < 1e-12);
    const CMatrix p = random_projection(4, 2, 7).matrix();
    cplx tr = 0;
    for (std::size_t i = 0; i < 4; ++i) tr += p(i, i);
    CHECK(std::abs(tr - 2.0) < 1e-10);
    CHECK(oracle::max_abs_diff(p * p, p) < 1e-12);
    CHECK(oracle::max_abs_diff(random_projection(4, 2, 7).matrix(), p) == 0.0);
    CHECK_THROWS_AS(random_projection(3, 4, 1), PreconditionError);
}

TEST_CASE("involution squares to the identity") {
    const DenseHermitian a = involution(random_projection(6, 3, 11));
    CHECK(oracle::max_abs_diff(a.matrix() * a.matrix(), CMatrix::identity(6)) < 1e-12);
}

TEST_CASE("direct_sum and kron helpers") {
    const CMatrix a = real_matrix({{1, 2}, {3, 4}});
    const CMatrix d = direct_sum({a, CMatrix::identity(1)});
    CHECK(d.rows() == 3);
    CHECK(d(2, 2) == cplx(1));
    CHECK(d(0, 2) == cplx(0));
    CHECK(oracle::max_abs_diff(kron(a, CMatrix::identity(2)), oracle::kron(a, CMatrix::identity(2))) == 0.0);
}

TEST_CASE("Rng is reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    Rng c(9);
    double mean = 0, var = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = c.normal();
        mean += x;
        var += x * x;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
}
