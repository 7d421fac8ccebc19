#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pairspec/errors.hpp"
#include "pairspec/oneshift.hpp"
#include "pairspec/rng.hpp"

#include <cmath>
#include <numbers>

using namespace pairspec;

namespace {

constexpr double kPi = std::numbers::pi;

AngleSequence random_angles(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> th(n), om(n - 1);
    for (auto& t : th) t = rng.uniform(0.05, kPi - 0.05);
    for (auto& w : om) w = rng.uniform(0.05, kPi - 0.05);
    return AngleSequence(th, om);
}

CVector unit(std::size_t dim, std::size_t i) {
    CVector e(dim, cplx(0.0));
    e[i] = 1.0;
    return e;
}

CMatrix materialize(const std::function<CVector(const CVector&)>& f, std::size_t dim) {
    CMatrix m(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) m.set_column(j, f(unit(dim, j)));
    return m;
}

CMatrix random_unitary(std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<CVector> cols;
    CMatrix q(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        CVector c(d);
        for (auto& z : c) z = rng.complex_normal();
        orthogonalize(cols, c);
        cols.push_back(c);
        q.set_column(j, c);
    }
    return q;
}

} // namespace

TEST_CASE("shift_pair_oracle") {
    const OperatorPairOracle o = shift_pair_oracle(8);
    const CVector pe = o.apply_P(unit(8, 0));
    CHECK(pe[0] == cplx(0.5));
    CHECK(pe[1] == cplx(0.5));
    CHECK(norm(pe) == doctest::Approx(std::sqrt(0.5)));
    CHECK(norm(o.apply_Q(unit(8, 0)) - unit(8, 0)) == 0.0);
    CHECK(oracle_projection_defect(shift_pair_oracle(64), 10, 3) < 1e-14);
    CHECK_THROWS_AS(shift_pair_oracle(7), PreconditionError);
    CHECK_THROWS_AS(shift_pair_oracle(2), PreconditionError);

    // Same operators as the pi/2 one-shifted truncation.
    const AngleSequence half = AngleSequence::constant(kPi / 2, 4);
    const CMatrix p = materialize(o.apply_P, 8), q = materialize(o.apply_Q, 8);
    const CMatrix pa = 0.5 * (build_A(half).to_dense() + CMatrix::identity(8));
    const CMatrix qb = 0.5 * (build_B(half).to_dense() + CMatrix::identity(8));
    CHECK(oracle::max_abs_diff(p, pa) < 1e-15);
    CHECK(oracle::max_abs_diff(q, qb) < 1e-15);
}

TEST_CASE("oracle_from_angles gives projections") {
    const OperatorPairOracle o = oracle_from_angles(random_angles(9, 4));
    CHECK(o.dim == 18);
    CHECK(oracle_projection_defect(o, 8, 1) < 1e-14);
}

TEST_CASE("extraction round trip") {
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const AngleSequence ang = random_angles(12, 40 + s);
        const OneShiftExtraction e = extract_one_shifted(oracle_from_angles(ang), unit(24, 0), {12, 1e-10});
        REQUIRE(e.theta.size() == 12);
        REQUIRE(e.omega.size() == 11);
        for (std::size_t k = 0; k < 12; ++k) CHECK(std::abs(e.theta[k] - ang.theta()[k]) < 1e-9);
        for (std::size_t k = 0; k < 11; ++k) CHECK(std::abs(e.omega[k] - ang.omega()[k]) < 1e-9);
        CHECK_FALSE(e.terminated);
        for (double r : e.residuals) CHECK(r < 1e-12);
        const AngleSequence back = e.angles();
        CHECK(back.n() == 12);
    }
}

TEST_CASE("extraction is unitarily invariant") {
    const AngleSequence ang = random_angles(6, 5);
    const ProjectionPairDense pr = pair_from_angles(ang);
    const CMatrix u = random_unitary(12, 9);
    const ProjectionPairDense rot(DenseHermitian(u * pr.P().matrix() * u.adjoint(), 1e-10),
                                  DenseHermitian(u * pr.Q().matrix() * u.adjoint(), 1e-10));
    const OneShiftExtraction e = extract_one_shifted(oracle_from_pair(rot), u.column(0), {6, 1e-10});
    REQUIRE(e.theta.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(e.theta[k] - ang.theta()[k]) < 1e-9);
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(e.omega[k] - ang.omega()[k]) < 1e-9);
}

TEST_CASE("shift example extracts right angles") {
    const OneShiftExtraction e = extract_one_shifted(shift_pair_oracle(400), unit(400, 0), {41, 1e-10});
    REQUIRE(e.theta.size() + e.omega.size() >= 80);
    for (double a : e.theta) CHECK(std::abs(a - kPi / 2) < 1e-9);
    for (double a : e.omega) CHECK(std::abs(a - kPi / 2) < 1e-9);
}

TEST_CASE("extraction breakdown and preconditions") {
    const ProjectionPairDense id(DenseHermitian(CMatrix::identity(3)), DenseHermitian(CMatrix::identity(3)));
    const OneShiftExtraction e = extract_one_shifted(oracle_from_pair(id), unit(3, 0), {3, 1e-10});
    CHECK(e.terminated);
    REQUIRE(e.breakdown_step.has_value());
    CHECK(*e.breakdown_step == 1);
    CHECK(e.theta.empty());

    const OperatorPairOracle sh = shift_pair_oracle(10);
    CHECK_THROWS_AS(extract_one_shifted(sh, unit(10, 1), {2, 1e-10}), PreconditionError); // not Q-fixed
    CVector half = unit(10, 0);
    half[0] = 0.5;
    CHECK_THROWS_AS(extract_one_shifted(sh, half, {2, 1e-10}), PreconditionError);
    CHECK_THROWS_AS(extract_one_shifted(sh, unit(10, 0), {0, 1e-10}), PreconditionError);
    CHECK_THROWS_AS(extract_one_shifted(sh, unit(10, 0), {2, -1.0}), PreconditionError);
    CHECK_THROWS_AS(extract_one_shifted(sh, unit(9, 0), {2, 1e-10}), PreconditionError);
}

TEST_CASE("approximation_defect of truncations") {
    const AngleSequence wide = random_angles(40, 8);
    const OperatorPairOracle truth = oracle_from_angles(wide);
    const Approximation ap = truncation_approximation(wide, 20, 80);
    // supported on u_1..u_10, v_1..v_10: P and Q act inside the first 20 pairs
    Rng rng(2);
    CVector v(80, cplx(0.0));
    for (std::size_t i = 0; i < 20; ++i) v[i] = rng.complex_normal();
    CHECK(approximation_defect(truth, ap, v).defect < 1e-12);
    CHECK(approximation_defect(truth, ap, v).n == 40);

    const OperatorPairOracle sh = shift_pair_oracle(200);
    for (std::size_t n : {1, 5, 50}) {
        const Approximation a = truncation_approximation(AngleSequence::constant(kPi / 2, 100), n, 200);
        CHECK(approximation_defect(sh, a, unit(200, 0)).defect <= 1e-12);
    }
    CHECK_THROWS_AS(approximation_defect(truth, ap, CVector(10)), PreconditionError);
}

TEST_CASE("polynomial_defect") {
    const OperatorPairOracle sh = shift_pair_oracle(200);
    const Approximation a20 = truncation_approximation(AngleSequence::constant(kPi / 2, 100), 20, 200);
    Rng rng(6);
    CVector v(200);
    for (auto& z : v) z = rng.complex_normal();
    const CVector tail = v - a20.embed(a20.restrict_to(v));
    CHECK(std::abs(polynomial_defect({{"I", 1.0}}, sh, a20, v) - norm(tail)) < 1e-12);
    CHECK(polynomial_defect({{"AB", 1.0}, {"BA", -1.0}}, sh, a20, unit(200, 0)) <= 1e-10);
    CHECK_THROWS_AS(polynomial_defect({{"X", 1.0}}, sh, a20, v), PreconditionError);

    // PQP on a vector with decaying coordinates: defect shrinks with n
    const AngleSequence wide = random_angles(256, 12);
    const OperatorPairOracle truth = oracle_from_angles(wide);
    CVector w(512);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.complex_normal() * std::exp(-0.15 * static_cast<double>(i));
    double prev = INFINITY;
    for (std::size_t n : {8, 16, 32, 64}) {
        const double d = polynomial_defect({{"PQP", 1.0}}, truth, truncation_approximation(wide, n, 512), w);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("approx_from_samples") {
    Rng rng(1);
    const ProjectionPairDense pr(random_projection(5, 2, 3), random_projection(5, 3, 4));
    std::vector<CVector> basis;
    for (std::size_t i = 0; i < 5; ++i) basis.push_back(unit(5, i));
    const SampledApproximation all = approx_from_samples(pr, basis);
    CHECK(all.pair.dim() == 5);
    const CMatrix e = all.embedding;
    CHECK(oracle::max_abs_diff(e * all.pair.P().matrix() * e.adjoint(), pr.P().matrix()) < 1e-12);
    CHECK(oracle::max_abs_diff(e * all.pair.Q().matrix() * e.adjoint(), pr.Q().matrix()) < 1e-12);

    // common fixed vector
    const ProjectionPairDense d(DenseHermitian(CMatrix::diagonal({1, 0, 1})), DenseHermitian(CMatrix::diagonal({1, 1, 0})));
    const SampledApproximation one = approx_from_samples(d, {unit(3, 0)});
    CHECK(one.pair.dim() == 1);
    CHECK(std::abs(one.pair.P()(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(one.pair.Q()(0, 0) - 1.0) < 1e-14);

    // samples are reproduced exactly by the approximation
    CVector s(5);
    for (auto& z : s) z = rng.complex_normal();
    const SampledApproximation sa = approx_from_samples(pr, {s});
    CHECK(approximation_defect(oracle_from_pair(pr), sa.as_approximation(), s).defect < 1e-12);
    CHECK_THROWS_AS(approx_from_samples(pr, {}), PreconditionError);
}

TEST_CASE("direct_sum_pair") {
    const ProjectionPairDense c = canonical_pair(0.3);
    const ProjectionPairDense single = direct_sum_pair({c});
    CHECK(oracle::max_abs_diff(single.P().matrix(), c.P().matrix()) == 0.0);
    const ProjectionPairDense two = direct_sum_pair({canonical_pair(0.3), canonical_pair(0.5)});
    CHECK(std::abs(commutator_radius_exact(two) - 2.0) < 1e-12);
    const ProjectionPairDense mixed = direct_sum_pair({canonical_pair(0.3), AngleSequence::constant(kPi / 2, 3)});
    CHECK(mixed.dim() == 8);
    CHECK_THROWS_AS(direct_sum_pair({}), PreconditionError);
}

TEST_CASE("tensor_pair against explicit Kronecker products") {
    const ProjectionPairDense id(DenseHermitian(CMatrix::identity(2)), DenseHermitian(CMatrix::identity(2)));
    const TensorProjections t = tensor_pair(id, id);
    CHECK(oracle::max_abs_diff(materialize(t.p1.apply, 4), CMatrix::identity(4)) == 0.0);

    const ProjectionPairDense a = canonical_pair(0.3), b(random_projection(3, 1, 2), random_projection(3, 2, 3));
    const TensorProjections tp = tensor_pair(a, b);
    const CMatrix i2 = CMatrix::identity(2), i3 = CMatrix::identity(3);
    CHECK(oracle::max_abs_diff(materialize(tp.p1.apply, 6), oracle::kron(a.P().matrix(), i3)) < 1e-15);
    CHECK(oracle::max_abs_diff(materialize(tp.q1.apply, 6), oracle::kron(a.Q().matrix(), i3)) < 1e-15);
    CHECK(oracle::max_abs_diff(materialize(tp.p2.apply, 6), oracle::kron(i2, b.P().matrix())) < 1e-15);
    CHECK(oracle::max_abs_diff(materialize(tp.q2.apply, 6), oracle::kron(i2, b.Q().matrix())) < 1e-15);
}
