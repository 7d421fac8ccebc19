#include "pairspec/oneshift.hpp"

#include "pairspec/errors.hpp"
#include "pairspec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pairspec {

namespace {

CVector apply_real_tridiag(const SymTridiagonal& t, const CVector& v) {
    const std::size_t m = t.size();
    if (v.size() != m) throw PreconditionError("vector length does not match truncation");
    const auto& d = t.diag();
    const auto& e = t.offdiag();
    CVector r(m);
    for (std::size_t i = 0; i < m; ++i) {
        cplx s = d[i] * v[i];
        if (i > 0) s += e[i - 1] * v[i - 1];
        if (i + 1 < m) s += e[i] * v[i + 1];
        r[i] = s;
    }
    return r;
}

// (X + I)/2 for an involution X given as a tridiagonal.
std::function<CVector(const CVector&)> projection_from(const SymTridiagonal& x) {
    return [x](const CVector& v) {
        CVector r = apply_real_tridiag(x, v);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * (r[i] + v[i]);
        return r;
    };
}

CVector involution_of(const std::function<CVector(const CVector&)>& proj, const CVector& v) {
    CVector r = proj(v);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = 2.0 * r[i] - v[i];
    return r;
}

CMatrix dense_projection(const SymTridiagonal& x) {
    CMatrix m = x.to_dense();
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0;
    m *= 0.5;
    return m;
}

} // namespace

OperatorPairOracle oracle_from_pair(const ProjectionPairDense& pair) {
    const CMatrix p = pair.P().matrix();
    const CMatrix q = pair.Q().matrix();
    return {pair.dim(), [p](const CVector& v) { return p.apply(v); },
            [q](const CVector& v) { return q.apply(v); }};
}

OperatorPairOracle oracle_from_angles(const AngleSequence& ang) {
    return {2 * ang.n(), projection_from(build_A(ang)), projection_from(build_B(ang))};
}

OperatorPairOracle shift_pair_oracle(std::size_t N) {
    if (N < 4 || N % 2 != 0) throw PreconditionError("shift pair truncation needs even N >= 4");
    auto p = [N](const CVector& x) {
        if (x.size() != N) throw PreconditionError("shift pair: length mismatch");
        CVector r(N);
        for (std::size_t k = 0; k + 1 < N; k += 2) r[k] = r[k + 1] = 0.5 * (x[k] + x[k + 1]);
        return r;
    };
    auto q = [N](const CVector& x) {
        if (x.size() != N) throw PreconditionError("shift pair: length mismatch");
        CVector r(N, cplx(0.0));
        r[0] = x[0];
        for (std::size_t k = 1; k + 2 < N; k += 2) r[k] = r[k + 1] = 0.5 * (x[k] + x[k + 1]);
        return r; // x_N has no partner inside the truncation and is dropped
    };
    return {N, p, q};
}

double oracle_projection_defect(const OperatorPairOracle& o, int probes, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) {
        CVector x(o.dim), y(o.dim);
        for (auto& z : x) z = rng.complex_normal();
        for (auto& z : y) z = rng.complex_normal();
        for (const auto* f : {&o.apply_P, &o.apply_Q}) {
            const CVector fx = (*f)(x);
            const double idem = norm((*f)(fx) - fx) / norm(x);
            const double adj = std::abs(inner(fx, y) - inner(x, (*f)(y))) / (norm(x) * norm(y));
            worst = std::max({worst, idem, adj});
        }
    }
    return worst;
}

AngleSequence OneShiftExtraction::angles() const {
    if (theta.empty()) throw PreconditionError("extraction produced no angles");
    std::vector<double> om(omega.begin(), omega.begin() + static_cast<std::ptrdiff_t>(theta.size() - 1));
    return AngleSequence(theta, om);
}

OneShiftExtraction extract_one_shifted(const OperatorPairOracle& oracle, const CVector& u0,
                                       const ExtractOptions& opts) {
    if (opts.n_max < 1) throw PreconditionError("n_max must be >= 1");
    if (!(opts.tol_breakdown > 0.0 && opts.tol_breakdown <= 1e-3))
        throw PreconditionError("tol_breakdown must lie in (0, 1e-3]");
    if (u0.size() != oracle.dim) throw PreconditionError("start vector length mismatch");
    if (std::abs(norm(u0) - 1.0) > 1e-8) throw PreconditionError("start vector is not a unit vector");
    if (norm(oracle.apply_Q(u0) - u0) > 1e-8) throw PreconditionError("start vector is not fixed by Q");

    OneShiftExtraction out;
    out.basis.push_back(u0);
    std::size_t step = 0;
    // Each step maps the newest basis vector w through X = 2R - I (R = P or Q):
    // X w = cos(a) w + sin(a) w_next.
    auto advance = [&](const std::function<CVector(const CVector&)>& proj, std::vector<double>& angles) {
        ++step;
        const CVector& w = out.basis.back();
        CVector r = involution_of(proj, w);
        const double c = inner(w, r).real();
        axpy(-c, w, r);
        const double s = orthogonalize(out.basis, r);
        out.residuals.push_back(std::abs(s - std::sqrt(std::max(0.0, 1.0 - c * c))));
        if (s < opts.tol_breakdown) {
            out.terminated = true;
            out.breakdown_step = step;
            return false;
        }
        angles.push_back(std::atan2(s, c));
        out.basis.push_back(std::move(r));
        return true;
    };

    for (std::size_t i = 0; i < opts.n_max; ++i) {
        if (!advance(oracle.apply_P, out.theta)) break;
        if (i + 1 == opts.n_max) break;
        if (!advance(oracle.apply_Q, out.omega)) break;
    }
    return out;
}

CVector Approximation::restrict_to(const CVector& v) const {
    if (v.size() != ambient_dim) throw PreconditionError("approximation: ambient length mismatch");
    if (!isometry) return CVector(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(dim));
    CVector c(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < ambient_dim; ++i) s += std::conj((*isometry)(i, j)) * v[i];
        c[j] = s;
    }
    return c;
}

CVector Approximation::embed(const CVector& c) const {
    if (c.size() != dim) throw PreconditionError("approximation: subspace length mismatch");
    if (!isometry) {
        CVector v(ambient_dim, cplx(0.0));
        std::copy(c.begin(), c.end(), v.begin());
        return v;
    }
    return isometry->apply(c);
}

Approximation truncation_approximation(const AngleSequence& ang, std::size_t n, std::size_t ambient_dim) {
    const AngleSequence pre = ang.prefix(n);
    if (ambient_dim < 2 * n) throw PreconditionError("ambient dimension smaller than truncation");
    Approximation a;
    a.ambient_dim = ambient_dim;
    a.dim = 2 * n;
    a.P = Operator{2 * n, projection_from(build_A(pre))};
    a.Q = Operator{2 * n, projection_from(build_B(pre))};
    return a;
}

Approximation SampledApproximation::as_approximation() const {
    Approximation a;
    a.ambient_dim = embedding.rows();
    a.dim = embedding.cols();
    a.isometry = embedding;
    a.P = as_operator(pair.P().matrix());
    a.Q = as_operator(pair.Q().matrix());
    return a;
}

namespace {

std::vector<CVector> span_basis(const std::vector<CVector>& vecs, std::vector<CVector> start = {}) {
    // Drop directions whose residual after orthogonalization is negligible.
    double scale_ = 0.0;
    for (const auto& v : vecs) scale_ = std::max(scale_, norm(v));
    std::vector<CVector> basis = std::move(start);
    const std::size_t keep = basis.size();
    for (CVector v : vecs) {
        const double before = norm(v);
        if (before <= 1e-12 * std::max(scale_, 1e-300)) continue;
        const double r = orthogonalize(basis, v);
        if (r > 1e-10 * before) basis.push_back(std::move(v));
    }
    return std::vector<CVector>(basis.begin() + static_cast<std::ptrdiff_t>(keep), basis.end());
}

CMatrix projector_onto(const std::vector<CVector>& basis, std::size_t n) {
    CMatrix m(n, n);
    for (const auto& b : basis)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) += b[i] * std::conj(b[j]);
    return m;
}

} // namespace

SampledApproximation approx_from_samples(const ProjectionPairDense& pair, const std::vector<CVector>& samples) {
    if (samples.empty()) throw PreconditionError("approx_from_samples needs at least one sample");
    const std::size_t n = pair.dim();
    std::vector<CVector> pv, qv;
    for (const auto& v : samples) {
        if (v.size() != n) throw PreconditionError("sample length mismatch");
        pv.push_back(pair.P().matrix().apply(v));
        qv.push_back(pair.Q().matrix().apply(v));
    }
    const std::vector<CVector> wp = span_basis(pv);
    const std::vector<CVector> wq = span_basis(qv);

    // V_L = W_P + W_Q + span{samples}, so that pi_L v_j = v_j.
    std::vector<CVector> all = wp;
    all.insert(all.end(), wq.begin(), wq.end());
    all.insert(all.end(), samples.begin(), samples.end());
    const std::vector<CVector> vl = span_basis(all);

    const std::size_t k = vl.size();
    CMatrix e(n, k);
    for (std::size_t j = 0; j < k; ++j) e.set_column(j, vl[j]);
    const CMatrix eh = e.adjoint();
    const CMatrix pl = eh * projector_onto(wp, n) * e;
    const CMatrix ql = eh * projector_onto(wq, n) * e;
    return {ProjectionPairDense(DenseHermitian(pl, 1e-10), DenseHermitian(ql, 1e-10)), e};
}

ApproxDefect approximation_defect(const OperatorPairOracle& truth, const Approximation& approx, const CVector& v) {
    if (truth.dim != approx.ambient_dim || v.size() != truth.dim)
        throw PreconditionError("approximation_defect: dimension mismatch");
    const CVector c = approx.restrict_to(v);
    const double d0 = norm(v - approx.embed(c));
    const double d1 = norm(truth.apply_P(v) - approx.embed(approx.P.apply(c)));
    const double d2 = norm(truth.apply_Q(v) - approx.embed(approx.Q.apply(c)));
    return {approx.dim, std::max({d0, d1, d2})};
}

namespace {

CVector apply_word(const std::string& word, const std::function<CVector(const CVector&)>& p,
                   const std::function<CVector(const CVector&)>& q, CVector v) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        switch (*it) {
        case 'P': v = p(v); break;
        case 'Q': v = q(v); break;
        case 'A': v = involution_of(p, v); break;
        case 'B': v = involution_of(q, v); break;
        case 'I': break;
        default: throw PreconditionError(std::string("polynomial word has unknown letter '") + *it + "'");
        }
    }
    return v;
}

} // namespace

double polynomial_defect(const Polynomial& f, const OperatorPairOracle& truth, const Approximation& approx,
                         const CVector& v) {
    if (truth.dim != approx.ambient_dim || v.size() != truth.dim)
        throw PreconditionError("polynomial_defect: dimension mismatch");
    const CVector c = approx.restrict_to(v);
    CVector lhs(v.size(), cplx(0.0));
    CVector rhs(approx.dim, cplx(0.0));
    for (const auto& [word, coeff] : f) {
        axpy(coeff, apply_word(word, truth.apply_P, truth.apply_Q, v), lhs);
        axpy(coeff, apply_word(word, approx.P.apply, approx.Q.apply, c), rhs);
    }
    return norm(lhs - approx.embed(rhs));
}

ProjectionPairDense pair_from_angles(const AngleSequence& ang) {
    return ProjectionPairDense(DenseHermitian(dense_projection(build_A(ang))),
                               DenseHermitian(dense_projection(build_B(ang))));
}

ProjectionPairDense direct_sum_pair(const std::vector<DirectSumPart>& parts) {
    if (parts.empty()) throw PreconditionError("direct_sum_pair needs at least one block");
    std::vector<CMatrix> ps, qs;
    for (const auto& part : parts) {
        const ProjectionPairDense pr = std::holds_alternative<ProjectionPairDense>(part)
            ? std::get<ProjectionPairDense>(part)
            : pair_from_angles(std::get<AngleSequence>(part));
        ps.push_back(pr.P().matrix());
        qs.push_back(pr.Q().matrix());
    }
    return ProjectionPairDense(DenseHermitian(direct_sum(ps)), DenseHermitian(direct_sum(qs)));
}

TensorProjections tensor_pair(const ProjectionPairDense& a, const ProjectionPairDense& b) {
    const std::size_t da = a.dim(), db = b.dim();
    const Operator ida{da, [](const CVector& v) { return v; }};
    const Operator idb{db, [](const CVector& v) { return v; }};
    auto left = [=](const Operator& op) {
        return Operator{da * db, [op, idb](const CVector& v) {
            const Operator f[2] = {op, idb};
            return kron_apply(f, v);
        }};
    };
    auto right = [=](const Operator& op) {
        return Operator{da * db, [op, ida](const CVector& v) {
            const Operator f[2] = {ida, op};
            return kron_apply(f, v);
        }};
    };
    return {left(as_operator(a.P().matrix())), left(as_operator(a.Q().matrix())),
            right(as_operator(b.P().matrix())), right(as_operator(b.Q().matrix()))};
}

} // namespace pairspec
