#include "pairspec/jordan.hpp"

#include "pairspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pairspec {

namespace {

void check_projection(const DenseHermitian& p, const char* name) {
    const CMatrix sq = p.matrix() * p.matrix();
    const double defect = (sq - p.matrix()).frobenius();
    if (defect > 1e-10 * static_cast<double>(p.dim())) {
        std::ostringstream os;
        os << name << " is not idempotent: ||" << name << "^2 - " << name << "||_F = " << defect;
        throw PreconditionError(os.str());
    }
}

CMatrix compress(const DenseHermitian& op, const std::vector<CVector>& basis) {
    const std::size_t k = basis.size();
    CMatrix r(k, k);
    std::vector<CVector> images;
    images.reserve(k);
    for (const auto& b : basis) images.push_back(op.matrix().apply(b));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) r(i, j) = inner(basis[i], images[j]);
    return r;
}

CMatrix hermitian_part(const CMatrix& m) {
    CMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return r;
}

// Unit phase that makes the leading significant entry of v real positive.
cplx leading_phase(const CVector& v) {
    double big = 0.0;
    for (const auto& z : v) big = std::max(big, std::abs(z));
    for (const auto& z : v)
        if (std::abs(z) > 1e-8 * big) return std::conj(z) / std::abs(z);
    return 1.0;
}

// Orthonormal basis of the range of a Hermitian projector-like matrix.
std::vector<CVector> range_basis(const CMatrix& m) {
    const DenseSpectrum s = jacobi_eigen(DenseHermitian(hermitian_part(m)));
    std::vector<CVector> out;
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
        if (s.eigenvalues[k] > 0.5) out.push_back(s.eigenvectors.column(k));
    return out;
}

JordanBlock one_dim_block(CVector b, int p, int q) {
    scale(b, leading_phase(b));
    JordanBlock blk;
    blk.kind = JordanBlock::Kind::one_dim;
    blk.basis = {std::move(b)};
    blk.p_eig = p;
    blk.q_eig = q;
    return blk;
}

} // namespace

ProjectionPairDense::ProjectionPairDense(DenseHermitian p, DenseHermitian q)
    : p_(std::move(p)), q_(std::move(q)) {
    if (p_.dim() != q_.dim()) throw PreconditionError("projection pair dimension mismatch");
    check_projection(p_, "P");
    check_projection(q_, "Q");
}

ProjectionPairDense canonical_pair(double x) {
    if (!(x > 0.0 && x < 1.0)) throw PreconditionError("Halmos parameter must lie in (0,1)");
    const double s = std::sqrt(x * (1.0 - x));
    CMatrix p(2, 2), q(2, 2);
    p(0, 0) = x;
    p(0, 1) = s;
    p(1, 0) = s;
    p(1, 1) = 1.0 - x;
    q(0, 0) = 1.0;
    return ProjectionPairDense(DenseHermitian(p), DenseHermitian(q));
}

double halmos_param(const JordanBlock& block) {
    if (block.kind != JordanBlock::Kind::two_dim) throw PreconditionError("halmos_param needs a 2-D block");
    const DenseSpectrum qs = jacobi_eigen(DenseHermitian(hermitian_part(block.q_restricted)));
    const CVector e1 = qs.eigenvectors.column(1); // eigenvalue 1 of the restricted Q
    return inner(e1, block.p_restricted.apply(e1)).real();
}

JordanBlock make_block(const ProjectionPairDense& pair2) {
    if (pair2.dim() != 2) throw PreconditionError("make_block needs a 2-dimensional pair");
    JordanBlock blk;
    blk.kind = JordanBlock::Kind::two_dim;
    blk.basis = {CVector{1.0, 0.0}, CVector{0.0, 1.0}};
    blk.p_restricted = pair2.P().matrix();
    blk.q_restricted = pair2.Q().matrix();
    blk.x = halmos_param(blk);
    if (!(blk.x > 0.0 && blk.x < 1.0)) throw PreconditionError("pair is not irreducible");
    blk.coupling = std::sqrt(blk.x * (1.0 - blk.x));
    return blk;
}

double JordanDecomposition::radius() const {
    double s = 0.0;
    for (const auto& b : blocks)
        if (b.kind == JordanBlock::Kind::two_dim) s = std::max(s, b.coupling);
    return 4.0 * s;
}

JordanDecomposition jordan_decompose(const ProjectionPairDense& pair, double tol_angle) {
    if (!(tol_angle > 0.0 && tol_angle < 0.1)) throw PreconditionError("tol_angle must lie in (0, 0.1)");
    const std::size_t n = pair.dim();
    const CMatrix& P = pair.P().matrix();
    const CMatrix& Q = pair.Q().matrix();
    const double t2 = tol_angle * tol_angle;

    std::vector<JordanBlock> two, one;
    std::vector<CVector> kvecs; // ker(P) halves of the 2-D blocks

    const std::vector<CVector> R = range_basis(P);
    if (!R.empty()) {
        const CMatrix C = hermitian_part(compress(pair.Q(), R));
        const DenseSpectrum cs = jacobi_eigen(DenseHermitian(C));
        for (std::size_t j = 0; j < R.size(); ++j) {
            const double x = cs.eigenvalues[j];
            CVector r(n, cplx(0.0));
            for (std::size_t i = 0; i < R.size(); ++i) axpy(cs.eigenvectors(i, j), R[i], r);
            if (x <= t2) {
                one.push_back(one_dim_block(std::move(r), 1, 0));
                continue;
            }
            if (x >= 1.0 - t2) {
                one.push_back(one_dim_block(std::move(r), 1, 1));
                continue;
            }
            // k = (I-P)Qr / ||(I-P)Qr|| completes the block inside ker(P).
            const CVector qr = Q.apply(r);
            CVector k = qr - P.apply(qr);
            const double s = norm(k);
            std::vector<CVector> against = R;
            against.insert(against.end(), kvecs.begin(), kvecs.end());
            if (orthogonalize(against, k) <= 0.0) throw NumericalError("degenerate 2-D block");
            kvecs.push_back(k);

            const double sx = std::sqrt(x), sy = std::sqrt(1.0 - x);
            CVector e1(n), e2(n);
            for (std::size_t i = 0; i < n; ++i) {
                e1[i] = sx * r[i] + sy * k[i];
                e2[i] = sy * r[i] - sx * k[i];
            }
            const cplx ph = leading_phase(e1);
            scale(e1, ph);
            scale(e2, ph);
            JordanBlock blk;
            blk.kind = JordanBlock::Kind::two_dim;
            blk.basis = {std::move(e1), std::move(e2)};
            blk.x = x;
            blk.coupling = s;
            two.push_back(std::move(blk));
        }
    }

    // What is left of ker(P) after removing the k vectors splits into 1-D blocks.
    CMatrix rest = CMatrix::identity(n) - P;
    for (const auto& k : kvecs)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) rest(i, j) -= k[i] * std::conj(k[j]);
    const std::vector<CVector> K = range_basis(rest);
    if (!K.empty()) {
        const CMatrix C = hermitian_part(compress(pair.Q(), K));
        const DenseSpectrum cs = jacobi_eigen(DenseHermitian(C));
        for (std::size_t j = 0; j < K.size(); ++j) {
            const double qv = cs.eigenvalues[j];
            if (std::min(std::abs(qv), std::abs(1.0 - qv)) > 1e-6) {
                std::ostringstream os;
                os << "clustering failure: ker(P) remainder of dim " << K.size()
                   << " has Q-eigenvalue " << qv << " away from {0,1}; "
                   << two.size() << " 2-D blocks, tol_angle " << tol_angle;
                throw NumericalError(os.str());
            }
            CVector b(n, cplx(0.0));
            for (std::size_t i = 0; i < K.size(); ++i) axpy(cs.eigenvectors(i, j), K[i], b);
            one.push_back(one_dim_block(std::move(b), 0, qv > 0.5 ? 1 : 0));
        }
    }

    std::stable_sort(two.begin(), two.end(), [](const JordanBlock& a, const JordanBlock& b) { return a.x < b.x; });
    std::stable_sort(one.begin(), one.end(), [](const JordanBlock& a, const JordanBlock& b) {
        if (a.p_eig != b.p_eig) return a.p_eig > b.p_eig;
        return a.q_eig > b.q_eig;
    });

    JordanDecomposition out;
    out.blocks = std::move(two);
    out.blocks.insert(out.blocks.end(), one.begin(), one.end());
    std::size_t total = 0;
    for (const auto& b : out.blocks) total += b.basis.size();
    if (total != n) {
        std::ostringstream os;
        os << "clustering failure: blocks cover " << total << " of " << n << " dimensions";
        throw NumericalError(os.str());
    }

    out.change_of_basis = CMatrix(n, n);
    std::size_t col = 0;
    for (auto& b : out.blocks) {
        b.p_restricted = compress(pair.P(), b.basis);
        b.q_restricted = compress(pair.Q(), b.basis);
        for (const auto& v : b.basis) out.change_of_basis.set_column(col++, v);
    }

    const CMatrix U = out.change_of_basis;
    const CMatrix Uh = U.adjoint();
    const CMatrix pp = Uh * P * U;
    const CMatrix qq = Uh * Q * U;
    std::vector<std::size_t> owner(n);
    col = 0;
    for (std::size_t bi = 0; bi < out.blocks.size(); ++bi)
        for (std::size_t k = 0; k < out.blocks[bi].basis.size(); ++k) owner[col++] = bi;
    double offp = 0.0, offq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (owner[i] != owner[j]) {
                offp += std::norm(pp(i, j));
                offq += std::norm(qq(i, j));
            }
    out.max_coupling = std::max(std::sqrt(offp), std::sqrt(offq));
    return out;
}

BlockSpectra block_spectra(double x) {
    if (!(x > 0.0 && x < 1.0)) throw PreconditionError("Halmos parameter must lie in (0,1)");
    return {2.0 * std::sqrt(x), 2.0 * std::sqrt(1.0 - x), 4.0 * std::sqrt(x * (1.0 - x))};
}

UV eigvec_uv(double x) {
    if (!(x > 0.0 && x < 1.0)) throw PreconditionError("Halmos parameter must lie in (0,1)");
    const double sx = std::sqrt(x), sy = std::sqrt(1.0 - x);
    const double a = -sy / (1.0 + sx);
    const double b = sy / (1.0 - sx);
    const double na = std::hypot(a, 1.0), nb = std::hypot(b, 1.0);
    return {{a / na, 1.0 / na}, {b / nb, 1.0 / nb}};
}

Witness witness_vector(double x, int grid) {
    if (grid < 64) throw PreconditionError("witness grid must be >= 64");
    const UV uv = eigvec_uv(x);
    const double s = std::sqrt(x * (1.0 - x));
    // [A,B] for A = [[2x-1, 2s], [2s, 1-2x]], B = diag(1,-1): [[0, -4s], [4s, 0]].
    auto value = [&](double t, double phi, std::array<cplx, 2>& w) {
        const cplx e = std::polar(1.0, phi);
        w = {std::cos(t) * uv.u[0] + e * std::sin(t) * uv.v[0], std::cos(t) * uv.u[1] + e * std::sin(t) * uv.v[1]};
        const cplx c0 = -4.0 * s * w[1];
        const cplx c1 = 4.0 * s * w[0];
        return std::abs(std::conj(w[0]) * c0 + std::conj(w[1]) * c1);
    };
    const double tmax = std::numbers::pi / 2.0;
    const double pmax = 2.0 * std::numbers::pi;
    double bt = 0.0, bp = 0.0, best = -1.0;
    std::array<cplx, 2> w{};
    for (int i = 0; i <= grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double t = tmax * i / grid, p = pmax * j / grid;
            const double v = value(t, p, w);
            if (v > best) {
                best = v;
                bt = t;
                bp = p;
            }
        }
    double st = tmax / grid, sp = pmax / grid;
    while (st > 1e-13 || sp > 1e-13) {
        bool moved = false;
        const double cand[4][2] = {{bt + st, bp}, {bt - st, bp}, {bt, bp + sp}, {bt, bp - sp}};
        for (const auto& c : cand) {
            const double v = value(c[0], c[1], w);
            if (v > best) {
                best = v;
                bt = c[0];
                bp = c[1];
                moved = true;
            }
        }
        if (!moved) {
            st *= 0.5;
            sp *= 0.5;
        }
    }
    Witness out;
    out.value = value(bt, bp, out.w);
    return out;
}

double commutator_radius_exact(const ProjectionPairDense& pair, double tol_angle) {
    return jordan_decompose(pair, tol_angle).radius();
}

ProjectionPairDense reconstruct(const JordanDecomposition& decomp) {
    std::vector<CMatrix> pb, qb;
    std::size_t total = 0;
    for (const auto& b : decomp.blocks) {
        if (b.kind == JordanBlock::Kind::two_dim) {
            if (b.basis.size() != 2) throw PreconditionError("2-D block with wrong basis size");
            const ProjectionPairDense c = canonical_pair(b.x);
            pb.push_back(c.P().matrix());
            qb.push_back(c.Q().matrix());
        } else {
            if (b.basis.size() != 1) throw PreconditionError("1-D block with wrong basis size");
            CMatrix p(1, 1), q(1, 1);
            p(0, 0) = b.p_eig;
            q(0, 0) = b.q_eig;
            pb.push_back(p);
            qb.push_back(q);
        }
        total += b.basis.size();
    }
    const CMatrix& U = decomp.change_of_basis;
    if (total != U.rows() || U.rows() != U.cols()) throw PreconditionError("inconsistent block dimensions");
    const CMatrix Uh = U.adjoint();
    return ProjectionPairDense(DenseHermitian(U * direct_sum(pb) * Uh, 1e-10),
                               DenseHermitian(U * direct_sum(qb) * Uh, 1e-10));
}

} // namespace pairspec
