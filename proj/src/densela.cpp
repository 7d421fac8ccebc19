#include "pairspec/densela.hpp"

#include "pairspec/errors.hpp"
#include "pairspec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pairspec {

cplx inner(const CVector& a, const CVector& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(const CVector& v) {
    // scaled sum of squares; vectors here are short enough that plain is fine
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

void axpy(cplx alpha, const CVector& x, CVector& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(CVector& v, cplx alpha) {
    for (auto& z : v) z *= alpha;
}

CVector operator+(const CVector& a, const CVector& b) {
    CVector r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

CVector operator-(const CVector& a, const CVector& b) {
    CVector r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0)) {}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(const std::vector<double>& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CVector CMatrix::column(std::size_t j) const {
    CVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void CMatrix::set_column(std::size_t j, const CVector& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

double CMatrix::frobenius() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

CVector CMatrix::apply(const CVector& v) const {
    if (v.size() != cols_) throw PreconditionError("matrix-vector length mismatch");
    CVector r(rows_, cplx(0.0));
    for (std::size_t i = 0; i < rows_; ++i) {
        cplx s = 0.0;
        const cplx* row = &data_[i * cols_];
        for (std::size_t j = 0; j < cols_; ++j) s += row[j] * v[j];
        r[i] = s;
    }
    return r;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw PreconditionError("matrix shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw PreconditionError("matrix shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw PreconditionError("matrix product shape mismatch");
    CMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CMatrix direct_sum(const std::vector<CMatrix>& blocks) {
    std::size_t n = 0;
    for (const auto& b : blocks) {
        if (b.rows() != b.cols()) throw PreconditionError("direct_sum: blocks must be square");
        n += b.rows();
    }
    CMatrix r(n, n);
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) r(off + i, off + j) = b(i, j);
        off += b.rows();
    }
    return r;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return r;
}

DenseHermitian::DenseHermitian(CMatrix m, double rel_tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw PreconditionError("Hermitian matrix must be square with dim >= 1");
    const std::size_t n = m_.rows();
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            if (!std::isfinite(m_(i, j).real()) || !std::isfinite(m_(i, j).imag()))
                throw PreconditionError("Hermitian matrix has non-finite entries");
            asym = std::max(asym, std::abs(m_(i, j) - std::conj(m_(j, i))));
        }
    const double scale_ = m_.max_abs();
    if (asym > rel_tol * scale_) {
        std::ostringstream os;
        os << "matrix is not Hermitian: max asymmetry " << asym << " (scale " << scale_ << ")";
        throw PreconditionError(os.str());
    }
    for (std::size_t i = 0; i < n; ++i) {
        m_(i, i) = m_(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx h = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
            m_(i, j) = h;
            m_(j, i) = std::conj(h);
        }
    }
}

namespace {

double off_norm(const CMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Rotate the leading significant entry of v to the positive real axis.
void fix_phase(CVector& v) {
    double big = 0.0;
    for (const auto& z : v) big = std::max(big, std::abs(z));
    if (big == 0.0) return;
    for (const auto& z : v) {
        if (std::abs(z) > 1e-8 * big) {
            const cplx ph = std::conj(z) / std::abs(z);
            scale(v, ph);
            return;
        }
    }
}

} // namespace

DenseSpectrum jacobi_eigen(const DenseHermitian& t) {
    const std::size_t n = t.dim();
    CMatrix a = t.matrix();
    CMatrix v = CMatrix::identity(n);
    const double off0 = off_norm(a);
    const double target = 1e-14 * off0;
    int sweep = 0;
    for (; sweep < 60 && off_norm(a) > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Entries far below both diagonal ulps are dropped outright.
                if (mag < 1e-18 * (std::abs(app) + std::abs(aqq)) ) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const cplx e = apq / mag;
                const double tau = (aqq - app) / (2.0 * mag);
                const double tt = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + tt * tt);
                const double s = tt * c;
                // G = W R with W = diag(.., conj(e) at q, ..) and R the real rotation.
                const cplx gpp = c;
                const cplx gpq = s;
                const cplx gqp = -s * std::conj(e);
                const cplx gqq = c * std::conj(e);
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    DenseSpectrum out;
    out.sweeps = sweep;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        CVector col = v.column(order[k]);
        fix_phase(col);
        out.eigenvectors.set_column(k, col);
    }
    return out;
}

Operator as_operator(const CMatrix& m) {
    if (m.rows() != m.cols()) throw PreconditionError("operator must be square");
    return Operator{m.rows(), [m](const CVector& x) { return m.apply(x); }};
}

NormEstimate spectral_norm(const Operator& t, const NormOptions& opts) {
    const std::size_t n = t.dim;
    if (n == 0) throw PreconditionError("spectral_norm: dim must be >= 1");
    Rng rng(opts.seed);
    CVector q(n);
    for (auto& z : q) z = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    scale(q, 1.0 / norm(q));

    const std::size_t m = std::max<std::size_t>(1, std::min(opts.krylov_dim, n));
    NormEstimate est;
    double prev_mu = -1.0;
    auto apply_sq = [&](const CVector& x) {
        est.applications += 2;
        return t.apply(t.apply(x));
    };

    while (true) {
        std::vector<CVector> basis;
        std::vector<double> alpha, beta;
        basis.push_back(q);
        bool invariant = false;
        for (std::size_t j = 0; j < m; ++j) {
            CVector w = apply_sq(basis[j]);
            if (w.size() != n) throw PreconditionError("spectral_norm: callback returned wrong length");
            alpha.push_back(inner(basis[j], w).real());
            // Two full passes of Gram-Schmidt against the whole Krylov basis.
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : basis) axpy(-inner(b, w), b, w);
            const double bj = norm(w);
            const double amax = std::abs(*std::max_element(alpha.begin(), alpha.end(),
                [](double x, double y) { return std::abs(x) < std::abs(y); }));
            if (bj <= 1e-14 * std::max(amax, 1e-300) || j + 1 == n) {
                beta.push_back(bj);
                invariant = true;
                break;
            }
            beta.push_back(bj);
            if (j + 1 == m) break;
            scale(w, 1.0 / bj);
            basis.push_back(std::move(w));
        }

        const std::size_t k = alpha.size();
        CMatrix tk(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            tk(i, i) = alpha[i];
            if (i + 1 < k) {
                tk(i, i + 1) = beta[i];
                tk(i + 1, i) = beta[i];
            }
        }
        const DenseSpectrum ritz = jacobi_eigen(DenseHermitian(tk));
        const double mu = std::max(0.0, ritz.eigenvalues.back());
        CVector y(n, cplx(0.0));
        for (std::size_t i = 0; i < k; ++i) axpy(ritz.eigenvectors(i, k - 1), basis[i], y);
        scale(y, 1.0 / norm(y));

        est.value = std::sqrt(mu);
        est.residual = invariant ? 0.0 : beta.back() * std::abs(ritz.eigenvectors(k - 1, k - 1));
        const bool small_residual = est.residual <= opts.tol * std::max(mu, 1e-300);
        const bool stationary = prev_mu >= 0.0 && std::abs(mu - prev_mu) <= 4e-16 * mu;
        if (invariant || small_residual || stationary || mu == 0.0) {
            est.converged = true;
            return est;
        }
        if (est.applications >= opts.max_applications) return est;
        prev_mu = mu;
        q = std::move(y);
    }
}

DenseHermitian commutator(const DenseHermitian& a, const DenseHermitian& b) {
    if (a.dim() != b.dim()) throw PreconditionError("commutator: dimension mismatch");
    const CMatrix ab = a.matrix() * b.matrix();
    const CMatrix ba = b.matrix() * a.matrix();
    const std::size_t n = a.dim();
    CMatrix m(n, n);
    const cplx i1(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = (i1 * (ab(i, i) - ba(i, i))).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = i1 * (ab(i, j) - ba(i, j));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return DenseHermitian(std::move(m));
}

DenseHermitian involution(const DenseHermitian& p) {
    CMatrix m = 2.0 * p.matrix();
    for (std::size_t i = 0; i < p.dim(); ++i) m(i, i) -= 1.0;
    return DenseHermitian(std::move(m));
}

CVector kron_apply(std::span<const Operator> factors, const CVector& v) {
    std::size_t total = 1;
    for (const auto& f : factors) total *= f.dim;
    if (factors.empty() || total != v.size())
        throw PreconditionError("kron_apply: factor dimensions do not match vector length");
    CVector work = v;
    std::size_t stride = total;
    for (const auto& f : factors) {
        const std::size_t d = f.dim;
        stride /= d;
        const std::size_t outer = total / (d * stride);
        CVector fiber(d);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t s = 0; s < stride; ++s) {
                const std::size_t base = o * d * stride + s;
                for (std::size_t i = 0; i < d; ++i) fiber[i] = work[base + i * stride];
                const CVector out = f.apply(fiber);
                for (std::size_t i = 0; i < d; ++i) work[base + i * stride] = out[i];
            }
    }
    return work;
}

double orthogonalize(const std::vector<CVector>& basis, CVector& v) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) axpy(-inner(b, v), b, v);
    const double r = norm(v);
    if (r > 0.0) scale(v, 1.0 / r);
    return r;
}

DenseHermitian random_projection(std::size_t dim, std::size_t rank, std::uint64_t seed) {
    if (dim == 0 || rank > dim) throw PreconditionError("random_projection: need 0 <= rank <= dim, dim >= 1");
    if (rank == 0) return DenseHermitian(CMatrix(dim, dim));
    if (rank == dim) return DenseHermitian(CMatrix::identity(dim));
    Rng rng(seed);
    std::vector<CVector> cols;
    while (cols.size() < rank) {
        CVector g(dim);
        for (auto& z : g) z = rng.complex_normal();
        if (orthogonalize(cols, g) > 1e-8) cols.push_back(std::move(g));
    }
    CMatrix p(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            cplx s = 0.0;
            for (const auto& c : cols) s += c[i] * std::conj(c[j]);
            p(i, j) = s;
            p(j, i) = std::conj(s);
        }
    for (std::size_t i = 0; i < dim; ++i) p(i, i) = p(i, i).real();
    return DenseHermitian(std::move(p));
}

} // namespace pairspec
