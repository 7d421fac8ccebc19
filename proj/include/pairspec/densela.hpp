#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pairspec {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

cplx inner(const CVector& a, const CVector& b); // sum conj(a_i) b_i
double norm(const CVector& v);
void axpy(cplx alpha, const CVector& x, CVector& y); // y += alpha x
void scale(CVector& v, cplx alpha);
CVector operator+(const CVector& a, const CVector& b);
CVector operator-(const CVector& a, const CVector& b);

// Dense complex matrix, row-major.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(const std::vector<double>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    CVector column(std::size_t j) const;
    void set_column(std::size_t j, const CVector& v);

    CMatrix adjoint() const;
    double frobenius() const;
    double max_abs() const;
    CVector apply(const CVector& v) const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);

// Block-diagonal assembly.
CMatrix direct_sum(const std::vector<CMatrix>& blocks);
// Explicit Kronecker product; used for small checks only.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Square Hermitian matrix. The constructor rejects inputs whose asymmetry exceeds
// rel_tol * max|entry| and then stores the exactly Hermitian part (M + M^H)/2.
class DenseHermitian {
public:
    explicit DenseHermitian(CMatrix m, double rel_tol = 1e-12);

    std::size_t dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    CMatrix m_;
};

struct DenseSpectrum {
    std::vector<double> eigenvalues; // ascending
    CMatrix eigenvectors;            // columns, unitary
    int sweeps = 0;
};

// Cyclic complex Jacobi. Stops when the off-diagonal Frobenius norm falls
// below 1e-14 of its initial value or after 60 sweeps.
DenseSpectrum jacobi_eigen(const DenseHermitian& t);

// Matrix-free linear operator.
struct Operator {
    std::size_t dim = 0;
    std::function<CVector(const CVector&)> apply;
};

Operator as_operator(const CMatrix& m);

struct NormOptions {
    std::size_t max_applications = 4000; // applications of T (two per step on T^2)
    double tol = 1e-12;                  // relative residual on T^2
    std::uint64_t seed = 1;
    std::size_t krylov_dim = 80;
};

struct NormEstimate {
    double value = 0.0;
    double residual = 0.0; // ||T^2 y - mu y|| for the final Ritz pair
    bool converged = false;
    std::size_t applications = 0;
};

// ||T|| for Hermitian T from the top eigenvalue of T^2, by restarted Lanczos
// with full reorthogonalization from a seeded start vector.
NormEstimate spectral_norm(const Operator& t, const NormOptions& opts = {});

// i(AB - BA), Hermitian by construction.
DenseHermitian commutator(const DenseHermitian& a, const DenseHermitian& b);

// 2P - I.
DenseHermitian involution(const DenseHermitian& p);

// (T_1 (x) T_2 (x) ... ) v with the first factor as the slowest index.
CVector kron_apply(std::span<const Operator> factors, const CVector& v);

// U diag(1..1, 0..0) U^H, U from Gram-Schmidt QR of a seeded complex Gaussian.
DenseHermitian random_projection(std::size_t dim, std::size_t rank, std::uint64_t seed);

// Orthonormalize v against the columns in basis (two Gram-Schmidt passes).
// Returns the norm of what is left before normalization.
double orthogonalize(const std::vector<CVector>& basis, CVector& v);

} // namespace pairspec
