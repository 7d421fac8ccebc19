#pragma once

// Reference computations for the tests. Eigen provides the dense eigensolver;
// everything else is explicit materialization.

#include "pairspec/densela.hpp"
#include "pairspec/tridiag.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

namespace oracle {

using pairspec::CMatrix;
using pairspec::cplx;

inline Eigen::MatrixXcd to_eigen(const CMatrix& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline CMatrix from_eigen(const Eigen::MatrixXcd& e) {
    CMatrix m(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

inline std::vector<double> hermitian_eigenvalues(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end());
    return out;
}

inline double hermitian_norm(const CMatrix& m) {
    const auto ev = hermitian_eigenvalues(m);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

inline std::vector<double> tridiag_eigenvalues(const pairspec::SymTridiagonal& t) {
    const std::size_t n = t.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = t.diag()[i];
    for (std::size_t i = 0; i + 1 < n; ++i) d(i, i + 1) = d(i + 1, i) = t.offdiag()[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d, Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(out.begin(), out.end());
    return out;
}

// Explicit Kronecker product, first factor slowest.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    return k;
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace oracle
