#pragma once

#include "pairspec/densela.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace pairspec {

// Angles of a one-shifted form truncated to dimension 2n: theta_1..theta_n and
// omega_1..omega_{n-1}, every angle strictly inside (0, pi).
// Angle i (1-based) is stored at index i-1.
class AngleSequence {
public:
    AngleSequence(std::vector<double> theta, std::vector<double> omega);
    static AngleSequence constant(double theta, std::size_t n);

    std::size_t n() const { return theta_.size(); }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& omega() const { return omega_; }

    // First k theta and k-1 omega.
    AngleSequence prefix(std::size_t k) const;

private:
    std::vector<double> theta_;
    std::vector<double> omega_;
};

// Angle must lie in (margin, pi - margin).
void check_angle(double a, const char* what);

class SymTridiagonal {
public:
    SymTridiagonal(std::vector<double> diag, std::vector<double> offdiag);

    std::size_t size() const { return diag_.size(); }
    const std::vector<double>& diag() const { return diag_; }
    const std::vector<double>& offdiag() const { return off_; }

    double inf_norm() const;
    CMatrix to_dense() const;

private:
    std::vector<double> diag_;
    std::vector<double> off_;
};

SymTridiagonal operator+(const SymTridiagonal& a, const SymTridiagonal& b);

// 2P_n - E, 2Q_n - E and their sum in the basis u_1, v_1, u_2, v_2, ...
SymTridiagonal build_A(const AngleSequence& ang);
SymTridiagonal build_B(const AngleSequence& ang);
SymTridiagonal build_sum(const AngleSequence& ang);

// Number of eigenvalues below x.
std::size_t sturm_count(const SymTridiagonal& t, double x);

struct TridiagSpectrum {
    std::vector<double> eigenvalues;               // ascending
    std::vector<std::vector<double>> eigenvectors; // empty unless requested
    std::vector<double> residuals;                 // ||T v - lambda v||, when vectors requested
    std::vector<std::size_t> flagged;              // vectors whose inverse iteration broke down

    double residual_max() const;
};

struct TridiagOptions {
    bool want_vectors = false;
    unsigned threads = 1;
};

TridiagSpectrum eigen_tridiag(const SymTridiagonal& t, const TridiagOptions& opts = {});

std::vector<double> apply_tridiag(const SymTridiagonal& t, const std::vector<double>& v);

} // namespace pairspec
