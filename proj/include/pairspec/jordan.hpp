#pragma once

#include "pairspec/densela.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace pairspec {

// Two orthogonal projections on C^dim.
class ProjectionPairDense {
public:
    ProjectionPairDense(DenseHermitian p, DenseHermitian q);

    std::size_t dim() const { return p_.dim(); }
    const DenseHermitian& P() const { return p_; }
    const DenseHermitian& Q() const { return q_; }
    DenseHermitian A() const { return involution(p_); } // 2P - I
    DenseHermitian B() const { return involution(q_); } // 2Q - I

private:
    DenseHermitian p_;
    DenseHermitian q_;
};

// The irreducible 2-D pair with Halmos parameter x in the basis (Q-fixed, Q-killed):
// Q = diag(1, 0), P = [[x, s], [s, 1 - x]], s = sqrt(x(1-x)).
ProjectionPairDense canonical_pair(double x);

struct JordanBlock {
    enum class Kind { two_dim, one_dim };

    Kind kind = Kind::one_dim;
    std::vector<CVector> basis; // 1 or 2 orthonormal columns
    double x = 0.0;             // two_dim only
    double coupling = 0.0;      // two_dim only: ||(I-P)Q r|| = sqrt(x(1-x))
    int p_eig = 0;              // one_dim only
    int q_eig = 0;              // one_dim only
    CMatrix p_restricted;       // compression of P to the block basis
    CMatrix q_restricted;
};

// Treat an irreducible 2-D pair as a single block in its own coordinates.
JordanBlock make_block(const ProjectionPairDense& pair2);

struct JordanDecomposition {
    std::vector<JordanBlock> blocks;
    CMatrix change_of_basis; // columns are the block bases, in block order
    double max_coupling = 0.0; // Frobenius size of the off-block part of U^H P U and U^H Q U

    double radius() const;
};

JordanDecomposition jordan_decompose(const ProjectionPairDense& pair, double tol_angle = 1e-7);

double halmos_param(const JordanBlock& block);

struct BlockSpectra {
    double sum;  // eigenvalues of A+B are +-sum
    double diff; // eigenvalues of A-B are +-diff
    double comm; // eigenvalues of [A,B] are +-i comm
};

BlockSpectra block_spectra(double x);

struct UV {
    std::array<double, 2> u; // eigenvalue -2 sqrt(x)
    std::array<double, 2> v; // eigenvalue +2 sqrt(x)
};

UV eigvec_uv(double x);

struct Witness {
    std::array<cplx, 2> w;
    double value = 0.0;
};

// Maximize |([A,B]w, w)| over w = cos t u + e^{i phi} sin t v.
Witness witness_vector(double x, int grid);

double commutator_radius_exact(const ProjectionPairDense& pair, double tol_angle = 1e-7);

ProjectionPairDense reconstruct(const JordanDecomposition& decomp);

} // namespace pairspec
