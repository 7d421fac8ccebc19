#pragma once

#include "pairspec/densela.hpp"
#include "pairspec/jordan.hpp"
#include "pairspec/tridiag.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pairspec {

// A projection pair given only through its action on coordinate vectors.
struct OperatorPairOracle {
    std::size_t dim = 0;
    std::function<CVector(const CVector&)> apply_P;
    std::function<CVector(const CVector&)> apply_Q;
};

OperatorPairOracle oracle_from_pair(const ProjectionPairDense& pair);
// The truncated one-shifted pair P_n, Q_n of dimension 2n.
OperatorPairOracle oracle_from_angles(const AngleSequence& ang);

// Truncation of the l^2 shift pair: P averages (x1,x2), (x3,x4), ...;
// Q keeps x1, averages (x2,x3), ..., (x_{N-2},x_{N-1}) and annihilates x_N.
OperatorPairOracle shift_pair_oracle(std::size_t N);

// Largest idempotency / self-adjointness defect seen on random probe vectors.
double oracle_projection_defect(const OperatorPairOracle& o, int probes, std::uint64_t seed);

struct OneShiftExtraction {
    std::vector<CVector> basis;         // u1, v1, u2, v2, ...
    std::vector<double> theta;          // one per u -> v step
    std::vector<double> omega;          // one per v -> u step
    std::vector<double> residuals;      // per step: | ||r|| - sqrt(1 - cos^2) |
    bool terminated = false;            // a residual fell below tol_breakdown
    std::optional<std::size_t> breakdown_step; // 1-based step whose residual vanished

    // The angles as an AngleSequence (drops a trailing omega without its theta).
    AngleSequence angles() const;
};

struct ExtractOptions {
    std::size_t n_max = 1;
    double tol_breakdown = 1e-10;
};

OneShiftExtraction extract_one_shifted(const OperatorPairOracle& oracle, const CVector& u0,
                                       const ExtractOptions& opts);

// A finite-dimensional approximation: a subspace of the ambient space (dense
// isometry, or the leading coordinates when no isometry is given) carrying its
// own pair of projections.
struct Approximation {
    std::size_t ambient_dim = 0;
    std::size_t dim = 0;
    std::optional<CMatrix> isometry; // ambient_dim x dim
    Operator P;
    Operator Q;

    CVector restrict_to(const CVector& v) const; // coordinates of pi v
    CVector embed(const CVector& c) const;
};

// Leading 2n coordinates with P_n, Q_n from the angle prefix of length n.
Approximation truncation_approximation(const AngleSequence& ang, std::size_t n, std::size_t ambient_dim);

struct SampledApproximation {
    ProjectionPairDense pair; // on the subspace
    CMatrix embedding;        // ambient x dim, orthonormal columns
    Approximation as_approximation() const;
};

// The construction used to show finite-dimensional approximations exist:
// projections onto span{P v_j} and span{Q v_j}, on the span of those and the samples.
SampledApproximation approx_from_samples(const ProjectionPairDense& pair, const std::vector<CVector>& samples);

struct ApproxDefect {
    std::size_t n = 0;
    double defect = 0.0;
};

ApproxDefect approximation_defect(const OperatorPairOracle& truth, const Approximation& approx, const CVector& v);

// Non-commutative polynomial: word over {P, Q, A, B, I} -> coefficient. The
// rightmost letter acts first.
using Polynomial = std::map<std::string, cplx>;

double polynomial_defect(const Polynomial& f, const OperatorPairOracle& truth, const Approximation& approx,
                         const CVector& v);

using DirectSumPart = std::variant<ProjectionPairDense, AngleSequence>;
ProjectionPairDense direct_sum_pair(const std::vector<DirectSumPart>& parts);

// Dense pair built from build_A / build_B.
ProjectionPairDense pair_from_angles(const AngleSequence& ang);

struct TensorProjections {
    Operator p1; // P_A (x) I
    Operator q1; // Q_A (x) I
    Operator p2; // I (x) P_B
    Operator q2; // I (x) Q_B
};

TensorProjections tensor_pair(const ProjectionPairDense& a, const ProjectionPairDense& b);

} // namespace pairspec
