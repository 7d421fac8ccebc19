#pragma once

#include "pairspec/densela.hpp"
#include "pairspec/jordan.hpp"
#include "pairspec/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pairspec {

// side1 = (P_11, P_12) on V_1, side2 = (P_21, P_22) on V_2.
struct BipartitePair {
    ProjectionPairDense side1;
    ProjectionPairDense side2;
};

constexpr std::size_t kDefaultTensorCap = 4096;

// (A_1 + A_2) (x) B_1 + (A_1 - A_2) (x) B_2, applied without forming the product.
Operator bell_operator_apply(const BipartitePair& pairs);

double chsh_radius_direct(const BipartitePair& pairs, std::size_t cap = kDefaultTensorCap,
                          const NormOptions& opts = {});

// sqrt(4 + rho1 rho2). Inputs must lie in [0, 2] up to 1e-9.
double chsh_radius_ktl(double rho1, double rho2);

// Clamp a radius into [0, 2]; out-of-range noise above 1e-9 leaves a warning.
double clamp_radius(double rho, std::vector<std::string>& warnings);

struct CHSHReport {
    std::optional<double> rho_direct;
    std::optional<double> rho_ktl;
    double lower = 2.0;
    double upper = 2.0;
    bool tsirelson_ok = true;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> warnings;
};

// Bounds from two side reports on the intersection of their schedules.
CHSHReport chsh_bounds(const BoundReport& r1, const BoundReport& r2);

// Everything for a dense bipartite instance. With ktl_only the direct norm is
// skipped; otherwise a tensor dimension above cap throws ResourceCapError.
CHSHReport chsh_report_dense(const BipartitePair& pairs, bool ktl_only = false,
                             std::size_t cap = kDefaultTensorCap);

struct TsirelsonSummary {
    std::size_t count = 0;
    std::size_t violations = 0;
    double max_rho = 0.0;
    double max_deviation = 0.0; // |direct - ktl|
    std::optional<std::uint64_t> offending_seed;
    bool ok() const { return violations == 0; }
};

// Seeded random bipartite instance with side dims in [dim_min, dim_max] and
// projection ranks uniform in [0, dim].
BipartitePair random_bipartite(std::size_t dim_min, std::size_t dim_max, std::uint64_t seed);

// Both sides carry an x block (default 0.5) plus random padding up to dim.
BipartitePair planted_bipartite(std::size_t dim, double x, std::uint64_t seed);

TsirelsonSummary tsirelson_sweep(std::size_t count, std::size_t dim_min, std::size_t dim_max, std::uint64_t seed,
                                 std::size_t cap = kDefaultTensorCap);

} // namespace pairspec
