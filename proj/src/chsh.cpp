#include "pairspec/chsh.hpp"

#include "pairspec/errors.hpp"
#include "pairspec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pairspec {

namespace {

constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

CMatrix sym_of(const DenseHermitian& p) { return involution(p).matrix(); }

} // namespace

Operator bell_operator_apply(const BipartitePair& pairs) {
    const CMatrix a1 = sym_of(pairs.side1.P());
    const CMatrix a2 = sym_of(pairs.side1.Q());
    const CMatrix b1 = sym_of(pairs.side2.P());
    const CMatrix b2 = sym_of(pairs.side2.Q());
    const Operator s = as_operator(a1 + a2);
    const Operator d = as_operator(a1 - a2);
    const Operator ob1 = as_operator(b1);
    const Operator ob2 = as_operator(b2);
    const std::size_t dim = pairs.side1.dim() * pairs.side2.dim();
    return Operator{dim, [s, d, ob1, ob2](const CVector& v) {
        const Operator t1[2] = {s, ob1};
        const Operator t2[2] = {d, ob2};
        CVector r = kron_apply(t1, v);
        axpy(1.0, kron_apply(t2, v), r);
        return r;
    }};
}

double chsh_radius_direct(const BipartitePair& pairs, std::size_t cap, const NormOptions& opts) {
    const std::size_t dim = pairs.side1.dim() * pairs.side2.dim();
    if (dim > cap) {
        std::ostringstream os;
        os << "tensor dimension " << dim << " exceeds cap " << cap;
        throw ResourceCapError(os.str());
    }
    const NormEstimate e = spectral_norm(bell_operator_apply(pairs), opts);
    if (!e.converged) throw NumericalError("Bell operator norm did not converge");
    return e.value;
}

double chsh_radius_ktl(double rho1, double rho2) {
    for (double r : {rho1, rho2})
        if (!(r >= -1e-9 && r <= 2.0 + 1e-9)) {
            std::ostringstream os;
            os << "commutator radius " << r << " outside [0, 2]";
            throw PreconditionError(os.str());
        }
    const double a = std::clamp(rho1, 0.0, 2.0);
    const double b = std::clamp(rho2, 0.0, 2.0);
    return std::sqrt(4.0 + a * b);
}

double clamp_radius(double rho, std::vector<std::string>& warnings) {
    const double c = std::clamp(rho, 0.0, 2.0);
    if (std::abs(c - rho) > 1e-9) {
        std::ostringstream os;
        os << "radius " << rho << " clamped to " << c;
        warnings.push_back(os.str());
    }
    return c;
}

CHSHReport chsh_bounds(const BoundReport& r1, const BoundReport& r2) {
    CHSHReport out;
    std::vector<double> b1, b2;
    for (std::size_t i = 0; i < r1.schedule.size(); ++i) {
        const auto it = std::find(r2.schedule.begin(), r2.schedule.end(), r1.schedule[i]);
        if (it == r2.schedule.end()) continue;
        b1.push_back(r1.b_lambda_n[i]);
        b2.push_back(r2.b_lambda_n[static_cast<std::size_t>(it - r2.schedule.begin())]);
    }
    if (b1.empty()) throw PreconditionError("side reports share no schedule entries");
    if (b1.size() != r1.schedule.size() || b2.size() != r2.schedule.size())
        out.warnings.push_back("side schedules differ; using their intersection");

    const double l1 = clamp_radius(r1.lower, out.warnings);
    const double l2 = clamp_radius(r2.lower, out.warnings);
    out.lower = chsh_radius_ktl(l1, l2);
    const std::size_t w = tail_window(b1.size());
    double up = INFINITY;
    for (std::size_t k = b1.size() - w; k < b1.size(); ++k)
        up = std::min(up, std::sqrt(4.0 + clamp_radius(b1[k], out.warnings) * clamp_radius(b2[k], out.warnings)));
    out.upper = up;
    if (r1.exact && r2.exact)
        out.rho_ktl = chsh_radius_ktl(clamp_radius(*r1.exact, out.warnings), clamp_radius(*r2.exact, out.warnings));
    out.tsirelson_ok = out.lower <= kTsirelson + 1e-8 && (!out.rho_ktl || *out.rho_ktl <= kTsirelson + 1e-8);
    if (out.lower > out.upper + 1e-9) {
        std::ostringstream os;
        os << "sandwich violated: lower " << out.lower << " > upper " << out.upper;
        out.warnings.push_back(os.str());
    }
    return out;
}

CHSHReport chsh_report_dense(const BipartitePair& pairs, bool ktl_only, std::size_t cap) {
    const BoundReport s1 = case1_report(pairs.side1);
    const BoundReport s2 = case1_report(pairs.side2);
    // Case-1 side reports share the default schedule only if the block counts agree;
    // realign both to a common one that keeps every block.
    const std::size_t nb = std::max(s1.schedule.front(), s2.schedule.front());
    const std::vector<std::size_t> common{nb, nb + 1, nb + 2};
    CHSHReport out = chsh_bounds(case1_report(pairs.side1, common), case1_report(pairs.side2, common));
    if (!ktl_only) out.rho_direct = chsh_radius_direct(pairs, cap);
    out.tsirelson_ok = out.tsirelson_ok && (!out.rho_direct || *out.rho_direct <= kTsirelson + 1e-8);
    return out;
}

BipartitePair random_bipartite(std::size_t dim_min, std::size_t dim_max, std::uint64_t seed) {
    if (dim_min < 1 || dim_max < dim_min) throw PreconditionError("bad dimension range");
    Rng rng(seed);
    auto side = [&](std::uint64_t salt) {
        const std::size_t d = rng.integer(dim_min, dim_max);
        const std::size_t rp = rng.integer(0, d);
        const std::size_t rq = rng.integer(0, d);
        return ProjectionPairDense(random_projection(d, rp, derive_seed(seed, salt)),
                                   random_projection(d, rq, derive_seed(seed, salt + 1)));
    };
    ProjectionPairDense s1 = side(1);
    ProjectionPairDense s2 = side(3);
    return {std::move(s1), std::move(s2)};
}

BipartitePair planted_bipartite(std::size_t dim, double x, std::uint64_t seed) {
    if (dim < 2) throw PreconditionError("planted instance needs dim >= 2");
    auto side = [&](std::uint64_t salt) {
        std::vector<CMatrix> ps{canonical_pair(x).P().matrix()}, qs{canonical_pair(x).Q().matrix()};
        if (dim > 2) {
            Rng rng(derive_seed(seed, salt));
            const std::size_t d = dim - 2;
            ps.push_back(random_projection(d, rng.integer(0, d), derive_seed(seed, salt + 1)).matrix());
            qs.push_back(random_projection(d, rng.integer(0, d), derive_seed(seed, salt + 2)).matrix());
        }
        return ProjectionPairDense(DenseHermitian(direct_sum(ps)), DenseHermitian(direct_sum(qs)));
    };
    ProjectionPairDense s1 = side(10);
    ProjectionPairDense s2 = side(20);
    return {std::move(s1), std::move(s2)};
}

TsirelsonSummary tsirelson_sweep(std::size_t count, std::size_t dim_min, std::size_t dim_max, std::uint64_t seed,
                                 std::size_t cap) {
    if (count < 1) throw PreconditionError("tsirelson_sweep needs count >= 1");
    TsirelsonSummary s;
    s.count = count;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t inst = derive_seed(seed, i);
        const BipartitePair bp = random_bipartite(dim_min, dim_max, inst);
        const double direct = chsh_radius_direct(bp, cap);
        const double ktl = chsh_radius_ktl(commutator_radius_exact(bp.side1), commutator_radius_exact(bp.side2));
        const double dev = std::abs(direct - ktl);
        s.max_rho = std::max({s.max_rho, direct, ktl});
        s.max_deviation = std::max(s.max_deviation, dev);
        if (direct > kTsirelson + 1e-8 || ktl > kTsirelson + 1e-8 || dev > 1e-8) {
            ++s.violations;
            if (!s.offending_seed) s.offending_seed = inst;
        }
    }
    return s;
}

} // namespace pairspec
