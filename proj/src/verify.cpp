#include "pairspec/verify.hpp"

#include "pairspec/chsh.hpp"
#include "pairspec/oneshift.hpp"
#include "pairspec/rng.hpp"
#include "pairspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace pairspec {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* label, double v) {
    std::ostringstream os;
    os.precision(3);
    os << label << '=' << std::scientific << v;
    return os.str();
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
    try {
        CheckResult r = body();
        r.name = name;
        return r;
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

AngleSequence random_angles(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> th(n), om(n - 1);
    for (auto& t : th) t = rng.uniform(0.1, kPi - 0.1);
    for (auto& w : om) w = rng.uniform(0.1, kPi - 0.1);
    return AngleSequence(std::move(th), std::move(om));
}

ProjectionPairDense random_pair(std::uint64_t seed, std::size_t dmax) {
    Rng rng(seed);
    const std::size_t d = rng.integer(1, dmax);
    return ProjectionPairDense(random_projection(d, rng.integer(0, d), derive_seed(seed, 1)),
                               random_projection(d, rng.integer(0, d), derive_seed(seed, 2)));
}

CheckResult check_b_func() {
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double l = -2.0 + 4.0 * i / 400.0;
        const double b = b_func(l);
        if (b < 0.0 || b > 2.0 + 1e-15) worst = std::max(worst, 1.0);
        worst = std::max(worst, std::abs(b - b_func(-l)));
        worst = std::max(worst, b - b_func(std::numbers::sqrt2));
    }
    double id = 0.0;
    for (int k = 1; k <= 99; ++k) {
        const double x = k / 100.0;
        id = std::max(id, std::abs(b_func(2.0 * std::sqrt(x)) - 4.0 * std::sqrt(x * (1.0 - x))));
    }
    return {"", worst <= 1e-15 && id <= 1e-13, fmt("shape", worst) + " " + fmt("identity", id)};
}

CheckResult check_closed_form(unsigned threads) {
    double worst = 0.0;
    bool counts = true;
    for (std::size_t n : {2, 10, 50}) {
        const TridiagSpectrum s = eigen_tridiag(build_sum(AngleSequence::constant(kPi / 2, n)), {false, threads});
        counts = counts && s.eigenvalues.size() == 2 * n;
        std::vector<double> ref;
        for (std::size_t k = 1; k <= 2 * n; ++k)
            ref.push_back(2.0 * std::cos((2.0 * k - 1.0) / (4.0 * n) * kPi));
        std::sort(ref.begin(), ref.end());
        for (std::size_t i = 0; i < ref.size() && i < s.eigenvalues.size(); ++i)
            worst = std::max(worst, std::abs(ref[i] - s.eigenvalues[i]));
    }
    return {"", counts && worst <= 1e-10, fmt("max_err", worst)};
}

CheckResult check_char_roots(unsigned threads) {
    double worst = 0.0;
    bool ok = true;
    for (double t : {kPi / 5, kPi / 3, 2 * kPi / 3})
        for (std::size_t n : {10, 50}) {
            const CharRoots c = constant_angle_char_roots(t, n);
            const std::vector<double> ev = c.eigenvalues();
            const TridiagSpectrum s = eigen_tridiag(build_sum(AngleSequence::constant(t, n)), {false, threads});
            ok = ok && c.counts_as_expected() && ev.size() == s.eigenvalues.size();
            for (std::size_t i = 0; i < std::min(ev.size(), s.eigenvalues.size()); ++i)
                worst = std::max(worst, std::abs(ev[i] - s.eigenvalues[i]));
            for (std::size_t i = 1; i < s.eigenvalues.size(); ++i)
                ok = ok && s.eigenvalues[i] > s.eigenvalues[i - 1];
        }
    return {"", ok && worst <= 1e-10, fmt("max_err", worst)};
}

CheckResult check_tridiag_residuals(std::uint64_t seed, unsigned threads) {
    double res = 0.0, orth = 0.0;
    for (int i = 0; i < 5; ++i) {
        const SymTridiagonal t = build_sum(random_angles(40, derive_seed(seed, 100 + i)));
        const TridiagSpectrum s = eigen_tridiag(t, {true, threads});
        res = std::max(res, s.residual_max() / (1.0 + t.inf_norm()));
        for (std::size_t a = 0; a < s.eigenvectors.size(); ++a)
            for (std::size_t b = a; b < s.eigenvectors.size(); ++b) {
                double d = 0.0;
                for (std::size_t k = 0; k < s.eigenvectors[a].size(); ++k) d += s.eigenvectors[a][k] * s.eigenvectors[b][k];
                orth = std::max(orth, std::abs(d - (a == b ? 1.0 : 0.0)));
            }
    }
    return {"", res <= 1e-12 && orth <= 1e-10, fmt("residual", res) + " " + fmt("orth", orth)};
}

CheckResult check_dense_identity(std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
        const ProjectionPairDense pr = random_pair(derive_seed(seed, 200 + i), 16);
        const DenseSpectrum s = jacobi_eigen(DenseHermitian(pr.A().matrix() + pr.B().matrix()));
        const double via_b = max_b_over_spectrum(s.eigenvalues);
        const double exact = commutator_radius_exact(pr);
        const NormEstimate nrm = spectral_norm(as_operator(commutator(pr.A(), pr.B()).matrix()));
        worst = std::max({worst, std::abs(via_b - exact), std::abs(exact - nrm.value), std::abs(via_b - nrm.value)});
    }
    return {"", worst <= 1e-8, fmt("max_disagreement", worst)};
}

CheckResult check_reconstruct(std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const ProjectionPairDense pr = random_pair(derive_seed(seed, 300 + i), 12);
        const ProjectionPairDense back = reconstruct(jordan_decompose(pr));
        worst = std::max({worst, (back.P().matrix() - pr.P().matrix()).max_abs(),
                          (back.Q().matrix() - pr.Q().matrix()).max_abs()});
    }
    return {"", worst <= 1e-10, fmt("max_err", worst)};
}

CheckResult check_ktl(std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const BipartitePair bp = random_bipartite(1, 16, derive_seed(seed, 400 + i));
        if (bp.side1.dim() * bp.side2.dim() > 256) continue;
        const double d = chsh_radius_direct(bp);
        const double k = chsh_radius_ktl(commutator_radius_exact(bp.side1), commutator_radius_exact(bp.side2));
        worst = std::max(worst, std::abs(d - k));
    }
    return {"", worst <= 1e-8, fmt("max_dev", worst)};
}

CheckResult check_tsirelson(std::uint64_t seed) {
    const TsirelsonSummary s = tsirelson_sweep(50, 1, 8, derive_seed(seed, 500));
    const double planted = chsh_radius_direct(planted_bipartite(4, 0.5, seed));
    const bool ok = s.ok() && std::abs(planted - 2.0 * std::numbers::sqrt2) <= 1e-8;
    return {"", ok, fmt("max_rho", s.max_rho) + " " + fmt("planted", planted)};
}

CheckResult check_extraction(std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const AngleSequence ang = random_angles(12, derive_seed(seed, 600 + i));
        const OperatorPairOracle o = oracle_from_angles(ang);
        CVector u0(o.dim, cplx(0.0));
        u0[0] = 1.0;
        const OneShiftExtraction e = extract_one_shifted(o, u0, {12, 1e-10});
        if (e.theta.size() != 12 || e.omega.size() != 11) return {"", false, "short extraction"};
        for (std::size_t k = 0; k < 12; ++k) worst = std::max(worst, std::abs(e.theta[k] - ang.theta()[k]));
        for (std::size_t k = 0; k < 11; ++k) worst = std::max(worst, std::abs(e.omega[k] - ang.omega()[k]));
    }
    const OperatorPairOracle sh = shift_pair_oracle(400);
    CVector u0(sh.dim, cplx(0.0));
    u0[0] = 1.0;
    const OneShiftExtraction e = extract_one_shifted(sh, u0, {41, 1e-10});
    double shift = 0.0;
    for (double a : e.theta) shift = std::max(shift, std::abs(a - kPi / 2));
    for (double a : e.omega) shift = std::max(shift, std::abs(a - kPi / 2));
    return {"", worst <= 1e-9 && shift <= 1e-9, fmt("round_trip", worst) + " " + fmt("shift", shift)};
}

CheckResult check_case1() {
    std::vector<DirectSumPart> parts;
    for (double x : {0.09, 0.3, 0.5}) parts.push_back(canonical_pair(x));
    const BoundReport r = case1_report(direct_sum_pair(parts));
    const double gap = std::max({std::abs(r.lower - *r.exact), std::abs(r.upper - *r.exact)});
    return {"", gap <= 1e-9, fmt("gap", gap)};
}

CheckResult check_sandwich(unsigned threads) {
    BoundOptions o;
    o.threads = threads;
    double worst = INFINITY;
    for (double t : {kPi / 5, kPi / 2}) {
        const BoundReport r = bound_report(OneShiftedModel(ConstantAngleModel(t)), {20, 40, 80}, o);
        worst = std::min(worst, r.upper - r.lower);
    }
    const BoundReport a = bound_report(OneShiftedModel(ConstantAngleModel(kPi / 5)), {20, 40, 80}, o);
    const CHSHReport c = chsh_bounds(a, a);
    worst = std::min(worst, c.upper - c.lower);
    return {"", worst >= -1e-9, fmt("min_slack", worst)};
}

CheckResult check_shift_oracle(std::uint64_t seed) {
    const double d = oracle_projection_defect(shift_pair_oracle(64), 8, seed);
    return {"", d <= 1e-12, fmt("defect", d)};
}

} // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, unsigned threads) {
    std::vector<CheckResult> out;
    out.push_back(guarded("b function shape and 2-D identity", check_b_func));
    out.push_back(guarded("pi/2 closed-form spectrum", [&] { return check_closed_form(threads); }));
    out.push_back(guarded("characteristic roots match tridiagonal spectrum", [&] { return check_char_roots(threads); }));
    out.push_back(guarded("tridiagonal residuals and orthogonality", [&] { return check_tridiag_residuals(seed, threads); }));
    out.push_back(guarded("dense commutator radius three ways", [&] { return check_dense_identity(seed); }));
    out.push_back(guarded("Jordan reconstruction", [&] { return check_reconstruct(seed); }));
    out.push_back(guarded("KTL identity", [&] { return check_ktl(seed); }));
    out.push_back(guarded("Tsirelson bound", [&] { return check_tsirelson(seed); }));
    out.push_back(guarded("one-shifted extraction", [&] { return check_extraction(seed); }));
    out.push_back(guarded("case-1 equality", check_case1));
    out.push_back(guarded("bound sandwich", [&] { return check_sandwich(threads); }));
    out.push_back(guarded("shift oracle is a projection pair", [&] { return check_shift_oracle(seed); }));
    return out;
}

} // namespace pairspec
