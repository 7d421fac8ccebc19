#include "pairspec/spectral.hpp"

#include "pairspec/errors.hpp"
#include "pairspec/oneshift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace pairspec {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
} // namespace

double b_func(double lambda) {
    if (!(std::abs(lambda) <= 2.0 + 1e-9)) {
        std::ostringstream os;
        os << "b: |lambda| = " << std::abs(lambda) << " exceeds 2";
        throw PreconditionError(os.str());
    }
    const double l = std::clamp(std::abs(lambda), 0.0, 2.0);
    return l * std::sqrt((2.0 - l) * (2.0 + l));
}

double select_lambda(const std::vector<double>& spectrum, Selection criterion) {
    if (spectrum.empty()) throw PreconditionError("select_lambda: empty spectrum");
    std::size_t best = 0;
    double best_key = INFINITY;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double l = spectrum[i];
        if (!(std::abs(l) <= 2.0 + 1e-9)) throw PreconditionError("select_lambda: eigenvalue outside [-2, 2]");
        const double key = criterion == Selection::b_max ? std::abs(l * l - 2.0) : std::abs(std::abs(l) - kSqrt2);
        const bool better = key < best_key || (key == best_key && spectrum[best] < 0.0 && l > 0.0);
        if (better) {
            best = i;
            best_key = key;
        }
    }
    return spectrum[best];
}

double max_b_over_spectrum(const std::vector<double>& spectrum, double tol_angle) {
    double best = 0.0;
    for (double l : spectrum) {
        if (l * l / 4.0 >= 1.0 - tol_angle * tol_angle) continue;
        best = std::max(best, b_func(l));
    }
    return best;
}

ConstantAngleModel::ConstantAngleModel(double t) : theta(t) { check_angle(t, "constant"); }

double constant_angle_exact_radius(double theta) {
    check_angle(theta, "constant");
    if (std::abs(theta - kPi / 2.0) > kPi / 4.0) return 2.0 * std::abs(std::sin(2.0 * theta));
    return 2.0;
}

namespace {

double char_g(double s2, double c2, std::size_t n, double phi) {
    const double m = static_cast<double>(2 * n);
    return s2 * std::sin((m + 1.0) * phi) - c2 * std::sin((m - 1.0) * phi);
}

// The imaginary-phase branch divided by s^2 e^{(2n+1)psi}/2, written in
// eta = e^{2(psi_max - psi)} - 1 where psi_max = log(cot(t/2)). With u = e^{-2 psi}
// and kappa = cot^2(t/2) it is exactly -eta + u^{2n} (kappa - u). The outlier root
// sits at eta ~ u^{2n}, far below the resolution of psi itself.
double char_h_eta(double kappa, std::size_t n, double eta) {
    const double u = (1.0 + eta) / kappa;
    return -eta + std::pow(u, static_cast<double>(2 * n)) * (kappa - u);
}

template <class F>
double bisect(F&& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Roots of f strictly inside (a, b) from sign changes on a uniform subgrid.
template <class F>
std::vector<double> scan_roots(F&& f, double a, double b, int points) {
    std::vector<double> roots;
    const double h = (b - a) / points;
    double x0 = a + 0.5 * h * 1e-6; // nudge off an endpoint root at a
    double f0 = f(x0);
    for (int i = 1; i <= points; ++i) {
        const double x1 = i == points ? b - 0.5 * h * 1e-6 : a + h * i;
        const double f1 = f(x1);
        if (f1 == 0.0) {
            roots.push_back(x1);
        } else if (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
            roots.push_back(bisect(f, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

} // namespace

std::vector<double> CharRoots::eigenvalues() const {
    const double s = std::sin(theta);
    std::vector<double> out;
    for (double p : phi) out.push_back(2.0 * s * std::cos(p));
    for (double p : psi) {
        out.push_back(2.0 * s * std::cosh(p));
        out.push_back(-2.0 * s * std::cosh(p));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool CharRoots::counts_as_expected() const {
    const std::size_t k_mid = n;
    for (std::size_t k = 0; k < interval_counts.size(); ++k) {
        const std::size_t c = interval_counts[k];
        if (k == 0 || k + 1 == interval_counts.size()) {
            if (c > 3) return false;
        } else if (k == k_mid) {
            if (c != 0) return false;
        } else if (c != 1) {
            return false;
        }
    }
    return eigenvalue_count() == 2 * n;
}

CharRoots constant_angle_char_roots(double theta, std::size_t n) {
    check_angle(theta, "constant");
    if (n < 1) throw PreconditionError("constant_angle_char_roots needs n >= 1");
    const double s = std::sin(theta), c = std::cos(theta);
    const double s2 = s * s, c2 = (1.0 + c) * (1.0 + c);
    CharRoots out;
    out.theta = theta;
    out.n = n;
    const std::size_t intervals = 2 * n + 1;
    out.interval_counts.assign(intervals, 0);
    auto g = [&](double phi) { return char_g(s2, c2, n, phi); };
    for (std::size_t k = 0; k < intervals; ++k) {
        const double a = kPi * static_cast<double>(k) / static_cast<double>(intervals);
        const double b = kPi * static_cast<double>(k + 1) / static_cast<double>(intervals);
        const std::vector<double> r = scan_roots(g, a, b, 64);
        out.interval_counts[k] = r.size();
        out.phi.insert(out.phi.end(), r.begin(), r.end());
    }

    // Imaginary phases. |lambda| = 2 s cosh(psi) <= 2 keeps psi in (0, psi_max],
    // i.e. eta in [0, kappa - 1); eta = kappa - 1 is the spurious psi = 0 root.
    const double kappa = c2 / s2;
    if (kappa > 1.0) {
        auto h = [&](double eta) { return char_h_eta(kappa, n, eta); };
        const double psi_max = 0.5 * std::log(kappa);
        const int points = 4096;
        // h(0) = u0^{2n} (kappa - u0) > 0 analytically; it can underflow to 0.
        double e0 = 0.0, f0 = 1.0;
        for (int i = 1; i <= points; ++i) {
            const double psi = psi_max * (1.0 - static_cast<double>(i) / points);
            const double e1 = i == points ? std::expm1(2.0 * psi_max * (1.0 - 1e-9)) : std::expm1(2.0 * (psi_max - psi));
            const double f1 = h(e1);
            if (f1 == 0.0 || (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0))) {
                const double eta = f1 == 0.0 ? e1 : bisect(h, e0, e1, f0);
                out.psi.push_back(psi_max - 0.5 * std::log1p(eta));
            }
            e0 = e1;
            f0 = f1;
        }
        std::sort(out.psi.begin(), out.psi.end());
    }

    // phi -> 0 is a root of g(phi)/phi when s^2 (2n+1) = (1+c)^2 (2n-1); then
    // lambda = +-2 sin t are eigenvalues that neither scan can see.
    const double deg = s2 * (2.0 * n + 1.0) - c2 * (2.0 * n - 1.0);
    if (out.eigenvalue_count() + 2 == 2 * n && std::abs(deg) <= 1e-8 * (s2 + c2) * (2.0 * n + 1.0)) {
        out.phi.insert(out.phi.begin(), 0.0);
        out.phi.push_back(kPi);
        ++out.interval_counts.front();
        ++out.interval_counts.back();
        out.warnings.push_back("degenerate phase at phi = 0: lambda = +-2 sin(theta)");
    }

    if (out.eigenvalue_count() != 2 * n || !out.counts_as_expected()) {
        std::ostringstream os;
        os << "theta " << theta << ", n " << n << ": " << out.phi.size() << " real and " << out.psi.size()
           << " imaginary-phase roots; interval counts";
        for (auto k : out.interval_counts) os << ' ' << k;
        out.warnings.push_back(os.str());
    }
    return out;
}

std::optional<std::size_t> root_count_onset(double theta, std::size_t n_max) {
    for (std::size_t n = 1; n <= n_max; ++n)
        if (constant_angle_char_roots(theta, n).counts_as_expected()) return n;
    return std::nullopt;
}

double constant_angle_tail(double theta, std::size_t n, double phi) {
    check_angle(theta, "constant");
    if (std::abs(std::sin(phi)) < 1e-12) throw PreconditionError("constant_angle_tail: sin(phi) is ~0");
    const double s = std::sin(theta), c = std::cos(theta);
    double sum = 0.0, last = 0.0;
    for (std::size_t j = 1; j <= 2 * n; ++j) {
        const double u = s * std::sin(static_cast<double>(j) * phi) - (1.0 + c) * std::sin(static_cast<double>(j - 1) * phi);
        sum += u * u;
        last = u;
    }
    return std::abs(last) / std::sqrt(sum);
}

double f2n_symmetry_check(std::size_t n, double phi) {
    const double m = static_cast<double>(2 * n);
    auto f = [&](double p) {
        const double den = std::sin((m + 1.0) * p);
        if (std::abs(den) < 1e-8) throw PreconditionError("f2n_symmetry_check: phi is within 1e-8 of a pole");
        return std::sin((m - 1.0) * p) / den;
    };
    const double f0 = f(phi);
    return std::max(std::abs(f0 - f(kPi - phi)), std::abs(f0 - f(kPi + phi)));
}

AngleSequence OneShiftedModel::truncation(std::size_t n) const {
    if (theta_) return AngleSequence::constant(*theta_, n);
    return angles_->prefix(n);
}

std::optional<std::size_t> OneShiftedModel::max_n() const {
    if (theta_) return std::nullopt;
    return angles_->n();
}

std::size_t tail_window(std::size_t len) {
    const std::size_t w = std::max<std::size_t>(3, (len + 2) / 3);
    return std::min(w, len);
}

namespace {

void check_schedule(const std::vector<std::size_t>& schedule, const OneShiftedModel* model) {
    if (schedule.empty()) throw PreconditionError("empty n schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] == 0) throw PreconditionError("schedule entries must be >= 1");
        if (i > 0 && schedule[i] <= schedule[i - 1]) throw PreconditionError("schedule must be strictly increasing");
    }
    if (model && model->max_n() && schedule.back() > *model->max_n())
        throw PreconditionError("schedule exceeds the length of the angle sequence");
}

struct Level {
    std::size_t n = 0;
    AngleSequence ang;
    TridiagSpectrum spec;
    std::vector<std::size_t> paired_positive; // eigenvalue indices eta > 0 with a partner near -eta
    std::vector<std::size_t> partner;         // index of the partner
    std::map<std::size_t, double> defect_memo;
    std::optional<OperatorPairOracle> truth; // witness truncation, built on first use
    std::optional<Approximation> approx;
    std::size_t ambient = 0;
};

std::size_t nearest_index(const std::vector<double>& sorted, double x) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    if (it == sorted.end()) return sorted.size() - 1;
    const std::size_t i = static_cast<std::size_t>(it - sorted.begin());
    if (i > 0 && std::abs(sorted[i - 1] - x) <= std::abs(sorted[i] - x)) return i - 1;
    return i;
}

Level make_level(const OneShiftedModel& model, std::size_t n, bool vectors, const BoundOptions& opts) {
    Level lv{n, model.truncation(n), {}, {}, {}, {}, {}, {}, 0};
    lv.spec = eigen_tridiag(build_sum(lv.ang), {vectors, opts.threads});
    const auto& ev = lv.spec.eigenvalues;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (!(ev[i] > 0.0)) continue;
        const std::size_t j = nearest_index(ev, -ev[i]);
        if (std::abs(ev[i] + ev[j]) <= opts.pairing_tol) {
            lv.paired_positive.push_back(i);
            lv.partner.push_back(j);
        }
    }
    return lv;
}

CVector complexify(const std::vector<double>& v, std::size_t ambient) {
    CVector r(ambient, cplx(0.0));
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i];
    return r;
}

double pair_defect(const OneShiftedModel& model, Level& lv, std::size_t slot, const BoundOptions& opts) {
    auto it = lv.defect_memo.find(slot);
    if (it != lv.defect_memo.end()) return it->second;
    if (!lv.truth) {
        std::size_t big = opts.witness_factor * lv.n;
        if (model.max_n()) big = std::min(big, *model.max_n());
        big = std::max(big, lv.n);
        const AngleSequence wide = model.truncation(big);
        lv.truth = oracle_from_angles(wide);
        lv.approx = truncation_approximation(wide, lv.n, 2 * big);
        lv.ambient = 2 * big;
    }
    double d = 0.0;
    for (std::size_t idx : {lv.paired_positive[slot], lv.partner[slot]}) {
        const CVector v = complexify(lv.spec.eigenvectors[idx], lv.ambient);
        d = std::max(d, approximation_defect(*lv.truth, *lv.approx, v).defect);
    }
    lv.defect_memo[slot] = d;
    return d;
}

// Paired slot at this level whose eta is nearest to target.
std::optional<std::size_t> nearest_paired(const Level& lv, double target) {
    std::optional<std::size_t> best;
    double dist = INFINITY;
    for (std::size_t s = 0; s < lv.paired_positive.size(); ++s) {
        const double d = std::abs(lv.spec.eigenvalues[lv.paired_positive[s]] - target);
        if (d < dist) {
            dist = d;
            best = s;
        }
    }
    return best;
}

std::vector<CandidateSpectrumPoint> candidates_from_levels(const OneShiftedModel& model, std::vector<Level>& levels,
                                                           const BoundOptions& opts) {
    std::vector<CandidateSpectrumPoint> out;
    Level& last = levels.back();
    const std::size_t len = levels.size();
    const std::size_t w = tail_window(len);
    const std::size_t mono = std::min<std::size_t>(3, len);
    double prev_eta = -INFINITY;
    for (std::size_t slot = 0; slot < last.paired_positive.size(); ++slot) {
        const double eta_final = last.spec.eigenvalues[last.paired_positive[slot]];
        if (!(eta_final < 2.0)) continue;
        if (eta_final - prev_eta <= opts.pairing_tol) continue; // same cluster
        // The final defect decides most rejections; check it before tracing back.
        if (!(pair_defect(model, last, slot, opts) < opts.defect_accept)) continue;
        CandidateSpectrumPoint c;
        bool complete = true;
        for (auto& lv : levels) {
            const auto s = nearest_paired(lv, eta_final);
            if (!s) {
                complete = false;
                break;
            }
            const std::size_t i = lv.paired_positive[*s];
            c.witness_n.push_back(lv.n);
            c.eta_sequence.push_back(lv.spec.eigenvalues[i]);
            c.partner_gap.push_back(std::abs(lv.spec.eigenvalues[i] + lv.spec.eigenvalues[lv.partner[*s]]));
            c.defect_sequence.push_back(pair_defect(model, lv, *s, opts));
        }
        if (!complete) continue;
        bool decreasing = true;
        for (std::size_t k = len - mono + 1; k < len; ++k)
            if (!(c.defect_sequence[k] < c.defect_sequence[k - 1])) decreasing = false;
        if (!decreasing) continue;
        double bmin = INFINITY;
        for (std::size_t k = len - w; k < len; ++k) {
            const double bv = b_func(c.eta_sequence[k]);
            if (bv < bmin) {
                bmin = bv;
                c.lambda = c.eta_sequence[k];
            }
        }
        prev_eta = eta_final;
        out.push_back(std::move(c));
    }
    return out;
}

UpperTrace upper_from_levels(const std::vector<Level>& levels, const BoundOptions& opts) {
    UpperTrace t;
    for (const auto& lv : levels) {
        const double l = select_lambda(lv.spec.eigenvalues, opts.criterion);
        t.lambda_n.push_back(l);
        t.b_lambda_n.push_back(b_func(l));
    }
    const std::size_t w = tail_window(levels.size());
    t.upper = *std::min_element(t.b_lambda_n.end() - static_cast<std::ptrdiff_t>(w), t.b_lambda_n.end());
    return t;
}

} // namespace

std::vector<CandidateSpectrumPoint> detect_candidates(const OneShiftedModel& model,
                                                      const std::vector<std::size_t>& schedule,
                                                      const BoundOptions& opts) {
    check_schedule(schedule, &model);
    if (!(opts.pairing_tol > 0.0)) throw PreconditionError("pairing_tol must be positive");
    std::vector<Level> levels;
    for (std::size_t n : schedule) levels.push_back(make_level(model, n, true, opts));
    return candidates_from_levels(model, levels, opts);
}

double lower_bound(const std::vector<CandidateSpectrumPoint>& candidates) {
    double best = 0.0;
    for (const auto& c : candidates) best = std::max(best, b_func(c.lambda));
    return best;
}

UpperTrace upper_bound(const OneShiftedModel& model, const std::vector<std::size_t>& schedule,
                       const BoundOptions& opts) {
    check_schedule(schedule, &model);
    std::vector<Level> levels;
    for (std::size_t n : schedule) levels.push_back(make_level(model, n, false, opts));
    return upper_from_levels(levels, opts);
}

BoundReport bound_report(const OneShiftedModel& model, const std::vector<std::size_t>& schedule,
                         const BoundOptions& opts) {
    check_schedule(schedule, &model);
    if (!(opts.pairing_tol > 0.0)) throw PreconditionError("pairing_tol must be positive");
    std::vector<Level> levels;
    for (std::size_t n : schedule) levels.push_back(make_level(model, n, true, opts));

    BoundReport r;
    r.theta = model.constant_theta();
    r.schedule = schedule;
    const UpperTrace up = upper_from_levels(levels, opts);
    r.lambda_n = up.lambda_n;
    r.b_lambda_n = up.b_lambda_n;
    r.upper = up.upper;
    r.candidates = candidates_from_levels(model, levels, opts);
    r.lower = lower_bound(r.candidates);
    if (r.theta) r.exact = constant_angle_exact_radius(*r.theta);
    r.window = tail_window(schedule.size());
    r.defect_accept = opts.defect_accept;
    r.criterion = opts.criterion;
    for (const auto& lv : levels)
        if (!lv.spec.flagged.empty()) {
            std::ostringstream os;
            os << "n " << lv.n << ": " << lv.spec.flagged.size() << " eigenvectors flagged by inverse iteration";
            r.warnings.push_back(os.str());
        }
    if (r.lower > r.upper + 1e-9) {
        std::ostringstream os;
        os << "sandwich violated: lower " << r.lower << " > upper " << r.upper;
        r.warnings.push_back(os.str());
    }
    return r;
}

std::vector<double> f_set_case1(const std::vector<std::vector<double>>& block_spectra) {
    std::vector<double> vals;
    for (const auto& sp : block_spectra)
        for (double mu : sp) {
            const double l = 2.0 * mu;
            if (l > 0.0 && l < 2.0) vals.push_back(l);
        }
    std::sort(vals.begin(), vals.end());
    std::vector<double> out;
    for (double v : vals)
        if (out.empty() || v - out.back() > 1e-12) out.push_back(v);
    return out;
}

std::vector<std::vector<double>> case1_block_spectra(const JordanDecomposition& d) {
    std::vector<std::vector<double>> out;
    for (const auto& b : d.blocks) {
        if (b.kind == JordanBlock::Kind::two_dim) {
            const double r = std::sqrt(b.x);
            out.push_back({-r, r});
        } else {
            out.push_back({static_cast<double>(b.p_eig + b.q_eig - 1)});
        }
    }
    return out;
}

BoundReport case1_report(const ProjectionPairDense& pair, std::vector<std::size_t> schedule,
                         const BoundOptions& opts, double tol_angle) {
    const JordanDecomposition d = jordan_decompose(pair, tol_angle);
    const std::size_t nb = d.blocks.size();
    if (schedule.empty()) schedule = {nb, nb + 1, nb + 2};
    check_schedule(schedule, nullptr);

    BoundReport r;
    r.schedule = schedule;
    const CMatrix sum = (pair.A().matrix() + pair.B().matrix());
    for (std::size_t n : schedule) {
        const std::size_t keep = std::min(n, nb);
        std::vector<CVector> basis;
        for (std::size_t i = 0; i < keep; ++i)
            basis.insert(basis.end(), d.blocks[i].basis.begin(), d.blocks[i].basis.end());
        CMatrix c(basis.size(), basis.size());
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const CVector img = sum.apply(basis[j]);
            for (std::size_t i = 0; i < basis.size(); ++i) c(i, j) = inner(basis[i], img);
        }
        CMatrix h(c.rows(), c.cols());
        for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j) h(i, j) = 0.5 * (c(i, j) + std::conj(c(j, i)));
        const DenseSpectrum sp = jacobi_eigen(DenseHermitian(h));
        const double l = select_lambda(sp.eigenvalues, opts.criterion);
        r.lambda_n.push_back(l);
        r.b_lambda_n.push_back(b_func(l));
    }
    r.window = tail_window(schedule.size());
    r.upper = *std::min_element(r.b_lambda_n.end() - static_cast<std::ptrdiff_t>(r.window), r.b_lambda_n.end());
    // Blocks are exactly invariant, so every F point has a constant trace with zero defect.
    for (double l : f_set_case1(case1_block_spectra(d))) {
        CandidateSpectrumPoint c;
        c.lambda = l;
        c.witness_n = schedule;
        c.eta_sequence.assign(schedule.size(), l);
        c.partner_gap.assign(schedule.size(), 0.0);
        c.defect_sequence.assign(schedule.size(), 0.0);
        r.candidates.push_back(std::move(c));
    }
    r.lower = lower_bound(r.candidates);
    r.exact = d.radius();
    r.defect_accept = opts.defect_accept;
    r.criterion = opts.criterion;
    return r;
}

} // namespace pairspec
