#include "pairspec/tridiag.hpp"

#include "pairspec/errors.hpp"
#include "pairspec/rng.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace pairspec {

namespace {
constexpr double kAngleMargin = 1e-12;
}

void check_angle(double a, const char* what) {
    if (!(a > kAngleMargin && a < std::numbers::pi - kAngleMargin)) {
        std::ostringstream os;
        os << what << " angle " << a << " is outside (0, pi)";
        throw PreconditionError(os.str());
    }
}

AngleSequence::AngleSequence(std::vector<double> theta, std::vector<double> omega)
    : theta_(std::move(theta)), omega_(std::move(omega)) {
    if (theta_.empty()) throw PreconditionError("angle sequence needs n >= 1");
    if (omega_.size() + 1 != theta_.size())
        throw PreconditionError("angle sequence needs n theta and n-1 omega values");
    for (double t : theta_) check_angle(t, "theta");
    for (double w : omega_) check_angle(w, "omega");
}

AngleSequence AngleSequence::constant(double theta, std::size_t n) {
    if (n == 0) throw PreconditionError("angle sequence needs n >= 1");
    return AngleSequence(std::vector<double>(n, theta), std::vector<double>(n - 1, theta));
}

AngleSequence AngleSequence::prefix(std::size_t k) const {
    if (k == 0 || k > n()) throw PreconditionError("angle prefix length out of range");
    return AngleSequence(std::vector<double>(theta_.begin(), theta_.begin() + k),
                         std::vector<double>(omega_.begin(), omega_.begin() + (k - 1)));
}

SymTridiagonal::SymTridiagonal(std::vector<double> diag, std::vector<double> offdiag)
    : diag_(std::move(diag)), off_(std::move(offdiag)) {
    if (diag_.empty() || off_.size() + 1 != diag_.size())
        throw PreconditionError("tridiagonal needs m >= 1 diagonal and m-1 off-diagonal entries");
    for (double d : diag_)
        if (!std::isfinite(d)) throw PreconditionError("tridiagonal has non-finite diagonal");
    for (double e : off_)
        if (!std::isfinite(e)) throw PreconditionError("tridiagonal has non-finite off-diagonal");
}

double SymTridiagonal::inf_norm() const {
    double best = 0.0;
    const std::size_t m = size();
    for (std::size_t i = 0; i < m; ++i) {
        double row = std::abs(diag_[i]);
        if (i > 0) row += std::abs(off_[i - 1]);
        if (i + 1 < m) row += std::abs(off_[i]);
        best = std::max(best, row);
    }
    return best;
}

CMatrix SymTridiagonal::to_dense() const {
    const std::size_t m = size();
    CMatrix r(m, m);
    for (std::size_t i = 0; i < m; ++i) r(i, i) = diag_[i];
    for (std::size_t i = 0; i + 1 < m; ++i) {
        r(i, i + 1) = off_[i];
        r(i + 1, i) = off_[i];
    }
    return r;
}

SymTridiagonal operator+(const SymTridiagonal& a, const SymTridiagonal& b) {
    if (a.size() != b.size()) throw PreconditionError("tridiagonal size mismatch");
    std::vector<double> d(a.size()), e(a.size() - 1);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.diag()[i] + b.diag()[i];
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.offdiag()[i] + b.offdiag()[i];
    return SymTridiagonal(std::move(d), std::move(e));
}

SymTridiagonal build_A(const AngleSequence& ang) {
    const std::size_t n = ang.n();
    std::vector<double> d(2 * n), e(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(ang.theta()[i]);
        d[2 * i] = c;
        d[2 * i + 1] = -c;
        e[2 * i] = std::sin(ang.theta()[i]);
    }
    return SymTridiagonal(std::move(d), std::move(e));
}

SymTridiagonal build_B(const AngleSequence& ang) {
    const std::size_t n = ang.n();
    std::vector<double> d(2 * n), e(2 * n - 1, 0.0);
    d[0] = 1.0;
    d[2 * n - 1] = -1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double c = std::cos(ang.omega()[i]);
        d[2 * i + 1] = c;
        d[2 * i + 2] = -c;
        e[2 * i + 1] = std::sin(ang.omega()[i]);
    }
    return SymTridiagonal(std::move(d), std::move(e));
}

SymTridiagonal build_sum(const AngleSequence& ang) { return build_A(ang) + build_B(ang); }

namespace {

double pivot_floor(const SymTridiagonal& t) {
    double emax = 1.0;
    for (double e : t.offdiag()) emax = std::max(emax, e * e);
    return DBL_MIN * emax;
}

std::size_t count_below(const std::vector<double>& d, const std::vector<double>& e2, double pivmin,
                        double x) {
    std::size_t count = 0;
    double q = d[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        q = (d[i] - x) - e2[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

struct Bracket {
    double lo, hi;
    std::size_t clo, chi;
};

// Tridiagonal LU with partial pivoting of T - sigma I, as in inverse iteration.
struct ShiftedLU {
    std::vector<double> u0, u1, u2, l;
    std::vector<char> swapped;
    bool singular = false;

    ShiftedLU(const SymTridiagonal& t, double sigma) {
        const auto& d = t.diag();
        const auto& e = t.offdiag();
        const std::size_t m = d.size();
        u0.assign(m, 0.0);
        u1.assign(m, 0.0);
        u2.assign(m, 0.0);
        l.assign(m, 0.0);
        swapped.assign(m, 0);
        double ca = d[0] - sigma;
        double cb = m > 1 ? e[0] : 0.0;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            const double sub = e[k];
            const double nb = k + 2 < m ? e[k + 1] : 0.0;
            const double na = d[k + 1] - sigma;
            if (std::abs(ca) >= std::abs(sub)) {
                if (ca == 0.0) {
                    singular = true;
                    return;
                }
                l[k] = sub / ca;
                u0[k] = ca;
                u1[k] = cb;
                u2[k] = 0.0;
                ca = na - l[k] * cb;
                cb = nb;
            } else {
                l[k] = ca / sub;
                swapped[k] = 1;
                u0[k] = sub;
                u1[k] = na;
                u2[k] = nb;
                ca = cb - l[k] * na;
                cb = -l[k] * nb;
            }
        }
        if (ca == 0.0) singular = true;
        u0[m - 1] = ca;
    }

    void solve(std::vector<double>& b) const {
        const std::size_t m = b.size();
        for (std::size_t k = 0; k + 1 < m; ++k) {
            if (swapped[k]) std::swap(b[k], b[k + 1]);
            b[k + 1] -= l[k] * b[k];
        }
        for (std::size_t k = m; k-- > 0;) {
            double s = b[k];
            if (k + 1 < m) s -= u1[k] * b[k + 1];
            if (k + 2 < m) s -= u2[k] * b[k + 2];
            b[k] = s / u0[k];
        }
    }
};

double vnorm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double residual_of(const SymTridiagonal& t, const std::vector<double>& v, double lambda) {
    std::vector<double> r = apply_tridiag(t, v);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lambda * v[i];
    return vnorm(r);
}

void orth_against(const std::vector<std::vector<double>>& vecs, std::size_t first, std::size_t last,
                  std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = first; j < last; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += vecs[j][i] * v[i];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * vecs[j][i];
        }
}

} // namespace

std::size_t sturm_count(const SymTridiagonal& t, double x) {
    std::vector<double> e2(t.offdiag().size());
    for (std::size_t i = 0; i < e2.size(); ++i) e2[i] = t.offdiag()[i] * t.offdiag()[i];
    return count_below(t.diag(), e2, pivot_floor(t), x);
}

double TridiagSpectrum::residual_max() const {
    double r = 0.0;
    for (double x : residuals) r = std::max(r, x);
    return r;
}

TridiagSpectrum eigen_tridiag(const SymTridiagonal& t, const TridiagOptions& opts) {
    const auto& d = t.diag();
    const auto& e = t.offdiag();
    const std::size_t m = t.size();
    std::vector<double> e2(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) e2[i] = e[i] * e[i];
    const double pivmin = pivot_floor(t);
    const double tnorm = t.inf_norm();

    // Gershgorin enclosure, padded so the counts at the ends are exactly 0 and m.
    double gl = d[0], gu = d[0];
    for (std::size_t i = 0; i < m; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(e[i - 1]);
        if (i + 1 < m) r += std::abs(e[i]);
        gl = std::min(gl, d[i] - r);
        gu = std::max(gu, d[i] + r);
    }
    const double pad = 4.0 * DBL_EPSILON * std::max(std::abs(gl), std::abs(gu)) + 2.0 * pivmin;
    gl -= pad;
    gu += pad;
    const double tol = 2.0 * DBL_EPSILON * std::max(std::abs(gl), std::abs(gu)) + pivmin;

    TridiagSpectrum out;
    out.eigenvalues.assign(m, 0.0);
    auto count = [&](double x) { return count_below(d, e2, pivmin, x); };

    // Split [gl, gu) until every piece holds one eigenvalue or is narrower than tol.
    auto refine = [&](Bracket b) {
        std::vector<Bracket> stack{b};
        while (!stack.empty()) {
            Bracket c = stack.back();
            stack.pop_back();
            if (c.chi == c.clo) continue;
            const double mid = 0.5 * (c.lo + c.hi);
            if (c.hi - c.lo <= tol || mid <= c.lo || mid >= c.hi) {
                for (std::size_t k = c.clo; k < c.chi; ++k) out.eigenvalues[k] = mid;
                continue;
            }
            const std::size_t cm = count(mid);
            stack.push_back({mid, c.hi, cm, c.chi});
            stack.push_back({c.lo, mid, c.clo, cm});
        }
    };

    // Breadth-first split to get independent pieces, then hand them to workers.
    // Every piece is a dyadic subinterval of [gl, gu), so the final brackets and
    // hence the results do not depend on how many pieces were made.
    std::vector<Bracket> pieces{{gl, gu, 0, m}};
    const std::size_t want = std::max<std::size_t>(1, opts.threads) * 8;
    for (int level = 0; level < 6 && pieces.size() < want; ++level) {
        std::vector<Bracket> next;
        for (const auto& c : pieces) {
            if (c.chi == c.clo) continue;
            const double mid = 0.5 * (c.lo + c.hi);
            const std::size_t cm = count(mid);
            next.push_back({c.lo, mid, c.clo, cm});
            next.push_back({mid, c.hi, cm, c.chi});
        }
        pieces = std::move(next);
    }
    const unsigned nthreads = std::max(1u, opts.threads);
    if (nthreads == 1) {
        for (const auto& p : pieces) refine(p);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nthreads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < pieces.size(); i += nthreads) refine(pieces[i]);
            });
        for (auto& th : pool) th.join();
    }

    if (!opts.want_vectors) return out;

    out.eigenvectors.assign(m, std::vector<double>(m, 0.0));
    out.residuals.assign(m, 0.0);
    const double cluster_gap = 1e-5 * tnorm; // orthogonality loss ~ eps ||T|| / gap
    const double res_target = 1e-11 * (1.0 + tnorm);
    std::size_t cluster_start = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double lambda = out.eigenvalues[k];
        if (k == 0 || lambda - out.eigenvalues[k - 1] >= cluster_gap) cluster_start = k;
        std::vector<double> best;
        double best_res = INFINITY;
        for (int attempt = 0; attempt <= 5; ++attempt) {
            const double sigma = lambda + (attempt == 0 ? 0.0
                : std::ldexp(DBL_EPSILON * (1.0 + tnorm), attempt) * (attempt % 2 ? 1.0 : -1.0));
            ShiftedLU lu(t, sigma);
            if (lu.singular) continue;
            Rng rng(derive_seed(0x7d1a9e5ULL, k * 8 + static_cast<std::size_t>(attempt)));
            std::vector<double> v(m);
            for (auto& x : v) x = rng.uniform(-1.0, 1.0);
            bool ok = true;
            for (int it = 0; it < 3; ++it) {
                lu.solve(v);
                orth_against(out.eigenvectors, cluster_start, k, v);
                const double nv = vnorm(v);
                if (!(nv > 0.0) || !std::isfinite(nv)) {
                    ok = false;
                    break;
                }
                for (auto& x : v) x /= nv;
            }
            if (!ok) continue;
            const double res = residual_of(t, v, lambda);
            if (res < best_res) {
                best_res = res;
                best = v;
            }
            if (res <= res_target) break;
        }
        if (best.empty()) {
            out.flagged.push_back(k);
            out.residuals[k] = INFINITY;
            continue;
        }
        if (best_res > res_target) out.flagged.push_back(k);
        std::size_t imax = 0;
        for (std::size_t i = 1; i < m; ++i)
            if (std::abs(best[i]) > std::abs(best[imax]) * (1.0 + 1e-12)) imax = i;
        if (best[imax] < 0.0)
            for (auto& x : best) x = -x;
        out.eigenvectors[k] = std::move(best);
        out.residuals[k] = best_res;
    }
    return out;
}

std::vector<double> apply_tridiag(const SymTridiagonal& t, const std::vector<double>& v) {
    const std::size_t m = t.size();
    if (v.size() != m) throw PreconditionError("apply_tridiag: length mismatch");
    const auto& d = t.diag();
    const auto& e = t.offdiag();
    std::vector<double> r(m);
    for (std::size_t i = 0; i < m; ++i) {
        double s = d[i] * v[i];
        if (i > 0) s += e[i - 1] * v[i - 1];
        if (i + 1 < m) s += e[i] * v[i + 1];
        r[i] = s;
    }
    return r;
}

} // namespace pairspec
