#pragma once

#include "pairspec/jordan.hpp"
#include "pairspec/tridiag.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pairspec {

// b(lambda) = 2 sqrt(1 - (lambda^2/2 - 1)^2) = |lambda| sqrt(4 - lambda^2).
double b_func(double lambda);

enum class Selection { b_max, literal_distance };

// b_max: argmin |lambda^2 - 2|; literal_distance: argmin ||lambda| - sqrt 2|.
// Ties go to positive lambda, then to the smaller index.
double select_lambda(const std::vector<double>& spectrum, Selection criterion = Selection::b_max);

// max b over a finite-dimensional sum spectrum. Eigenvalues with
// lambda^2/4 >= 1 - tol_angle^2 belong to 1-D blocks and count as b = 0.
double max_b_over_spectrum(const std::vector<double>& spectrum, double tol_angle = 1e-7);

struct ConstantAngleModel {
    double theta;
    explicit ConstantAngleModel(double t);
};

// 2|sin 2 theta| when |theta - pi/2| > pi/4, else 2.
double constant_angle_exact_radius(double theta);

struct CharRoots {
    double theta = 0.0;
    std::size_t n = 0;
    std::vector<double> phi;                   // real roots in (0, pi), ascending; 0 and pi only when degenerate
    std::vector<std::size_t> interval_counts;  // roots in I_{2n,k}, k = 0..2n
    std::vector<double> psi;                   // roots of the imaginary-phase branch, psi > 0
    std::vector<std::string> warnings;

    // 2 sin(theta) cos(phi) for real roots and +-2 sin(theta) cosh(psi), ascending.
    std::vector<double> eigenvalues() const;
    std::size_t eigenvalue_count() const { return phi.size() + 2 * psi.size(); }
    bool counts_as_expected() const; // 1 per interior interval, 0 in the middle, <= 3 at the edges
};

// Roots of sin^2(t) sin((2n+1)phi) - (1+cos t)^2 sin((2n-1)phi), lambda = 2 sin(t) cos(phi).
// Real phases are scanned per interval; phi = i psi and pi + i psi are scanned as well,
// they carry the two eigenvalues outside [-2 sin t, 2 sin t] that appear for t < pi/2.
CharRoots constant_angle_char_roots(double theta, std::size_t n);

// Smallest n <= n_max at which counts_as_expected() holds, if any.
std::optional<std::size_t> root_count_onset(double theta, std::size_t n_max);

// |u_2n| / ||u|| for u_j = sin t sin(j phi) - (1 + cos t) sin((j-1) phi).
double constant_angle_tail(double theta, std::size_t n, double phi);

// max |f(phi) - f(pi - phi)|, |f(phi) - f(pi + phi)| with f(phi) = sin((2n-1)phi)/sin((2n+1)phi).
double f2n_symmetry_check(std::size_t n, double phi);

// Source of one-shifted truncations: a constant angle, or a finite angle list whose
// prefixes are the truncations.
class OneShiftedModel {
public:
    OneShiftedModel(ConstantAngleModel m) : theta_(m.theta) {} // NOLINT: implicit on purpose
    OneShiftedModel(AngleSequence ang) : angles_(std::move(ang)) {}

    AngleSequence truncation(std::size_t n) const;
    std::optional<std::size_t> max_n() const;
    std::optional<double> constant_theta() const { return theta_; }

private:
    std::optional<double> theta_;
    std::optional<AngleSequence> angles_;
};

struct CandidateSpectrumPoint {
    double lambda = 0.0;                   // tail-window member of eta_sequence with the smallest b
    std::vector<std::size_t> witness_n;    // schedule
    std::vector<double> eta_sequence;      // positive member of the pair at each n
    std::vector<double> partner_gap;       // |eta - (-eta')| at each n
    std::vector<double> defect_sequence;   // max defect of the two paired eigenvectors
};

struct BoundOptions {
    Selection criterion = Selection::b_max;
    double pairing_tol = 1e-10;
    std::size_t witness_factor = 4;
    double defect_accept = 1e-2;
    unsigned threads = 1;
};

// Tail window used for the lim inf proxy.
std::size_t tail_window(std::size_t schedule_length);

std::vector<CandidateSpectrumPoint> detect_candidates(const OneShiftedModel& model,
                                                      const std::vector<std::size_t>& schedule,
                                                      const BoundOptions& opts = {});

double lower_bound(const std::vector<CandidateSpectrumPoint>& candidates);

struct UpperTrace {
    std::vector<double> lambda_n;
    std::vector<double> b_lambda_n;
    double upper = 2.0;
};

UpperTrace upper_bound(const OneShiftedModel& model, const std::vector<std::size_t>& schedule,
                       const BoundOptions& opts = {});

struct BoundReport {
    std::optional<double> theta;
    std::vector<std::size_t> schedule;
    std::vector<double> lambda_n;
    std::vector<double> b_lambda_n;
    double upper = 2.0;
    std::vector<CandidateSpectrumPoint> candidates;
    double lower = 0.0;
    std::optional<double> exact;
    std::size_t window = 0;
    double defect_accept = 1e-2;
    Selection criterion = Selection::b_max;
    std::vector<std::string> warnings;
};

// Upper and lower bounds from one pass over the schedule.
BoundReport bound_report(const OneShiftedModel& model, const std::vector<std::size_t>& schedule,
                         const BoundOptions& opts = {});

// {2 mu : mu in the union of the given spectra} intersected with (0, 2), deduplicated.
std::vector<double> f_set_case1(const std::vector<std::vector<double>>& block_spectra);

// Spectra of (P+Q)|W_i - id over the blocks of a decomposition.
std::vector<std::vector<double>> case1_block_spectra(const JordanDecomposition& d);

// Bounds for a finite pair viewed as a direct sum of its Jordan blocks; the
// n-th approximation keeps the first min(n, #blocks) blocks. An empty schedule
// means {B, B+1, B+2} for B blocks.
BoundReport case1_report(const ProjectionPairDense& pair, std::vector<std::size_t> schedule = {},
                         const BoundOptions& opts = {}, double tol_angle = 1e-7);

} // namespace pairspec
