#include "pairspec/chsh.hpp"
#include "pairspec/errors.hpp"
#include "pairspec/oneshift.hpp"
#include "pairspec/serialize.hpp"
#include "pairspec/spectral.hpp"
#include "pairspec/verify.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

using namespace pairspec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Globals {
    unsigned threads = 1;
    bool degrees = false;
    std::string output;
};

double to_radians(double a, const Globals& g) { return g.degrees ? a * kPi / 180.0 : a; }

// Nothing is written until the result exists, so failed runs leave no file.
void emit(const Globals& g, const std::string& text) {
    if (g.output.empty() || g.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(g.output, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write " + g.output);
    out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

AngleSequence load_angles(const std::string& path, const Globals& g) {
    return angles_from_json(parse_json_file(path), g.degrees);
}

ProjectionPairDense load_pair(const std::string& path) { return pair_from_json(parse_json_file(path)); }

// ---- spectrum

struct SpectrumArgs {
    double theta = 0.0;
    std::size_t n = 0;
    std::string angles;
    std::string format = "json";
};

void cmd_spectrum(const SpectrumArgs& a, const Globals& g) {
    AngleSequence ang = !a.angles.empty() ? load_angles(a.angles, g) : [&] {
        if (a.n < 1) throw ParseError("spectrum needs --angles or --theta with --n >= 1");
        return AngleSequence::constant(to_radians(a.theta, g), a.n);
    }();
    const TridiagSpectrum s = eigen_tridiag(build_sum(ang), {true, g.threads});
    if (a.format == "csv") {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os.precision(17);
        os << "index,eigenvalue\n";
        for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) os << i << ',' << s.eigenvalues[i] << '\n';
        emit(g, os.str());
    } else {
        emit(g, dump(to_json(s)));
    }
}

// ---- radius

struct BoundArgs {
    std::string schedule;
    std::string criterion = "b_max";
    double defect_accept = 1e-2;
    double pairing_tol = 1e-10;
    std::size_t witness_factor = 4;
};

BoundOptions bound_options(const BoundArgs& b, const Globals& g) {
    BoundOptions o;
    if (b.criterion == "b_max") o.criterion = Selection::b_max;
    else if (b.criterion == "literal_distance") o.criterion = Selection::literal_distance;
    else throw ParseError("unknown criterion " + b.criterion);
    o.defect_accept = b.defect_accept;
    o.pairing_tol = b.pairing_tol;
    o.witness_factor = b.witness_factor;
    o.threads = g.threads;
    return o;
}

struct RadiusArgs {
    std::optional<double> constant_theta;
    std::string angles;
    std::string pair;
    BoundArgs bounds;
};

void cmd_radius(const RadiusArgs& a, const Globals& g) {
    const BoundOptions o = bound_options(a.bounds, g);
    BoundReport r;
    if (!a.pair.empty()) {
        const std::vector<std::size_t> sched = a.bounds.schedule.empty() ? std::vector<std::size_t>{}
                                                                         : parse_schedule(a.bounds.schedule);
        r = case1_report(load_pair(a.pair), sched, o);
    } else if (!a.angles.empty()) {
        const AngleSequence ang = load_angles(a.angles, g);
        const std::string def = std::to_string(std::max<std::size_t>(1, ang.n() / 8)) + ".." + std::to_string(ang.n());
        r = bound_report(OneShiftedModel(ang), parse_schedule(a.bounds.schedule.empty() ? def : a.bounds.schedule), o);
    } else if (a.constant_theta) {
        const double t = to_radians(*a.constant_theta, g);
        r = bound_report(OneShiftedModel(ConstantAngleModel(t)),
                         parse_schedule(a.bounds.schedule.empty() ? "125..1000" : a.bounds.schedule), o);
    } else {
        throw ParseError("radius needs --constant-theta, --angles or --pair");
    }
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    emit(g, dump(to_json(r)));
}

// ---- extract

struct ExtractArgs {
    std::string example;
    std::size_t N = 400;
    std::string pair;
    std::string angles;
    std::size_t start = 0;
    std::size_t steps = 0;
    double tol_breakdown = 1e-10;
    std::string angles_out;
};

void cmd_extract(const ExtractArgs& a, const Globals& g) {
    OperatorPairOracle o;
    std::size_t default_steps = 1;
    if (!a.example.empty()) {
        if (a.example != "shift") throw ParseError("unknown example " + a.example);
        o = shift_pair_oracle(a.N);
        default_steps = a.N / 2;
    } else if (!a.pair.empty()) {
        o = oracle_from_pair(load_pair(a.pair));
        default_steps = std::max<std::size_t>(1, o.dim / 2);
    } else if (!a.angles.empty()) {
        const AngleSequence ang = load_angles(a.angles, g);
        o = oracle_from_angles(ang);
        default_steps = ang.n();
    } else {
        throw ParseError("extract needs --example, --pair or --angles");
    }
    if (a.start >= o.dim) throw PreconditionError("start index outside the space");
    CVector u0(o.dim, cplx(0.0));
    u0[a.start] = 1.0;
    const OneShiftExtraction e = extract_one_shifted(o, u0, {a.steps ? a.steps : default_steps, a.tol_breakdown});
    if (!a.angles_out.empty()) {
        if (e.theta.empty()) throw PreconditionError("extraction broke down before the first angle");
        std::ofstream out(a.angles_out, std::ios::binary | std::ios::trunc);
        if (!out) throw ParseError("cannot write " + a.angles_out);
        out << dump(to_json(e.angles()));
    }
    emit(g, dump(to_json(e)));
}

// ---- chsh

struct ChshArgs {
    std::string side1;
    std::string side2;
    std::string schedule;
    bool ktl_only = false;
    std::size_t cap = kDefaultTensorCap;
    std::size_t sweep = 0;
    std::optional<std::uint64_t> random;
    std::uint64_t seed = 1;
    std::size_t dim_min = 1;
    std::size_t dim_max = 8;
};

// "theta=<angle>", "x=<halmos parameter>" or "pair=<file>".
struct Side {
    std::optional<double> theta;
    std::optional<ProjectionPairDense> pair;
};

Side parse_side(const std::string& spec, const Globals& g) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ParseError("side spec must be theta=..., x=... or pair=...");
    const std::string key = spec.substr(0, eq), val = spec.substr(eq + 1);
    auto number = [&] {
        try {
            std::size_t pos = 0;
            const double v = std::stod(val, &pos);
            if (pos == val.size()) return v;
        } catch (const std::exception&) {
        }
        throw ParseError("bad number in side spec \"" + spec + "\"");
    };
    Side s;
    if (key == "theta") s.theta = to_radians(number(), g);
    else if (key == "x") s.pair = canonical_pair(number());
    else if (key == "pair") s.pair = load_pair(val);
    else throw ParseError("unknown side kind \"" + key + "\"");
    return s;
}

void cmd_chsh(const ChshArgs& a, const Globals& g) {
    if (a.sweep > 0) {
        const TsirelsonSummary s = tsirelson_sweep(a.sweep, a.dim_min, a.dim_max, a.seed, a.cap);
        emit(g, dump(to_json(s)));
        if (!s.ok()) throw NumericalError("Tsirelson sweep found violations");
        return;
    }
    if (a.random) {
        const BipartitePair bp = random_bipartite(a.dim_min, a.dim_max, *a.random);
        CHSHReport r = chsh_report_dense(bp, a.ktl_only, a.cap);
        r.seed = *a.random;
        emit(g, dump(to_json(r)));
        return;
    }
    if (a.side1.empty() || a.side2.empty()) throw ParseError("chsh needs --side1 and --side2, --random or --sweep");
    Side s1 = parse_side(a.side1, g), s2 = parse_side(a.side2, g);
    CHSHReport r;
    if (s1.pair && s2.pair) {
        r = chsh_report_dense({*s1.pair, *s2.pair}, a.ktl_only, a.cap);
    } else {
        const std::vector<std::size_t> sched = parse_schedule(a.schedule.empty() ? "125..1000" : a.schedule);
        BoundOptions o;
        o.threads = g.threads;
        auto side_report = [&](const Side& s) {
            return s.theta ? bound_report(OneShiftedModel(ConstantAngleModel(*s.theta)), sched, o)
                           : case1_report(*s.pair, sched, o);
        };
        r = chsh_bounds(side_report(s1), side_report(s2));
        if (!a.ktl_only) r.warnings.push_back("direct norm skipped: a constant-angle side has no finite tensor space");
    }
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    emit(g, dump(to_json(r)));
}

// ---- sweep

struct SweepArgs {
    std::size_t grid = 32;
    std::string schedule = "25..200";
};

void cmd_sweep(const SweepArgs& a, const Globals& g) {
    std::vector<double> thetas;
    for (std::size_t k = 1; k < a.grid; ++k) thetas.push_back(kPi * static_cast<double>(k) / static_cast<double>(a.grid));
    std::vector<std::size_t> sched;
    if (!thetas.empty()) sched = parse_schedule(a.schedule);
    std::vector<SweepRow> rows(thetas.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < thetas.size(); i = next++) {
            try {
                const BoundReport r = bound_report(OneShiftedModel(ConstantAngleModel(thetas[i])), sched);
                rows[i] = {thetas[i], r.lower, r.upper, *r.exact, std::abs(r.upper - r.lower)};
            } catch (...) {
                std::lock_guard<std::mutex> lk(fail_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < std::max(1u, g.threads); ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    std::ostringstream os;
    write_sweep_csv(os, rows);
    emit(g, os.str());
}

// ---- verify

void cmd_verify(std::uint64_t seed, const Globals& g) {
    const std::vector<CheckResult> res = run_invariant_suite(seed, g.threads);
    std::ostringstream os;
    bool ok = true;
    for (const auto& r : res) {
        os << (r.pass ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
        ok = ok && r.pass;
    }
    emit(g, os.str());
    if (!ok) throw NumericalError("invariant suite failed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral bounds for pairs of projections"};
    app.set_config("--config", "", "key = value file mirroring the command-line flags");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--threads", g.threads, "worker threads")->envname("PAIRSPEC_THREADS")->check(CLI::Range(1u, 256u));
    app.add_flag("--degrees", g.degrees, "angles are given in degrees");
    app.add_option("-o,--output", g.output, "output file (default stdout)");

    SpectrumArgs sa;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of A_n + B_n");
    spectrum->add_option("--theta", sa.theta, "constant angle");
    spectrum->add_option("--n", sa.n, "truncation size");
    spectrum->add_option("--angles", sa.angles, "angle file");
    spectrum->add_option("--format", sa.format)->check(CLI::IsMember({"json", "csv"}));

    RadiusArgs ra;
    auto* radius = app.add_subcommand("radius", "commutator radius bounds");
    radius->add_option("--constant-theta", ra.constant_theta);
    radius->add_option("--angles", ra.angles);
    radius->add_option("--pair", ra.pair, "dense pair file");
    auto add_bound_opts = [](CLI::App* sub, BoundArgs& b) {
        sub->add_option("--schedule", b.schedule, "a,b,c or a..b (doubling)");
        sub->add_option("--criterion", b.criterion)->check(CLI::IsMember({"b_max", "literal_distance"}));
        sub->add_option("--defect-accept", b.defect_accept)->check(CLI::PositiveNumber);
        sub->add_option("--pairing-tol", b.pairing_tol)->check(CLI::PositiveNumber);
        sub->add_option("--witness-factor", b.witness_factor)->check(CLI::Range(1, 64));
    };
    add_bound_opts(radius, ra.bounds);

    ExtractArgs ea;
    auto* extract = app.add_subcommand("extract", "recover one-shifted angles");
    extract->add_option("--example", ea.example)->check(CLI::IsMember({"shift"}));
    extract->add_option("--N", ea.N, "shift truncation size (even)");
    extract->add_option("--pair", ea.pair);
    extract->add_option("--angles", ea.angles);
    extract->add_option("--start", ea.start, "coordinate index of the start vector");
    extract->add_option("--steps", ea.steps, "number of P steps (default: all)");
    extract->add_option("--tol-breakdown", ea.tol_breakdown)->check(CLI::PositiveNumber);
    extract->add_option("--angles-out", ea.angles_out, "write the recovered angle file here");

    ChshArgs ca;
    auto* chsh = app.add_subcommand("chsh", "Bell-CHSH radius");
    chsh->add_option("--side1", ca.side1, "theta=<a>, x=<x> or pair=<file>");
    chsh->add_option("--side2", ca.side2);
    chsh->add_option("--schedule", ca.schedule);
    chsh->add_flag("--ktl-only", ca.ktl_only);
    chsh->add_option("--cap", ca.cap, "largest tensor dimension for the direct norm");
    chsh->add_option("--sweep", ca.sweep, "Tsirelson sweep over this many random instances");
    chsh->add_option("--random", ca.random, "single random instance from this seed");
    chsh->add_option("--seed", ca.seed, "sweep seed");
    chsh->add_option("--dim-min", ca.dim_min)->check(CLI::PositiveNumber);
    chsh->add_option("--dim-max", ca.dim_max)->check(CLI::PositiveNumber);

    SweepArgs wa;
    auto* sweep = app.add_subcommand("sweep", "bounds over the grid theta_k = k pi / grid");
    sweep->add_option("--grid", wa.grid);
    sweep->add_option("--schedule", wa.schedule);

    std::uint64_t verify_seed = 2024;
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_option("--seed", verify_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*spectrum) cmd_spectrum(sa, g);
        else if (*radius) cmd_radius(ra, g);
        else if (*extract) cmd_extract(ea, g);
        else if (*chsh) cmd_chsh(ca, g);
        else if (*sweep) cmd_sweep(wa, g);
        else if (*verify) cmd_verify(verify_seed, g);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ResourceCapError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    }
    return 0;
}
