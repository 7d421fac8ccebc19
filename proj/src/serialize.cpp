#include "pairspec/serialize.hpp"

#include "pairspec/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace pairspec {

Json to_json(const TridiagSpectrum& s) {
    Json j;
    j["eigenvalues"] = s.eigenvalues;
    j["residual_max"] = s.residual_max();
    return j;
}

Json to_json(const JordanDecomposition& d) {
    Json blocks = Json::array();
    for (const auto& b : d.blocks) {
        Json e;
        if (b.kind == JordanBlock::Kind::two_dim) {
            e["kind"] = "2d";
            e["x"] = b.x;
        } else {
            e["kind"] = "1d";
            e["p"] = b.p_eig;
            e["q"] = b.q_eig;
        }
        blocks.push_back(e);
    }
    Json j;
    j["blocks"] = blocks;
    j["radius"] = d.radius();
    return j;
}

Json to_json(const AngleSequence& a) {
    Json j;
    j["theta"] = a.theta();
    j["omega"] = a.omega();
    return j;
}

Json to_json(const OneShiftExtraction& e) {
    Json j;
    j["theta"] = e.theta;
    j["omega"] = e.omega;
    j["residuals"] = e.residuals;
    j["terminated"] = e.terminated;
    j["breakdown_step"] = e.breakdown_step ? Json(*e.breakdown_step) : Json(nullptr);
    return j;
}

Json to_json(const BoundReport& r) {
    Json j;
    j["theta"] = r.theta ? Json(*r.theta) : Json(nullptr);
    j["schedule"] = r.schedule;
    j["lambda_n"] = r.lambda_n;
    j["b_lambda_n"] = r.b_lambda_n;
    j["upper"] = r.upper;
    Json cands = Json::array();
    for (const auto& c : r.candidates) {
        Json e;
        e["lambda"] = c.lambda;
        e["defects"] = c.defect_sequence;
        cands.push_back(e);
    }
    j["candidates"] = cands;
    j["lower"] = r.lower;
    if (r.exact) j["exact"] = *r.exact;
    j["window"] = r.window;
    j["defect_accept"] = r.defect_accept;
    j["criterion"] = r.criterion == Selection::b_max ? "b_max" : "literal_distance";
    j["warnings"] = r.warnings;
    return j;
}

Json to_json(const CHSHReport& r) {
    Json j;
    j["rho_direct"] = r.rho_direct ? Json(*r.rho_direct) : Json(nullptr);
    j["rho_ktl"] = r.rho_ktl ? Json(*r.rho_ktl) : Json(nullptr);
    j["lower"] = r.lower;
    j["upper"] = r.upper;
    j["tsirelson_ok"] = r.tsirelson_ok;
    j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

Json to_json(const TsirelsonSummary& s) {
    Json j;
    j["count"] = s.count;
    j["violations"] = s.violations;
    j["max_rho"] = s.max_rho;
    j["max_deviation"] = s.max_deviation;
    j["offending_seed"] = s.offending_seed ? Json(*s.offending_seed) : Json(nullptr);
    j["ok"] = s.ok();
    return j;
}

namespace {

std::vector<double> number_list(const Json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
    const Json& a = j.at(key);
    if (!a.is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
    std::vector<double> out;
    for (const auto& x : a) {
        if (!x.is_number()) throw ParseError(std::string("\"") + key + "\" must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

CMatrix matrix_from_json(const Json& m, const char* name) {
    if (!m.is_array() || m.empty()) throw ParseError(std::string(name) + " must be a non-empty list of rows");
    const std::size_t n = m.size();
    CMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Json& row = m[i];
        if (!row.is_array() || row.size() != n) throw ParseError(std::string(name) + " must be square");
        for (std::size_t k = 0; k < n; ++k) {
            const Json& e = row[k];
            if (e.is_number()) {
                out(i, k) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                out(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ParseError(std::string(name) + " entries must be numbers or [re, im]");
            }
        }
    }
    return out;
}

Json matrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) {
            const cplx z = m(i, k);
            if (z.imag() == 0.0) row.push_back(z.real());
            else row.push_back(Json::array({z.real(), z.imag()}));
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace

AngleSequence angles_from_json(const Json& j, bool degrees) {
    if (!j.is_object()) throw ParseError("angle file must hold a JSON object");
    std::vector<double> th = number_list(j, "theta");
    std::vector<double> om = number_list(j, "omega");
    if (degrees) {
        for (auto& x : th) x *= std::numbers::pi / 180.0;
        for (auto& x : om) x *= std::numbers::pi / 180.0;
    }
    if (th.empty() || om.size() + 1 != th.size())
        throw ParseError("angle file needs n >= 1 theta values and n-1 omega values");
    return AngleSequence(std::move(th), std::move(om));
}

ProjectionPairDense pair_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("P") || !j.contains("Q")) throw ParseError("pair file needs keys \"P\" and \"Q\"");
    CMatrix p = matrix_from_json(j.at("P"), "P");
    CMatrix q = matrix_from_json(j.at("Q"), "Q");
    return ProjectionPairDense(DenseHermitian(std::move(p), 1e-10), DenseHermitian(std::move(q), 1e-10));
}

Json to_json(const ProjectionPairDense& p) {
    Json j;
    j["P"] = matrix_to_json(p.P().matrix());
    j["Q"] = matrix_to_json(p.Q().matrix());
    return j;
}

Json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace {

std::size_t parse_count(const std::string& tok) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (tok.empty() || pos != tok.size() || tok[0] == '-' || v == 0) throw ParseError("bad schedule entry \"" + tok + "\"");
    return static_cast<std::size_t>(v);
}

} // namespace

std::vector<std::size_t> parse_schedule(const std::string& text) {
    std::vector<std::size_t> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::size_t a = parse_count(text.substr(0, dots));
        const std::size_t b = parse_count(text.substr(dots + 2));
        if (b < a) throw ParseError("schedule range \"" + text + "\" is decreasing");
        for (std::size_t n = a; n < b; n *= 2) out.push_back(n);
        out.push_back(b);
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const std::size_t n = parse_count(tok);
        if (!out.empty() && n <= out.back()) throw ParseError("schedule must be strictly increasing");
        out.push_back(n);
    }
    if (out.empty()) throw ParseError("empty schedule");
    return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    // Fixed C locale formatting so the decimal separator is always '.'.
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    buf << "theta,lower,upper,exact,abs_gap\n";
    for (const auto& r : rows)
        buf << r.theta << ',' << r.lower << ',' << r.upper << ',' << r.exact << ',' << r.abs_gap << '\n';
    os << buf.str();
}

} // namespace pairspec
