#pragma once

#include "pairspec/chsh.hpp"
#include "pairspec/jordan.hpp"
#include "pairspec/oneshift.hpp"
#include "pairspec/spectral.hpp"
#include "pairspec/tridiag.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pairspec {

using Json = nlohmann::ordered_json;

Json to_json(const TridiagSpectrum& s);
Json to_json(const JordanDecomposition& d);
Json to_json(const AngleSequence& a);
Json to_json(const OneShiftExtraction& e);
Json to_json(const BoundReport& r);
Json to_json(const CHSHReport& r);
Json to_json(const TsirelsonSummary& s);

// {"theta": [...], "omega": [...]}; throws ParseError on malformed input and
// PreconditionError on angles outside (0, pi).
AngleSequence angles_from_json(const Json& j, bool degrees = false);

// {"P": M, "Q": M} with M a list of rows; entries are numbers or [re, im].
ProjectionPairDense pair_from_json(const Json& j);
Json to_json(const ProjectionPairDense& p);

Json parse_json_file(const std::string& path);

// "a,b,c" (strictly increasing) or "a..b": a, 2a, 4a, ... below b, then b.
std::vector<std::size_t> parse_schedule(const std::string& text);

struct SweepRow {
    double theta;
    double lower;
    double upper;
    double exact;
    double abs_gap;
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

} // namespace pairspec
