#pragma once

#include <string>

#include <json.hpp>

#include "qik/forms.hpp"
#include "qik/hypertoric.hpp"
#include "qik/nahm.hpp"
#include "qik/quiver.hpp"
#include "qik/solver.hpp"
#include "qik/strata.hpp"

namespace qik::io {

using nlohmann::json;

// Matrices are {"rows", "cols", "data": [[re, im], ...]} in row-major order.
// Every reader throws InputError on malformed input.
json toJson(const Mat& m);
Mat matFromJson(const json& j);

json toJson(const Quiver& q);
Quiver quiverFromJson(const json& j);

json toJson(const GroupElement& g);
GroupElement groupFromJson(const json& j);

// {"sim", "orbit", "S", "delta", "m", "ell"}
json toJson(const StratumLabel& l);
StratumLabel labelFromJson(const json& j);

json toJson(const ClassifyDiagnostics& d);

json toJson(const DiagonalQuiver& d);
DiagonalQuiver diagonalFromJson(const json& j);

json toJson(const FlowReport& r);
json toJson(const StandardizedQuiver& s);

json toJson(const NahmSolution& s);
NahmSolution nahmFromJson(const json& j);
NahmQuad quadFromJson(const json& j);
json toJson(const NahmQuad& q);
json toJson(const AsymptoticData& a);
json toJson(const BielawskiResult& b, bool withIntegrand = false);

// Fixed layout used by every writer: two-space indent, trailing newline.
std::string dump(const json& j);

}  // namespace qik::io
