#pragma once

#include <string>
#include <variant>

#include "json.hpp"

#include "laxkit/elliptic_chain.hpp"
#include "laxkit/rational_lax.hpp"
#include "laxkit/sklyanin.hpp"

namespace laxkit {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// Schema tags: rational_additive, rational_multiplicative, sklyanin, multipole_sklyanin,
// sklyanin_chain. Complex numbers are [re, im]; matrices are row-major nested arrays.
using Model = std::variant<RationalAdditive, RationalMultiplicative, SklyaninCoords, MultiPoleSklyanin,
                           SklyaninChain>;

Json complex_to_json(cd z);
cd complex_from_json(const Json& j, const std::string& path);

Json model_to_json(const Model& m);
// Throws ParseError for malformed input and InvariantViolation (with field path) for
// well-formed input that violates a model invariant.
Model model_from_json(const Json& j);

Model load_model(const std::string& path);
void save_json(const std::string& path, const Json& j);

std::string model_type(const Model& m);

// "RE,IM" or "RE" as used by the command line.
cd parse_complex(const std::string& text);

} // namespace laxkit
