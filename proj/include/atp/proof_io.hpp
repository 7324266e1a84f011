#pragma once

#include "atp/derivation.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace atp {

class ProofFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON proof format. Rationals travel as "p/q" strings so nothing is rounded:
//   {"c": "8/5", "initial": "82/25", "annotation": "1100100",
//    "xs": ["32/25", "1", "32/25"], "outer": "exists",
//    "lines": [{"blocks": [{"q": "exists", "speed": "32/25", "input": "32/25"}],
//               "dts": "2", "dts_input": "1"}, ...]}
nlohmann::json to_json(const SimpleClass& cls);
SimpleClass class_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Proof& proof);
Proof proof_from_json(const nlohmann::json& j);

std::string write_proof_json(const Proof& proof);
Proof read_proof_json(std::string_view text);

/// "(∃ n^{1.28})^{1.28}(∀ n^0)^1 DTS[n^2]"; exponents rounded to 10 places.
std::string class_notation(const SimpleClass& cls);

/// Human-readable derivation: a header carrying the exact parameters, one row
/// per step (Rule 1 shown as the raw speedup followed by the combining step),
/// and the concluding inclusion of the first line in the last.
std::string pretty_print(const Proof& proof);

/// Reads pretty_print output back. The header determines the proof; the
/// derivation rows must match what those parameters produce.
Proof parse_pretty(std::string_view text);

}  // namespace atp
