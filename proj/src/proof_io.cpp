#include "atp/proof_io.hpp"

#include <algorithm>
#include <sstream>

namespace atp {

using nlohmann::json;

namespace {

const char* quantifier_key(Quantifier q) { return q == Quantifier::Exists ? "exists" : "forall"; }
const char* quantifier_symbol(Quantifier q) { return q == Quantifier::Exists ? "∃" : "∀"; }

Quantifier parse_quantifier(const std::string& text) {
  if (text == "exists" || text == "∃" || text == "E") return Quantifier::Exists;
  if (text == "forall" || text == "∀" || text == "A") return Quantifier::Forall;
  throw ProofFormatError("unknown quantifier '" + text + "'");
}

Rational rational_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ProofFormatError(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
  } catch (const std::invalid_argument& e) {
    throw ProofFormatError(std::string("field '") + key + "': " + e.what());
  }
  throw ProofFormatError(std::string("field '") + key + "' must be a rational string");
}

std::string exponent(const Rational& value) {
  std::string text = to_decimal(value, 10);
  return text.size() == 1 ? text : "{" + text + "}";
}

// Display width in code points, enough for the ASCII-plus-symbols we emit.
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char ch) {
    return (static_cast<unsigned char>(ch) & 0xC0) != 0x80;
  }));
}

std::string trim_right(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

json to_json(const SimpleClass& cls) {
  json blocks = json::array();
  for (const auto& b : cls.blocks()) {
    blocks.push_back({{"q", quantifier_key(b.kind)}, {"speed", to_string(b.speed)}, {"input", to_string(b.input)}});
  }
  return {{"blocks", blocks}, {"dts", to_string(cls.dts_speed())}, {"dts_input", to_string(cls.dts_input())}};
}

SimpleClass class_from_json(const json& j) {
  if (!j.is_object()) throw ProofFormatError("line must be an object");
  std::vector<QuantifierBlock> blocks;
  if (j.contains("blocks")) {
    if (!j.at("blocks").is_array()) throw ProofFormatError("'blocks' must be an array");
    for (const auto& b : j.at("blocks")) {
      if (!b.is_object() || !b.contains("q") || !b.at("q").is_string()) {
        throw ProofFormatError("block needs a string field 'q'");
      }
      blocks.push_back({parse_quantifier(b.at("q").get<std::string>()), rational_field(b, "speed"),
                        rational_field(b, "input")});
    }
  }
  try {
    return SimpleClass(std::move(blocks), rational_field(j, "dts"), rational_field(j, "dts_input"));
  } catch (const DerivationError& e) {
    throw ProofFormatError(std::string("malformed line: ") + e.what());
  }
}

json to_json(const Proof& proof) {
  json xs = json::array();
  for (const auto& x : proof.speedup_params) xs.push_back(to_string(x));
  json lines = json::array();
  for (const auto& line : proof.lines) lines.push_back(to_json(line));
  return {{"c", to_string(proof.c)},
          {"initial", to_string(proof.initial_speed)},
          {"annotation", proof.annotation.to_string()},
          {"xs", xs},
          {"outer", quantifier_key(proof.outer)},
          {"lines", lines}};
}

Proof proof_from_json(const json& j) {
  if (!j.is_object()) throw ProofFormatError("proof must be a JSON object");
  if (!j.contains("annotation") || !j.at("annotation").is_string()) {
    throw ProofFormatError("missing string field 'annotation'");
  }
  Annotation annotation = [&] {
    try {
      return Annotation::parse(j.at("annotation").get<std::string>());
    } catch (const InvalidAnnotation& e) {
      throw ProofFormatError(e.what());
    }
  }();
  Proof proof{rational_field(j, "c"), rational_field(j, "initial"), {}, annotation, Quantifier::Exists, {}};
  if (j.contains("outer")) {
    if (!j.at("outer").is_string()) throw ProofFormatError("'outer' must be a string");
    proof.outer = parse_quantifier(j.at("outer").get<std::string>());
  }
  if (!j.contains("xs") || !j.at("xs").is_array()) throw ProofFormatError("missing array field 'xs'");
  for (const auto& x : j.at("xs")) {
    if (!x.is_string()) throw ProofFormatError("'xs' entries must be rational strings");
    try {
      proof.speedup_params.push_back(parse_rational(x.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw ProofFormatError(std::string("'xs': ") + e.what());
    }
  }
  if (!j.contains("lines") || !j.at("lines").is_array()) throw ProofFormatError("missing array field 'lines'");
  for (const auto& line : j.at("lines")) proof.lines.push_back(class_from_json(line));
  return proof;
}

std::string write_proof_json(const Proof& proof) { return to_json(proof).dump(2) + "\n"; }

Proof read_proof_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProofFormatError(std::string("not valid JSON: ") + e.what());
  }
  return proof_from_json(j);
}

std::string class_notation(const SimpleClass& cls) {
  std::string out;
  for (const auto& b : cls.blocks()) {
    out += "(";
    out += quantifier_symbol(b.kind);
    out += " n^" + exponent(b.speed) + ")^" + exponent(b.input);
  }
  if (!out.empty()) out += " ";
  out += "DTS[n^" + exponent(cls.dts_speed()) + "]";
  return out;
}

std::string pretty_print(const Proof& proof) {
  struct Row {
    std::string relation;
    std::string text;
    std::string reason;
  };
  std::vector<Row> rows;
  if (!proof.lines.empty()) rows.push_back({" ", class_notation(proof.lines.front()), ""});

  const auto rules = rule_sequence(proof.annotation);
  std::size_t next_x = 0;
  for (std::size_t i = 0; i < rules.size() && i + 1 < proof.lines.size(); ++i) {
    const SimpleClass& before = proof.lines[i];
    const SimpleClass& after = proof.lines[i + 1];
    if (rules[i] == Rule::Slowdown) {
      rows.push_back({"⊆", class_notation(after), "Slowdown"});
      continue;
    }
    const Rational& x = proof.speedup_params.at(next_x++);
    const std::string reason = "Speedup, x = " + to_decimal(x, 10);
    if (rules[i] == Rule::Speedup1 && !before.is_dts() && x > 0 && x < before.dts_speed()) {
      Quantifier kind = before.blocks().back().kind;
      rows.push_back({"⊆", class_notation(apply_speedup_lemma(before, x, kind)), reason});
      rows.push_back({"=", class_notation(after), std::string("Combining ") + quantifier_symbol(kind) + " quantifiers"});
    } else {
      rows.push_back({"⊆", class_notation(after), reason});
    }
  }

  std::size_t width = 0;
  for (const auto& row : rows) width = std::max(width, display_width(row.text));

  std::ostringstream out;
  out << "# alternation-trading proof\n";
  out << "# c = " << to_string(proof.c) << "\n";
  out << "# annotation = " << proof.annotation.to_string() << "\n";
  out << "# initial = " << to_string(proof.initial_speed) << "\n";
  out << "# x =";
  for (const auto& x : proof.speedup_params) out << " " << to_string(x);
  out << "\n";
  out << "# outer = " << quantifier_key(proof.outer) << "\n";
  for (const auto& row : rows) {
    std::string line = row.relation + " " + row.text;
    if (!row.reason.empty()) {
      line += std::string(width - display_width(row.text) + 3, ' ') + row.reason;
    }
    out << line << "\n";
  }
  if (!proof.lines.empty()) {
    out << class_notation(proof.lines.front()) << " ⊆ " << class_notation(proof.lines.back()) << "\n";
  }
  return out.str();
}

Proof parse_pretty(std::string_view text) {
  std::optional<Rational> c, initial;
  std::optional<Annotation> annotation;
  std::vector<Rational> xs;
  bool have_xs = false;
  Quantifier outer = Quantifier::Exists;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) != 0) continue;
    auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    std::string key = line.substr(2, eq - 2);
    std::string value = line.substr(eq + 3);
    try {
      if (key == "c") {
        c = parse_rational(value);
      } else if (key == "initial") {
        initial = parse_rational(value);
      } else if (key == "annotation") {
        annotation = Annotation::parse(value);
      } else if (key == "outer") {
        outer = parse_quantifier(value);
      }
    } catch (const std::invalid_argument& e) {
      throw ProofFormatError("header '" + key + "': " + e.what());
    }
  }
  // "# x =" has an empty value when there are no parameters, so scan it separately.
  std::istringstream again{std::string(text)};
  while (std::getline(again, line)) {
    if (line.rfind("# x =", 0) != 0) continue;
    have_xs = true;
    std::istringstream values(line.substr(5));
    std::string token;
    while (values >> token) {
      try {
        xs.push_back(parse_rational(token));
      } catch (const std::invalid_argument& e) {
        throw ProofFormatError(std::string("header 'x': ") + e.what());
      }
    }
  }
  if (!c || !initial || !annotation || !have_xs) {
    throw ProofFormatError("derivation header needs c, annotation, initial and x");
  }
  Proof proof = [&] {
    try {
      return replay(*annotation, *c, *initial, xs, outer);
    } catch (const DerivationError& e) {
      throw ProofFormatError(std::string("header parameters do not replay: ") + e.what());
    }
  }();

  std::istringstream expected_in(pretty_print(proof));
  std::istringstream actual_in{std::string(text)};
  std::string expected_line, actual_line;
  std::size_t row = 0;
  while (true) {
    bool more_expected = static_cast<bool>(std::getline(expected_in, expected_line));
    bool more_actual = static_cast<bool>(std::getline(actual_in, actual_line));
    while (more_actual && trim_right(actual_line).empty()) more_actual = static_cast<bool>(std::getline(actual_in, actual_line));
    if (!more_expected && !more_actual) break;
    ++row;
    if (more_expected != more_actual || trim_right(expected_line) != trim_right(actual_line)) {
      throw ProofFormatError("derivation row " + std::to_string(row) + " does not match the header parameters");
    }
  }
  return proof;
}

}  // namespace atp
