#include "kaon/constants.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kaon/error.hpp"

namespace kaon {

namespace detail {
std::string_view embedded_default_constants();
}

using nlohmann::json;

std::string_view to_string(Parent p) { return p == Parent::KS ? "K_S" : "K_L"; }

std::string_view to_string(TagClass t) {
  switch (t) {
    case TagClass::KS_TAG: return "KS_TAG";
    case TagClass::KL_LIKE: return "KL_LIKE";
    case TagClass::UNTAGGABLE: return "UNTAGGABLE";
  }
  return "UNTAGGABLE";
}

Parent parse_parent(std::string_view s) {
  if (s == "K_S" || s == "KS") return Parent::KS;
  if (s == "K_L" || s == "KL") return Parent::KL;
  throw KaonError("schema", "unknown parent '" + std::string(s) + "'");
}

TagClass parse_tag_class(std::string_view s) {
  if (s == "KS_TAG") return TagClass::KS_TAG;
  if (s == "KL_LIKE") return TagClass::KL_LIKE;
  if (s == "UNTAGGABLE") return TagClass::UNTAGGABLE;
  throw KaonError("schema", "unknown tag_class '" + std::string(s) + "'");
}

double PhysicalConstants::branching_sum(Parent parent, TagClass tag) const {
  double sum = 0.0;
  for (const auto& ch : branching_table)
    if (ch.parent == parent && ch.tag_class == tag) sum += ch.branching_ratio;
  return sum;
}

double PhysicalConstants::branching_sum(Parent parent) const {
  double sum = 0.0;
  for (const auto& ch : branching_table)
    if (ch.parent == parent) sum += ch.branching_ratio;
  return sum;
}

const DecayChannel* PhysicalConstants::find_channel(std::string_view id) const {
  for (const auto& ch : branching_table)
    if (ch.id == id) return &ch;
  return nullptr;
}

bool PhysicalConstants::same_physics(const PhysicalConstants& o) const {
  return tau_S == o.tau_S && tau_L == o.tau_L && gamma_S == o.gamma_S &&
         gamma_L == o.gamma_L && delta_m == o.delta_m && ks_kl_overlap == o.ks_kl_overlap &&
         branching_tolerance == o.branching_tolerance && branching_table == o.branching_table;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate(const PhysicalConstants& c) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw KaonError("invariant", field + ": " + what);
  };
  auto finite_positive = [&](double v, const char* field) {
    if (!std::isfinite(v) || v <= 0.0) fail(field, "must be finite and positive");
  };
  finite_positive(c.tau_S, "tau_S");
  finite_positive(c.tau_L, "tau_L");
  finite_positive(c.gamma_S, "gamma_S");
  finite_positive(c.gamma_L, "gamma_L");
  if (!std::isfinite(c.delta_m) || c.delta_m < 0.0) fail("delta_m", "must be finite and non-negative");
  if (std::abs(c.gamma_S * c.tau_S - 1.0) > 1e-12) fail("gamma_S", "must equal 1/tau_S");
  if (std::abs(c.gamma_L * c.tau_L - 1.0) > 1e-12) fail("gamma_L", "must equal 1/tau_L");
  if (!(c.tau_L > c.tau_S)) fail("tau_L", "lifetime ordering violated (tau_L must exceed tau_S)");
  if (!(c.ks_kl_overlap > 0.0 && c.ks_kl_overlap < 1e-2))
    fail("ks_kl_overlap", "must lie in (0, 1e-2)");
  if (!(c.branching_tolerance >= 0.0 && c.branching_tolerance < 1.0))
    fail("branching_tolerance", "must lie in [0, 1)");
  if (c.branching_table.empty()) fail("branching_table", "must not be empty");
  for (const auto& ch : c.branching_table) {
    if (ch.id.empty()) fail("branching_table", "channel id must not be empty");
    if (!(ch.branching_ratio >= 0.0 && ch.branching_ratio <= 1.0))
      fail("branching_table[" + ch.id + "].ratio", "must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < c.branching_table.size(); ++i)
    for (std::size_t j = i + 1; j < c.branching_table.size(); ++j)
      if (c.branching_table[i].id == c.branching_table[j].id)
        fail("branching_table[" + c.branching_table[i].id + "]", "duplicate channel id");
  for (Parent p : {Parent::KS, Parent::KL}) {
    const double sum = c.branching_sum(p);
    if (std::abs(sum - 1.0) > c.branching_tolerance)
      fail("branching_table", "branching ratios of " + std::string(to_string(p)) + " sum to " +
                                  std::to_string(sum) + ", not 1 within tolerance");
  }
}

namespace {

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw KaonError("schema", std::string("missing field '") + field + "'");
  return *it;
}

double require_number(const json& obj, const char* key, const std::string& field) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    throw KaonError("schema", "field '" + field + "' needs numeric '" + key + "'");
  return it->get<double>();
}

std::string optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  return (it != obj.end() && it->is_string()) ? it->get<std::string>() : std::string{};
}

struct Quantity {
  double value;
  std::string unit;
  std::string provenance;
};

Quantity read_quantity(const json& doc, const char* field) {
  const json& q = require(doc, field);
  if (q.is_number()) return {q.get<double>(), "", ""};
  if (!q.is_object()) throw KaonError("schema", std::string("field '") + field + "' must be an object");
  return {require_number(q, "value", field), optional_string(q, "unit"), optional_string(q, "provenance")};
}

}  // namespace

PhysicalConstants load_constants(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw KaonError("parse", std::string("constants document does not parse: ") + e.what());
  }
  if (!doc.is_object()) throw KaonError("schema", "constants document must be an object");

  PhysicalConstants c;
  const Quantity tau_s = read_quantity(doc, "tau_S");
  const Quantity tau_l = read_quantity(doc, "tau_L");
  const Quantity dm = read_quantity(doc, "delta_m");
  const Quantity overlap = read_quantity(doc, "ks_kl_overlap");

  // Everything is normalized to tau_S units. A seconds-based source needs
  // the K_S lifetime in seconds as the scale.
  double scale_seconds = 0.0;
  if (tau_s.unit == "s") {
    if (!(tau_s.value > 0.0)) throw KaonError("invariant", "tau_S: must be finite and positive");
    scale_seconds = tau_s.value;
    c.tau_S_seconds = tau_s.value;
  } else if (tau_s.unit == "tau_S" || tau_s.unit.empty()) {
    if (tau_s.value != 1.0) throw KaonError("invariant", "tau_S: must be 1 when expressed in tau_S units");
  } else {
    throw KaonError("schema", "tau_S: unknown unit '" + tau_s.unit + "'");
  }

  if (tau_l.unit == "s") {
    if (scale_seconds == 0.0) throw KaonError("schema", "tau_L: seconds require tau_S in seconds");
    c.tau_L = tau_l.value / scale_seconds;
  } else if (tau_l.unit == "tau_S" || tau_l.unit.empty()) {
    c.tau_L = tau_l.value;
  } else {
    throw KaonError("schema", "tau_L: unknown unit '" + tau_l.unit + "'");
  }

  if (dm.unit == "hbar/s") {
    if (scale_seconds == 0.0) throw KaonError("schema", "delta_m: hbar/s requires tau_S in seconds");
    c.delta_m = dm.value * scale_seconds;
  } else if (dm.unit == "hbar/tau_S" || dm.unit.empty()) {
    c.delta_m = dm.value;
  } else {
    throw KaonError("schema", "delta_m: unknown unit '" + dm.unit + "'");
  }

  c.tau_S = 1.0;
  c.gamma_S = 1.0;
  c.gamma_L = 1.0 / c.tau_L;
  c.ks_kl_overlap = overlap.value;
  c.tau_S_provenance = tau_s.provenance;
  c.tau_L_provenance = tau_l.provenance;
  c.delta_m_provenance = dm.provenance;
  c.overlap_provenance = overlap.provenance;

  if (auto it = doc.find("branching_tolerance"); it != doc.end()) {
    if (!it->is_number()) throw KaonError("schema", "field 'branching_tolerance' must be numeric");
    c.branching_tolerance = it->get<double>();
  }

  const json& table = require(doc, "branching_table");
  if (!table.is_array()) throw KaonError("schema", "field 'branching_table' must be an array");
  for (const auto& row : table) {
    if (!row.is_object()) throw KaonError("schema", "branching_table rows must be objects");
    DecayChannel ch;
    auto id = row.find("channel");
    if (id == row.end() || !id->is_string())
      throw KaonError("schema", "branching_table row missing 'channel'");
    ch.id = id->get<std::string>();
    const std::string field = "branching_table[" + ch.id + "]";
    auto parent = row.find("parent");
    if (parent == row.end() || !parent->is_string())
      throw KaonError("schema", field + " missing 'parent'");
    ch.parent = parse_parent(parent->get<std::string>());
    ch.branching_ratio = require_number(row, "ratio", field);
    auto tag = row.find("tag_class");
    if (tag == row.end() || !tag->is_string())
      throw KaonError("schema", field + " missing 'tag_class'");
    ch.tag_class = parse_tag_class(tag->get<std::string>());
    ch.provenance = optional_string(row, "provenance");
    c.branching_table.push_back(std::move(ch));
  }

  validate(c);
  c.fingerprint = fnv1a_hex(document);
  return c;
}

PhysicalConstants load_constants_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KaonError("io", "cannot open constants file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_constants(buf.str());
}

std::string_view default_constants_document() { return detail::embedded_default_constants(); }

const PhysicalConstants& default_constants() {
  static const PhysicalConstants c = load_constants(default_constants_document());
  return c;
}

std::string serialize_constants(const PhysicalConstants& c) {
  json doc;
  doc["schema"] = "kaon-constants/1";
  doc["tau_S"] = {{"value", c.tau_S}, {"unit", "tau_S"}, {"provenance", c.tau_S_provenance}};
  doc["tau_L"] = {{"value", c.tau_L}, {"unit", "tau_S"}, {"provenance", c.tau_L_provenance}};
  doc["delta_m"] = {{"value", c.delta_m}, {"unit", "hbar/tau_S"}, {"provenance", c.delta_m_provenance}};
  doc["ks_kl_overlap"] = {{"value", c.ks_kl_overlap}, {"unit", "1"}, {"provenance", c.overlap_provenance}};
  doc["branching_tolerance"] = c.branching_tolerance;
  json table = json::array();
  for (const auto& ch : c.branching_table) {
    table.push_back({{"channel", ch.id},
                     {"parent", to_string(ch.parent)},
                     {"ratio", ch.branching_ratio},
                     {"tag_class", to_string(ch.tag_class)},
                     {"provenance", ch.provenance}});
  }
  doc["branching_table"] = std::move(table);
  return doc.dump(2);
}

}  // namespace kaon
