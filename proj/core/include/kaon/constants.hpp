#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kaon {

enum class Parent { KS, KL };

/// How a decay in the tagging window is read by the lifetime measurement.
enum class TagClass {
  KS_TAG,      // identifies a K_S (the 2 pi modes)
  KL_LIKE,     // semileptonic / 3 pi modes allowed for K_L
  UNTAGGABLE,  // neither
};

std::string_view to_string(Parent p);
std::string_view to_string(TagClass t);
Parent parse_parent(std::string_view s);
TagClass parse_tag_class(std::string_view s);

struct DecayChannel {
  std::string id;
  Parent parent = Parent::KS;
  double branching_ratio = 0.0;
  TagClass tag_class = TagClass::UNTAGGABLE;
  std::string provenance;

  bool operator==(const DecayChannel&) const = default;
};

/// Physical inputs. All time-like quantities are in units of the K_S mean
/// life, so `tau_S == gamma_S == 1` after loading.
struct PhysicalConstants {
  double tau_S = 1.0;
  double tau_L = 0.0;
  double gamma_S = 1.0;
  double gamma_L = 0.0;
  double delta_m = 0.0;  // hbar / tau_S
  double ks_kl_overlap = 0.0;
  std::optional<double> tau_S_seconds;  // only known when the source used seconds
  double branching_tolerance = 1e-2;
  std::vector<DecayChannel> branching_table;

  std::string tau_S_provenance;
  std::string tau_L_provenance;
  std::string delta_m_provenance;
  std::string overlap_provenance;

  /// FNV-1a 64 of the source document bytes, 16 hex digits.
  std::string fingerprint;

  /// Sum of branching ratios of `parent` channels with the given tag class.
  double branching_sum(Parent parent, TagClass tag) const;
  double branching_sum(Parent parent) const;
  double width(Parent parent) const { return parent == Parent::KS ? gamma_S : gamma_L; }
  const DecayChannel* find_channel(std::string_view id) const;

  /// Field-by-field equality of the physics content (ignores fingerprint).
  bool same_physics(const PhysicalConstants& other) const;
};

/// Parses a constants document (JSON text). Throws KaonError naming the
/// offending field on a missing field or invariant violation.
PhysicalConstants load_constants(std::string_view document);
PhysicalConstants load_constants_file(const std::filesystem::path& path);

/// The shipped default constants (PDG-sourced).
const PhysicalConstants& default_constants();
std::string_view default_constants_document();

/// Serializes to a constants document in tau_S units. load_constants() of the
/// result reproduces the same physics.
std::string serialize_constants(const PhysicalConstants& c);

/// Checks every invariant; throws KaonError("invariant", ...) on violation.
void validate(const PhysicalConstants& c);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace kaon
