#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "kaon/lhv_model.hpp"

namespace kaon {

enum class Tag { K0, K0BAR, KS, KL, UNTAGGED };
enum class Truth { QM, LHV };

std::string_view to_string(Tag t);
std::string_view to_string(Truth t);
Tag parse_tag(std::string_view s);
Truth parse_truth(std::string_view s);

/// Strangeness tags (including a failed identification) come from the
/// absorber setting; KS/KL from the lifetime setting.
inline bool strangeness_setting(Tag t) { return t == Tag::K0 || t == Tag::K0BAR || t == Tag::UNTAGGED; }

struct EventRecord {
  std::uint64_t event_id = 0;
  Tag left_tag = Tag::UNTAGGED;
  Tag right_tag = Tag::UNTAGGED;
  double left_t = 0.0;   // decay time, or window start for a strangeness measurement
  double right_t = 0.0;
  Truth truth = Truth::QM;
  /// Hidden mass identity of each lifetime-measured kaon (not serialized).
  std::optional<Parent> left_mass;
  std::optional<Parent> right_mass;

  bool operator==(const EventRecord&) const = default;
};

/// Counts for the four Hardy setting pairs. n_setting[l][r] indexes
/// 0 = strangeness, 1 = lifetime.
struct HardyCounts {
  std::uint64_t n_events = 0;
  std::array<std::array<std::uint64_t, 2>, 2> n_setting{};
  std::uint64_t k0_k0bar = 0;
  std::uint64_t k0_kl = 0;
  std::uint64_t kl_k0bar = 0;
  std::uint64_t ks_ks = 0;
  /// KS KS tags from kaons that are K_S by mass identity on both sides.
  std::uint64_t genuine_ks_ks = 0;
  /// Full tag-pair table indexed by Tag.
  std::array<std::array<std::uint64_t, 5>, 5> tag_pairs{};

  void add(const EventRecord& ev);
  void merge(const HardyCounts& other);
};

struct VerdictReport {
  ProbabilitySet p_measured;
  ProbabilitySet standard_error;
  double ch_margin = 0.0;
  double ch_margin_error = 0.0;
  double m_S_budget = 0.0;
  bool falsification_pass = false;
  bool ch_pass = false;
  HardyCounts counts;
  std::uint64_t n_events = 0;
  std::optional<std::uint64_t> seed;
};

/// Each probability is its count over the events recorded with that setting
/// pair. falsification_pass: P(K0,K0bar) > m_S. ch_pass: ch_margin > 0.
/// Binomial standard errors are reported alongside.
VerdictReport falsification_verdict(const HardyCounts& counts, const DetectionModel& d);

struct QmSource {
  TwoKaonState state;
};
struct LhvSource {
  HiddenVariableEnsemble ensemble;
};
using EventSource = std::variant<QmSource, LhvSource>;

QmSource qm_source(Amplitude R);

struct RunOptions {
  std::uint64_t n_events = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t block_size = 1u << 16;
};

struct RunResult {
  HardyCounts counts;
  VerdictReport verdict;
};

using EventSink = std::function<void(std::span<const EventRecord>)>;

/// Generates n_events pairs. Each side picks its setting (strangeness or
/// lifetime) with probability 1/2 from the event's own stream, so the output
/// depends only on (seed, event id, source) and not on `workers`. Events
/// reach `sink` in id order, one block at a time.
///
/// QM mode samples Born probabilities of the setting pair, thins K0 / K0bar
/// identifications with eta / eta', and flips lifetime tags K_S -> KL with
/// m_S and K_L -> KS with m_L on each side independently.
/// LHV mode samples an assignment by weight and reads off its responses.
RunResult monte_carlo_run(const EventSource& source, const DetectionModel& d, const PhysicalConstants& c,
                          const RunOptions& options, const EventSink& sink = {});

}  // namespace kaon
