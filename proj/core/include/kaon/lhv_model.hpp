#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kaon/constants.hpp"
#include "kaon/detection.hpp"
#include "kaon/qm_predictions.hpp"

namespace kaon {

/// Deterministic result of a strangeness measurement on one kaon. NONE means
/// the identification does not fire for this hidden variable.
enum class StrangenessResponse { K0, K0BAR, NONE };

std::string_view to_string(StrangenessResponse r);

struct DecayAssignment {
  std::string channel;  // id in the constants branching_table
  double time = 0.0;    // tau_S units, >= kReferenceTime
};

/// Everything the hidden variable fixes for one kaon. Left and right kaons
/// are separate values, so a response can never depend on the far side's
/// setting.
struct KaonAssignment {
  StrangenessResponse strangeness = StrangenessResponse::NONE;
  Parent mass = Parent::KS;
  DecayAssignment decay;
};

struct HiddenAssignment {
  KaonAssignment left;
  KaonAssignment right;
};

/// How strangeness identification efficiency enters.
///   THINNING: responses are ideal; eta / eta' multiply each K0 / K0bar
///             response.
///   ABSORBED: inefficiency is already encoded in the weights through NONE
///             responses; no extra factor.
enum class EfficiencyModel { THINNING, ABSORBED };

struct WeightedAssignment {
  HiddenAssignment assignment;
  double weight = 0.0;
};

/// Discrete hidden-variable distribution.
struct HiddenVariableEnsemble {
  std::vector<WeightedAssignment> entries;
  EfficiencyModel efficiency = EfficiencyModel::THINNING;

  double total_weight() const;
};

/// Throws KaonError("invariant", ...) on negative weights, weights not
/// summing to 1 (1e-10), decay times before the reference time, unknown
/// channels or channels whose parent differs from the mass identity.
void validate(const HiddenVariableEnsemble& e, const PhysicalConstants& c);

/// What the lifetime measurement reports for this kaon: KS when it decays
/// inside the window into a KS_TAG channel, KL otherwise.
Outcome lifetime_tag(const KaonAssignment& k, const TaggingWindow& w, const PhysicalConstants& c);

/// Probability that one side reports `o` for this hidden variable.
double response(const KaonAssignment& k, Outcome o, EfficiencyModel model, const DetectionModel& d,
                const PhysicalConstants& c);

/// Sum over entries of weight * response_left * response_right.
double lhv_joint_probability(const HiddenVariableEnsemble& e, Outcome left, Outcome right,
                             const DetectionModel& d, const PhysicalConstants& c);

double lhv_marginal(const HiddenVariableEnsemble& e, Side side, Outcome o, const DetectionModel& d,
                    const PhysicalConstants& c);

ProbabilitySet lhv_probability_set(const HiddenVariableEnsemble& e, const DetectionModel& d,
                                   const PhysicalConstants& c);

/// Weight of pairs that are K_S on both sides by mass identity and both
/// decay inside the window into KS_TAG channels.
double genuine_ks_ks(const HiddenVariableEnsemble& e, const DetectionModel& d, const PhysicalConstants& c);

struct HardyReport {
  double mass_A = 0.0;             // weight with K0 left and K0bar right
  double p_k0_kl_mass = 0.0;       // by mass identity, no window
  double p_kl_k0bar_mass = 0.0;
  double p_ks_ks_mass = 0.0;
  double p_ks_ks_window = 0.0;     // genuine_ks_ks
  bool zeros_reproduced = false;   // both mixed probabilities vanish by mass identity
  bool bound_holds = false;        // p_ks_ks_mass >= mass_A
  bool escape_exhibited = false;   // p_ks_ks_window < mass_A
};

/// The Hardy argument: if K0 left / K0bar right always comes with K_S on the
/// far side, P(KS,KS) by mass identity is at least the weight of that set.
/// Restricting to identifiable in-window decays lets that weight escape.
HardyReport hardy_constraint_check(const HiddenVariableEnsemble& e, const DetectionModel& d,
                                   const PhysicalConstants& c);

struct EvadingOptions {
  enum class Escape { TIME, CHANNEL };
  Escape escape = Escape::TIME;
  /// Escaping kaons decay at t1 + escape_offset (TIME) or in the window into
  /// a KL_LIKE channel (CHANNEL).
  double escape_offset = 1.0;
};

/// Local model that reproduces measured_probabilities(d) for the four
/// Hardy outcome pairs while never producing an in-window K_S K_S pair by
/// mass identity. The K0/K0bar weight rides on K_S pairs whose decay is
/// unidentifiable on one side.
///
/// Throws KaonError("infeasible", ...) when eta eta'/12 exceeds m_S (the
/// falsification bound) or when the measured set violates the
/// Clauser-Horne-like inequality, which no local model can reproduce.
HiddenVariableEnsemble construct_evading_lhv(const DetectionModel& d, const PhysicalConstants& c,
                                             const EvadingOptions& options = {});

}  // namespace kaon
