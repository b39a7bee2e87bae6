#pragma once

#include "kaon/detection.hpp"
#include "kaon/entangled_pair.hpp"

namespace kaon {

/// The four joint probabilities of the Hardy-type test, one per setting pair:
/// strangeness/strangeness, strangeness/lifetime, lifetime/strangeness and
/// lifetime/lifetime.
struct ProbabilitySet {
  double p_k0_k0bar = 0.0;
  double p_k0_kl = 0.0;
  double p_kl_k0bar = 0.0;
  double p_ks_ks = 0.0;
};

/// |<left, right|s>|^2, each side projected in its outcome's natural basis,
/// times eta for a K0 outcome and eta_prime for K0bar. KS/KL outcomes carry
/// no efficiency factor (ideal lifetime tagging).
double joint_probability(const TwoKaonState& s, Outcome left, Outcome right, const DetectionModel& d);

/// The four Hardy probabilities for the post-selected state at R.
ProbabilitySet qm_probability_set(Amplitude R, const DetectionModel& d);
ProbabilitySet qm_probability_set(const TwoKaonState& s, const DetectionModel& d);

/// Hardy probabilities at R = -1 with misidentified lifetime tags:
/// (eta eta'/12, eta m_S/6, eta' m_S/6, 2/3 m_L + 1/3 m_L^2).
ProbabilitySet measured_probabilities(const DetectionModel& d);

/// P(K0,K0bar) - [P(K0,KL) + P(KL,K0bar) + P(KS,KS)]. Positive means the
/// Clauser-Horne-like inequality is violated (no local model fits).
double ch_margin(const ProbabilitySet& p);

/// Smallest eta = eta' with eta^2/12 > m_S_effective, i.e. sqrt(12 m).
/// Experiments must exceed the returned value strictly.
double threshold_falsification(double m_S_effective);

/// eta = eta' at which ch_margin(measured_probabilities) crosses zero:
/// 2 m_S + sqrt(4 m_S^2 + 8 m_L + 4 m_L^2).
double threshold_ch(double m_S, double m_L);

}  // namespace kaon
