#include "kaon/qm_predictions.hpp"

#include <cmath>
#include <numbers>

#include "kaon/error.hpp"

namespace kaon {

namespace {

// <outcome| expressed in `basis` coordinates (real under our convention).
std::array<double, 2> bra(Outcome o, Basis basis) {
  const Basis natural = is_strangeness(o) ? Basis::STRANGENESS : Basis::MASS;
  const int index = (o == Outcome::K0 || o == Outcome::KS) ? 0 : 1;
  if (natural == basis) return index == 0 ? std::array{1.0, 0.0} : std::array{0.0, 1.0};
  constexpr double h = 1.0 / std::numbers::sqrt2;
  return index == 0 ? std::array{h, h} : std::array{h, -h};
}

}  // namespace

double joint_probability(const TwoKaonState& s, Outcome left, Outcome right, const DetectionModel& d) {
  const auto l = bra(left, s.basis);
  const auto r = bra(right, s.basis);
  Amplitude a{0.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a += l[i] * r[j] * s.at(i, j);
  return std::norm(a) * d.efficiency(left) * d.efficiency(right);
}

ProbabilitySet qm_probability_set(const TwoKaonState& s, const DetectionModel& d) {
  return {joint_probability(s, Outcome::K0, Outcome::K0BAR, d),
          joint_probability(s, Outcome::K0, Outcome::KL, d),
          joint_probability(s, Outcome::KL, Outcome::K0BAR, d),
          joint_probability(s, Outcome::KS, Outcome::KS, d)};
}

ProbabilitySet qm_probability_set(Amplitude R, const DetectionModel& d) {
  return qm_probability_set(build_phi_strangeness_basis(R), d);
}

ProbabilitySet measured_probabilities(const DetectionModel& d) {
  validate(d);
  return {d.eta * d.eta_prime / 12.0, d.eta * d.m_S / 6.0, d.eta_prime * d.m_S / 6.0,
          2.0 / 3.0 * d.m_L + d.m_L * d.m_L / 3.0};
}

double ch_margin(const ProbabilitySet& p) {
  return p.p_k0_k0bar - (p.p_k0_kl + p.p_kl_k0bar + p.p_ks_ks);
}

double threshold_falsification(double m_S_effective) {
  if (!(m_S_effective >= 0.0) || !std::isfinite(m_S_effective))
    throw KaonError("domain", "threshold_falsification: misidentification budget must be >= 0");
  return std::sqrt(12.0 * m_S_effective);
}

double threshold_ch(double m_S, double m_L) {
  if (!(m_S >= 0.0) || !(m_L >= 0.0)) throw KaonError("domain", "threshold_ch: m_S and m_L must be >= 0");
  return 2.0 * m_S + std::sqrt(4.0 * m_S * m_S + 8.0 * m_L + 4.0 * m_L * m_L);
}

}  // namespace kaon
