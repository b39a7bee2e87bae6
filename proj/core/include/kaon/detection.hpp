#pragma once

#include <string_view>

namespace kaon {

/// Lifetime-tagging window [t0, t1] in tau_S units.
struct TaggingWindow {
  double t0 = 10.0;
  double t1 = 21.0;

  double length() const { return t1 - t0; }
  bool contains(double t) const { return t >= t0 && t <= t1; }
};

/// Measurement outcome on one side.
enum class Outcome { K0, K0BAR, KS, KL };

std::string_view to_string(Outcome o);
bool is_strangeness(Outcome o);

/// Strangeness identification efficiencies (eta for K0, eta_prime for
/// K0bar) and lifetime-tag misidentification probabilities.
struct DetectionModel {
  double eta = 1.0;
  double eta_prime = 1.0;
  double m_S = 0.0;
  double m_L = 0.0;
  TaggingWindow window{};

  double efficiency(Outcome o) const;
};

void validate(const TaggingWindow& w);
void validate(const DetectionModel& d);

}  // namespace kaon
