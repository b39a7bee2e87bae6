#include "kaon/detection.hpp"

#include <cmath>
#include <string>

#include "kaon/error.hpp"

namespace kaon {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::K0: return "K0";
    case Outcome::K0BAR: return "K0BAR";
    case Outcome::KS: return "KS";
    case Outcome::KL: return "KL";
  }
  return "?";
}

bool is_strangeness(Outcome o) { return o == Outcome::K0 || o == Outcome::K0BAR; }

double DetectionModel::efficiency(Outcome o) const {
  switch (o) {
    case Outcome::K0: return eta;
    case Outcome::K0BAR: return eta_prime;
    default: return 1.0;
  }
}

void validate(const TaggingWindow& w) {
  if (!std::isfinite(w.t0) || !std::isfinite(w.t1)) throw KaonError("domain", "window bounds must be finite");
  if (w.t0 < 0.0) throw KaonError("domain", "window start must be >= 0");
  if (!(w.t0 < w.t1)) throw KaonError("domain", "window must satisfy t0 < t1");
}

void validate(const DetectionModel& d) {
  auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw KaonError("domain", std::string(name) + " must lie in [0, 1]");
  };
  prob(d.eta, "eta");
  prob(d.eta_prime, "eta_prime");
  prob(d.m_S, "m_S");
  prob(d.m_L, "m_L");
  validate(d.window);
}

}  // namespace kaon
