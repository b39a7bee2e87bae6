#include "kaon/decay_engine.hpp"

#include <cmath>
#include <string>

#include "kaon/error.hpp"

namespace kaon {

namespace {

// 1 - exp(-x) without cancellation.
double decayed(double x) { return -std::expm1(-x); }

// Budget queries accept an empty window (t0 == t1) as a limiting case.
void check_span(const TaggingWindow& w) {
  if (!std::isfinite(w.t0) || !std::isfinite(w.t1)) throw KaonError("domain", "window bounds must be finite");
  if (w.t0 < 0.0) throw KaonError("domain", "window start must be >= 0");
  if (w.t1 < w.t0) throw KaonError("domain", "window must satisfy t0 <= t1");
}

}  // namespace

double survival_fraction(const TaggingWindow& w, Parent parent, const PhysicalConstants& c) {
  check_span(w);
  return std::exp(-c.width(parent) * w.length());
}

double untaggable_fraction(const TaggingWindow& w, const PhysicalConstants& c) {
  check_span(w);
  bool any = false;
  double br = 0.0;
  for (const auto& ch : c.branching_table) {
    if (ch.parent != Parent::KS) continue;
    any = true;
    if (ch.tag_class != TagClass::KS_TAG) br += ch.branching_ratio;
  }
  if (!any) throw KaonError("classification", "branching_table has no K_S channels");
  return decayed(c.gamma_S * w.length()) * br;
}

MisidBudget misid_budget(const TaggingWindow& w, const PhysicalConstants& c) {
  MisidBudget b;
  b.undecayed_fraction = survival_fraction(w, Parent::KS, c);
  b.untaggable_fraction = untaggable_fraction(w, c);
  b.m_S = b.undecayed_fraction + b.untaggable_fraction;
  b.m_L = decayed(c.gamma_L * w.length()) * c.branching_sum(Parent::KL, TagClass::KS_TAG);
  return b;
}

DetectionModel detection_with_budget(double eta, double eta_prime, const TaggingWindow& w,
                                     const PhysicalConstants& c) {
  const MisidBudget b = misid_budget(w, c);
  DetectionModel d{eta, eta_prime, b.m_S, b.m_L, w};
  validate(d);
  return d;
}

double bin_decay_mass(double a, double b, Parent parent, const PhysicalConstants& c, double reference_time) {
  const double g = c.width(parent);
  return std::exp(-g * (a - reference_time)) * decayed(g * (b - a));
}

double contamination_ratio(double a, double b, const PhysicalConstants& c, double reference_time) {
  if (a < reference_time) throw KaonError("domain", "contamination bin starts before the reference time");
  if (!(b > a)) throw KaonError("domain", "contamination bin must have positive width");
  const double br_s = c.branching_sum(Parent::KS, TagClass::KS_TAG);
  const double br_l = c.branching_sum(Parent::KL, TagClass::KS_TAG);
  if (!(br_s > 0.0)) throw KaonError("classification", "no K_S channel is classed KS_TAG");
  // Written as a single exponential of the width difference so neither
  // population underflows on its own.
  return std::exp((c.gamma_S - c.gamma_L) * (a - reference_time)) * decayed(c.gamma_L * (b - a)) /
         decayed(c.gamma_S * (b - a)) * br_l / br_s;
}

std::vector<ContaminationBin> contamination_histogram(double t_start, double t_end, double bin_width,
                                                      const PhysicalConstants& c, double reference_time) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw KaonError("domain", "bin width must be positive");
  if (!(t_end > t_start)) throw KaonError("domain", "histogram range must satisfy start < end");
  if (t_start < reference_time)
    throw KaonError("domain", "histogram bin before t = " + std::to_string(reference_time));
  const double span = (t_end - t_start) / bin_width;
  const double nbins = std::round(span);
  if (std::abs(span - nbins) > 1e-9 * std::max(1.0, span))
    throw KaonError("domain", "histogram range is not a whole number of bins");

  std::vector<ContaminationBin> bins;
  bins.reserve(static_cast<std::size_t>(nbins));
  for (int k = 0; k < static_cast<int>(nbins); ++k) {
    const double a = t_start + k * bin_width;
    const double b = t_start + (k + 1) * bin_width;
    bins.push_back({a, b, contamination_ratio(a, b, c, reference_time)});
  }
  return bins;
}

WindowEnd max_window_end(double cap, const PhysicalConstants& c, const WindowSearch& search) {
  if (!(cap > 0.0) || !std::isfinite(cap)) throw KaonError("domain", "contamination cap must be in (0, inf)");
  if (!(search.grid_step > 0.0) || !(search.t_hi > search.t_lo))
    throw KaonError("domain", "invalid window search grid");
  const int steps = static_cast<int>(std::floor((search.t_hi - search.t_lo) / search.grid_step + 1e-9));
  double best = 0.0;
  bool found = false;
  for (int k = 0; k <= steps; ++k) {
    const double t = search.t_lo + k * search.grid_step;
    if (contamination_ratio(t, t + search.bin_width, c) >= cap) {
      if (!found) throw KaonError("unreachable", "contamination cap is exceeded at the start of the window");
      return {best, false};
    }
    best = t;
    found = true;
  }
  return {best, true};
}

}  // namespace kaon
