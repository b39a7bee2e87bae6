#pragma once

#include <vector>

#include "kaon/constants.hpp"
#include "kaon/detection.hpp"

namespace kaon {

/// Start of the tagging window and reference time of the surviving pair
/// population (tau_S units).
inline constexpr double kReferenceTime = 10.0;

struct MisidBudget {
  double undecayed_fraction = 0.0;    // K_S still alive at t1
  double untaggable_fraction = 0.0;   // K_S decayed in the window, not KS_TAG
  double m_S = 0.0;                   // sum of the two above
  double m_L = 0.0;                   // K_L decaying to KS_TAG channels in the window
};

/// exp(-gamma_parent (t1 - t0)).
double survival_fraction(const TaggingWindow& w, Parent parent, const PhysicalConstants& c);

/// (1 - exp(-gamma_S (t1 - t0))) * sum of K_S branching ratios whose tag class
/// is not KS_TAG.
double untaggable_fraction(const TaggingWindow& w, const PhysicalConstants& c);

MisidBudget misid_budget(const TaggingWindow& w, const PhysicalConstants& c);

/// Detection model with m_S, m_L taken from misid_budget(window).
DetectionModel detection_with_budget(double eta, double eta_prime, const TaggingWindow& w,
                                     const PhysicalConstants& c);

struct ContaminationBin {
  double start;
  double end;
  double ratio;
};

/// Decay probability of `parent` in [a, b) for a kaon alive at reference_time.
double bin_decay_mass(double a, double b, Parent parent, const PhysicalConstants& c,
                      double reference_time = kReferenceTime);

/// Ratio of K_L -> KS_TAG decays to K_S -> KS_TAG decays in [a, b), both
/// populations normalized to one kaon alive at reference_time. The two
/// contributions are added incoherently (no K_S/K_L interference term).
double contamination_ratio(double a, double b, const PhysicalConstants& c,
                           double reference_time = kReferenceTime);

/// Bins [t, t + width) from t_start up to t_end. The span must be a whole
/// number of bins and t_start must not precede reference_time.
std::vector<ContaminationBin> contamination_histogram(double t_start, double t_end, double bin_width,
                                                      const PhysicalConstants& c,
                                                      double reference_time = kReferenceTime);

struct WindowSearch {
  double grid_step = 0.1;
  double t_lo = kReferenceTime;
  double t_hi = 30.0;
  double bin_width = 1.0;
};

struct WindowEnd {
  double t1;
  bool hit_upper_bound;  // the cap was never reached inside the search grid
};

/// Largest t1 on the search grid for which the contamination of the next bin
/// [t1, t1 + bin_width) stays below `cap`. Throws KaonError("unreachable")
/// when the first grid point already violates the cap.
WindowEnd max_window_end(double cap, const PhysicalConstants& c, const WindowSearch& search = {});

}  // namespace kaon
