#pragma once

#include <complex>

#include "kaon/constants.hpp"

namespace kaon {

using Amplitude = std::complex<double>;

/// Ordering of the two basis kets: STRANGENESS = (K0, K0bar), MASS = (K_S, K_L).
///
/// Phase convention:
///   |K_S> = (|K0> + |K0bar>) / sqrt(2)
///   |K_L> = (|K0> - |K0bar>) / sqrt(2)
/// K_S and K_L are treated as exactly orthogonal; the physical overlap is
/// carried as a misidentification probability by the decay engine.
enum class Basis { STRANGENESS, MASS };

std::string_view to_string(Basis b);

bool is_finite(Amplitude a);

struct SingleKaonState {
  Basis basis = Basis::STRANGENESS;
  Amplitude amp0{1.0, 0.0};
  Amplitude amp1{0.0, 0.0};
  /// Survival weight accumulated by evolve(); amplitudes stay normalized.
  double norm_tracked = 1.0;

  double amplitude_norm() const { return std::norm(amp0) + std::norm(amp1); }
};

SingleKaonState k0();
SingleKaonState k0bar();
SingleKaonState k_short();
SingleKaonState k_long();

SingleKaonState to_mass_basis(const SingleKaonState& s);
SingleKaonState to_strangeness_basis(const SingleKaonState& s);

/// Wigner-Weisskopf evolution over `t` (tau_S units). K_L picks up the
/// relative phase exp(-i delta_m t); each component is damped by
/// exp(-gamma t / 2). Amplitudes are renormalized and the survival
/// probability is folded into norm_tracked. The result is in the input basis.
SingleKaonState evolve(const SingleKaonState& s, double t, const PhysicalConstants& c);

}  // namespace kaon
