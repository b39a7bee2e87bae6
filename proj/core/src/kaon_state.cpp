#include "kaon/kaon_state.hpp"

#include <cmath>
#include <numbers>

#include "kaon/error.hpp"

namespace kaon {

namespace {
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
}

std::string_view to_string(Basis b) { return b == Basis::MASS ? "MASS" : "STRANGENESS"; }

bool is_finite(Amplitude a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); }

SingleKaonState k0() { return {Basis::STRANGENESS, {1.0, 0.0}, {0.0, 0.0}, 1.0}; }
SingleKaonState k0bar() { return {Basis::STRANGENESS, {0.0, 0.0}, {1.0, 0.0}, 1.0}; }
SingleKaonState k_short() { return {Basis::MASS, {1.0, 0.0}, {0.0, 0.0}, 1.0}; }
SingleKaonState k_long() { return {Basis::MASS, {0.0, 0.0}, {1.0, 0.0}, 1.0}; }

SingleKaonState to_mass_basis(const SingleKaonState& s) {
  if (s.basis != Basis::STRANGENESS) throw KaonError("basis", "to_mass_basis expects a STRANGENESS state");
  return {Basis::MASS, (s.amp0 + s.amp1) * kInvSqrt2, (s.amp0 - s.amp1) * kInvSqrt2, s.norm_tracked};
}

SingleKaonState to_strangeness_basis(const SingleKaonState& s) {
  if (s.basis != Basis::MASS) throw KaonError("basis", "to_strangeness_basis expects a MASS state");
  return {Basis::STRANGENESS, (s.amp0 + s.amp1) * kInvSqrt2, (s.amp0 - s.amp1) * kInvSqrt2,
          s.norm_tracked};
}

SingleKaonState evolve(const SingleKaonState& s, double t, const PhysicalConstants& c) {
  if (!(t >= 0.0)) throw KaonError("domain", "evolve: negative time");
  if (t == 0.0) return s;

  SingleKaonState m = s.basis == Basis::MASS ? s : to_mass_basis(s);

  // Factor out the K_L damping so the relative amplitudes never underflow
  // together: survival = exp(-gamma_L t) * |relative|^2.
  const double rel_damp = std::exp(-0.5 * (c.gamma_S - c.gamma_L) * t);
  const Amplitude a_s = m.amp0 * rel_damp;
  const Amplitude a_l = m.amp1 * std::polar(1.0, -c.delta_m * t);
  const double rel_norm = std::norm(a_s) + std::norm(a_l);
  const double before = m.amplitude_norm();

  if (rel_norm > 0.0) {
    const double k = std::sqrt(before / rel_norm);
    m.amp0 = a_s * k;
    m.amp1 = a_l * k;
    m.norm_tracked *= std::exp(-c.gamma_L * t) * rel_norm / before;
  } else {
    m.norm_tracked = 0.0;
  }

  return s.basis == Basis::MASS ? m : to_strangeness_basis(m);
}

}  // namespace kaon
