#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "kaon/kaon_state.hpp"

namespace kaon {

enum class Side { LEFT, RIGHT };

/// Two-kaon pure state over a product basis shared by both slots.
///
/// Slot order is left (x) right with index 2 * left + right, using the
/// single-kaon ket order of `basis`:
///   STRANGENESS: K0K0, K0K0bar, K0barK0, K0barK0bar
///   MASS:        KSKS, KSKL,    KLKS,    KLKL
/// Serialized output always labels slots by ket name via slot_label().
struct TwoKaonState {
  Basis basis = Basis::STRANGENESS;
  std::array<Amplitude, 4> amps{};
  std::optional<Amplitude> R;
  std::optional<Amplitude> R_prime;

  double norm() const;
  Amplitude at(int left, int right) const { return amps[2 * left + right]; }
};

std::string_view slot_label(Basis basis, int slot);

struct RegenerationParams {
  Amplitude r{0.0, 0.0};
  double T = 0.0;  // post-selection time, tau_S units
};

/// Hermitian 2x2 density matrix of one kaon, in the basis it was reduced in.
struct DensityMatrix2 {
  Basis basis = Basis::STRANGENESS;
  Amplitude rho00, rho01, rho10, rho11;

  double trace() const { return rho00.real() + rho11.real(); }
  /// Closed-form eigenvalues (trace/determinant), descending.
  std::pair<double, double> eigenvalues() const;
};

/// Throws KaonError("invariant", ...) unless Hermitian, unit trace and PSD
/// within `tol`.
void validate(const DensityMatrix2& rho, double tol = 1e-12);

TwoKaonState build_singlet();

/// (R, R') for the regenerated state. R carries the K_L K_L admixture; its
/// magnitude grows relative to the K_S K_L terms as the K_S components decay:
///   R  = -r exp[(-i delta_m + (gamma_S - gamma_L)/2) T]
///   R' = -r^2 / R   (0 when r = 0)
std::pair<Amplitude, Amplitude> compute_R(const RegenerationParams& params, const PhysicalConstants& c);

/// (|KS KL> - |KL KS> + R |KL KL> + R' |KS KS>) / sqrt(2 + |R|^2 + |R'|^2)
TwoKaonState build_phi_mass_basis(Amplitude R, Amplitude R_prime);

/// Post-selected state with R' dropped:
/// (R|K0K0> + R|K0bK0b> + (2-R)|K0bK0> - (2+R)|K0K0b>) / (2 sqrt(2 + |R|^2))
TwoKaonState build_phi_strangeness_basis(Amplitude R);

TwoKaonState to_mass_basis(const TwoKaonState& s);
TwoKaonState to_strangeness_basis(const TwoKaonState& s);
TwoKaonState in_basis(const TwoKaonState& s, Basis basis);

/// Both kaons evolved for `t`; the result is renormalized and the joint
/// survival probability is returned alongside it.
std::pair<TwoKaonState, double> evolve_pair(const TwoKaonState& s, double t, const PhysicalConstants& c);

/// |<a|b>| for normalized states, basis-converting b if needed.
double overlap_magnitude(const TwoKaonState& a, const TwoKaonState& b);

DensityMatrix2 reduced_density_matrix(const TwoKaonState& s, Side side);

/// -Tr(rho log2 rho), 0 log 0 = 0.
double von_neumann_entropy(const DensityMatrix2& rho);

double entanglement_entropy(const TwoKaonState& s, Side side = Side::LEFT);

struct SurfacePoint {
  double re_R;
  double im_R;
  double entropy;
};

struct GridRange {
  double lo = -2.0;
  double hi = 2.0;
};

/// Entropy of build_phi_strangeness_basis(R) over a grid_n x grid_n grid of
/// R = re + i im. Row-major: re is the outer index, im the inner one.
std::vector<SurfacePoint> entropy_surface(GridRange re_range, GridRange im_range, int grid_n,
                                          unsigned workers = 1);

}  // namespace kaon
