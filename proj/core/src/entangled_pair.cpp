#include "kaon/entangled_pair.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kaon/error.hpp"
#include "kaon/parallel.hpp"

namespace kaon {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Single-kaon change of basis. The matrix is its own inverse under our
// convention, which is why both directions share it.
constexpr double kSwap[2][2] = {{kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}};

TwoKaonState change_basis(const TwoKaonState& s, Basis target) {
  TwoKaonState out = s;
  out.basis = target;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Amplitude sum{0.0, 0.0};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) sum += kSwap[a][i] * kSwap[b][j] * s.at(i, j);
      out.amps[2 * a + b] = sum;
    }
  return out;
}

void normalize(TwoKaonState& s) {
  const double n = s.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw KaonError("degenerate", "two-kaon state has zero or non-finite norm");
  const double k = 1.0 / std::sqrt(n);
  for (auto& a : s.amps) a *= k;
}

}  // namespace

double TwoKaonState::norm() const {
  double n = 0.0;
  for (const auto& a : amps) n += std::norm(a);
  return n;
}

std::string_view slot_label(Basis basis, int slot) {
  static constexpr std::string_view strange[] = {"K0K0", "K0K0bar", "K0barK0", "K0barK0bar"};
  static constexpr std::string_view mass[] = {"KSKS", "KSKL", "KLKS", "KLKL"};
  if (slot < 0 || slot > 3) throw KaonError("domain", "slot index out of range");
  return basis == Basis::MASS ? mass[slot] : strange[slot];
}

std::pair<double, double> DensityMatrix2::eigenvalues() const {
  const double tr = trace();
  const double det = rho00.real() * rho11.real() - std::norm(rho01);
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  const double hi = 0.5 * (tr + disc);
  // det / hi avoids cancellation for nearly pure states.
  const double lo = hi > 0.0 ? det / hi : 0.0;
  return {hi, lo};
}

void validate(const DensityMatrix2& rho, double tol) {
  for (const Amplitude& a : {rho.rho00, rho.rho01, rho.rho10, rho.rho11})
    if (!is_finite(a)) throw KaonError("invariant", "density matrix has non-finite entries");
  if (std::abs(rho.rho00.imag()) > tol || std::abs(rho.rho11.imag()) > tol ||
      std::abs(rho.rho01 - std::conj(rho.rho10)) > tol)
    throw KaonError("invariant", "density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > tol) throw KaonError("invariant", "density matrix trace is not 1");
  if (rho.eigenvalues().second < -tol) throw KaonError("invariant", "density matrix is not positive semidefinite");
}

TwoKaonState build_singlet() {
  TwoKaonState s;
  s.basis = Basis::STRANGENESS;
  s.amps = {Amplitude{0.0}, Amplitude{kInvSqrt2}, Amplitude{-kInvSqrt2}, Amplitude{0.0}};
  s.R = Amplitude{0.0};
  s.R_prime = Amplitude{0.0};
  return s;
}

std::pair<Amplitude, Amplitude> compute_R(const RegenerationParams& params, const PhysicalConstants& c) {
  if (!is_finite(params.r) || !(std::abs(params.r) < 1.0))
    throw KaonError("domain", "regeneration parameter must satisfy |r| < 1");
  if (!(params.T >= 0.0) || !std::isfinite(params.T))
    throw KaonError("domain", "post-selection time T must be finite and >= 0");
  if (params.r == Amplitude{0.0}) return {Amplitude{0.0}, Amplitude{0.0}};
  const Amplitude exponent{0.5 * (c.gamma_S - c.gamma_L) * params.T, -c.delta_m * params.T};
  const Amplitude R = -params.r * std::exp(exponent);
  if (!is_finite(R) || R == Amplitude{0.0})
    throw KaonError("domain", "R is not representable for these parameters");
  const Amplitude R_prime = -params.r * params.r / R;
  return {R, R_prime};
}

TwoKaonState build_phi_mass_basis(Amplitude R, Amplitude R_prime) {
  if (!is_finite(R) || !is_finite(R_prime)) throw KaonError("domain", "R and R' must be finite");
  TwoKaonState s;
  s.basis = Basis::MASS;
  s.amps = {R_prime, Amplitude{1.0}, Amplitude{-1.0}, R};
  s.R = R;
  s.R_prime = R_prime;
  normalize(s);
  return s;
}

TwoKaonState build_phi_strangeness_basis(Amplitude R) {
  if (!is_finite(R)) throw KaonError("domain", "R must be finite");
  TwoKaonState s;
  s.basis = Basis::STRANGENESS;
  s.amps = {R, -(2.0 + R), 2.0 - R, R};
  s.R = R;
  s.R_prime = Amplitude{0.0};
  normalize(s);
  return s;
}

TwoKaonState to_mass_basis(const TwoKaonState& s) {
  if (s.basis != Basis::STRANGENESS) throw KaonError("basis", "to_mass_basis expects a STRANGENESS state");
  return change_basis(s, Basis::MASS);
}

TwoKaonState to_strangeness_basis(const TwoKaonState& s) {
  if (s.basis != Basis::MASS) throw KaonError("basis", "to_strangeness_basis expects a MASS state");
  return change_basis(s, Basis::STRANGENESS);
}

TwoKaonState in_basis(const TwoKaonState& s, Basis basis) {
  return s.basis == basis ? s : change_basis(s, basis);
}

std::pair<TwoKaonState, double> evolve_pair(const TwoKaonState& s, double t, const PhysicalConstants& c) {
  if (!(t >= 0.0)) throw KaonError("domain", "evolve_pair: negative time");
  TwoKaonState m = in_basis(s, Basis::MASS);
  const double before = m.norm();
  // Per-slot factors relative to K_L damping (see kaon_state evolve()).
  const Amplitude f[2] = {Amplitude{std::exp(-0.5 * (c.gamma_S - c.gamma_L) * t)},
                          std::polar(1.0, -c.delta_m * t)};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.amps[2 * i + j] *= f[i] * f[j];
  const double rel = m.norm();
  const double survival = std::exp(-2.0 * c.gamma_L * t) * rel / before;
  normalize(m);
  return {in_basis(m, s.basis), survival};
}

double overlap_magnitude(const TwoKaonState& a, const TwoKaonState& b) {
  const TwoKaonState bb = in_basis(b, a.basis);
  Amplitude sum{0.0};
  for (int k = 0; k < 4; ++k) sum += std::conj(a.amps[k]) * bb.amps[k];
  return std::abs(sum);
}

DensityMatrix2 reduced_density_matrix(const TwoKaonState& s, Side side) {
  DensityMatrix2 rho;
  rho.basis = s.basis;
  Amplitude r[2][2] = {};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        // Trace over the other slot index k.
        const Amplitude a = side == Side::LEFT ? s.at(i, k) : s.at(k, i);
        const Amplitude b = side == Side::LEFT ? s.at(j, k) : s.at(k, j);
        r[i][j] += a * std::conj(b);
      }
  rho.rho00 = r[0][0];
  rho.rho01 = r[0][1];
  rho.rho10 = r[1][0];
  rho.rho11 = r[1][1];
  return rho;
}

double von_neumann_entropy(const DensityMatrix2& rho) {
  validate(rho);
  const auto [hi, lo] = rho.eigenvalues();
  double s = 0.0;
  for (double l : {hi, lo})
    if (l > 0.0) s -= l * std::log2(l);
  return std::clamp(s, 0.0, 1.0);
}

double entanglement_entropy(const TwoKaonState& s, Side side) {
  return von_neumann_entropy(reduced_density_matrix(s, side));
}

std::vector<SurfacePoint> entropy_surface(GridRange re_range, GridRange im_range, int grid_n, unsigned workers) {
  if (grid_n < 2) throw KaonError("domain", "entropy_surface: grid_n must be >= 2");
  for (const GridRange& g : {re_range, im_range})
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || !(g.lo < g.hi))
      throw KaonError("domain", "entropy_surface: range must be finite with lo < hi");

  const auto n = static_cast<std::uint64_t>(grid_n);
  auto coord = [n](GridRange g, std::uint64_t k) {
    return g.lo + (g.hi - g.lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  };
  std::vector<SurfacePoint> out(n * n);
  parallel_ranges(n * n, workers, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      const double re = coord(re_range, idx / n);
      const double im = coord(im_range, idx % n);
      out[idx] = {re, im, entanglement_entropy(build_phi_strangeness_basis({re, im}))};
    }
  });
  return out;
}

}  // namespace kaon
