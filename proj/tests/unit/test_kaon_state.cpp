#include <doctest.h>

#include <cmath>
#include <random>

#include "kaon/error.hpp"
#include "kaon/kaon_state.hpp"

using namespace kaon;

namespace {

const double h = std::sqrt(0.5);

bool close(Amplitude a, Amplitude b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

SingleKaonState random_state(std::mt19937_64& gen, Basis basis) {
  std::normal_distribution<double> n;
  Amplitude a{n(gen), n(gen)}, b{n(gen), n(gen)};
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  return {basis, a / norm, b / norm, 1.0};
}

}  // namespace

TEST_CASE("strangeness to mass basis") {
  const auto m = to_mass_basis(k0());
  CHECK(m.basis == Basis::MASS);
  CHECK(close(m.amp0, h));
  CHECK(close(m.amp1, h));

  // Under K_S = (K0 + K0bar)/sqrt2 the symmetric combination is pure K_S
  // and the antisymmetric one pure K_L.
  const auto s = to_mass_basis({Basis::STRANGENESS, h, h, 1.0});
  CHECK(close(s.amp0, 1.0));
  CHECK(close(s.amp1, 0.0));
  const auto l = to_mass_basis({Basis::STRANGENESS, h, -h, 1.0});
  CHECK(close(l.amp0, 0.0));
  CHECK(close(l.amp1, 1.0));

  CHECK_THROWS_AS(to_mass_basis(k_short()), KaonError);
}

TEST_CASE("mass to strangeness basis") {
  const auto s = to_strangeness_basis(k_short());
  CHECK(close(s.amp0, h));
  CHECK(close(s.amp1, h));
  const auto l = to_strangeness_basis(k_long());
  CHECK(close(l.amp0, h));
  CHECK(close(l.amp1, -h));
  CHECK_THROWS_AS(to_strangeness_basis(k0()), KaonError);
}

TEST_CASE("basis change preserves norm and round-trips") {
  std::mt19937_64 gen(20241017);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_state(gen, Basis::STRANGENESS);
    const auto m = to_mass_basis(x);
    CHECK(std::abs(m.amplitude_norm() - 1.0) < 1e-12);
    const auto back = to_strangeness_basis(m);
    CHECK(close(back.amp0, x.amp0));
    CHECK(close(back.amp1, x.amp1));
  }
}

TEST_CASE("evolve damps K_S with exp(-t)") {
  const auto& c = default_constants();
  const auto s = evolve(k_short(), 11.0, c);
  CHECK(s.norm_tracked == doctest::Approx(std::exp(-11.0)).epsilon(1e-12));
  CHECK(s.norm_tracked == doctest::Approx(1.67e-5).epsilon(0.01));
  CHECK(std::abs(s.amplitude_norm() - 1.0) < 1e-12);

  const auto l = evolve(k_long(), 11.0, c);
  CHECK(l.norm_tracked == doctest::Approx(std::exp(-11.0 / c.tau_L)).epsilon(1e-12));
}

TEST_CASE("evolve at t = 0 is the identity and rejects negative time") {
  const auto& c = default_constants();
  const SingleKaonState x{Basis::STRANGENESS, {0.6, 0.0}, {0.0, 0.8}, 0.7};
  const auto y = evolve(x, 0.0, c);
  CHECK(y.amp0 == x.amp0);
  CHECK(y.amp1 == x.amp1);
  CHECK(y.norm_tracked == x.norm_tracked);
  CHECK_THROWS_AS(evolve(x, -1e-9, c), KaonError);
}

TEST_CASE("strangeness oscillation matches the closed-form K0 -> K0bar probability") {
  const auto& c = default_constants();
  for (double t : {0.5, 1.0, 3.0, 7.5, 12.0, 20.0}) {
    const auto s = evolve(k0(), t, c);
    CHECK(s.basis == Basis::STRANGENESS);
    const double p_bar = s.norm_tracked * std::norm(s.amp1);
    const double p_same = s.norm_tracked * std::norm(s.amp0);
    const double a = std::exp(-c.gamma_S * t), b = std::exp(-c.gamma_L * t);
    const double interference = 2.0 * std::exp(-0.5 * (c.gamma_S + c.gamma_L) * t) * std::cos(c.delta_m * t);
    CAPTURE(t);
    CHECK(p_bar == doctest::Approx(0.25 * (a + b - interference)).epsilon(1e-10));
    CHECK(p_same == doctest::Approx(0.25 * (a + b + interference)).epsilon(1e-10));
  }
}

TEST_CASE("evolve is a semigroup and norm_tracked never grows") {
  const auto& c = default_constants();
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> time(0.0, 15.0);
  for (int i = 0; i < 300; ++i) {
    const auto x = random_state(gen, i % 2 ? Basis::MASS : Basis::STRANGENESS);
    const double t1 = time(gen), t2 = time(gen);
    const auto once = evolve(x, t1 + t2, c);
    const auto first = evolve(x, t1, c);
    const auto twice = evolve(first, t2, c);
    CHECK(close(once.amp0, twice.amp0, 1e-10));
    CHECK(close(once.amp1, twice.amp1, 1e-10));
    CHECK(once.norm_tracked == doctest::Approx(twice.norm_tracked).epsilon(1e-10));
    CHECK(first.norm_tracked <= x.norm_tracked);
    CHECK(twice.norm_tracked <= first.norm_tracked);
  }
}

TEST_CASE("evolve survives extreme times without NaN") {
  const auto& c = default_constants();
  const auto s = evolve(k_short(), 5000.0, c);
  CHECK(s.norm_tracked == 0.0);
  CHECK(is_finite(s.amp0));
  const auto mixed = evolve(k0(), 5000.0, c);
  CHECK(is_finite(mixed.amp0));
  CHECK(std::abs(mixed.amplitude_norm() - 1.0) < 1e-12);
}
