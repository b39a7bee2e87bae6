#include <doctest.h>

#include <cmath>

#include "kaon/constants.hpp"
#include "kaon/decay_engine.hpp"
#include "kaon/error.hpp"
#include "oracles.hpp"

using namespace kaon;

namespace {

double br(const PhysicalConstants& c, Parent p, TagClass t) {
  double s = 0.0;
  for (const auto& ch : c.branching_table)
    if (ch.parent == p && ch.tag_class == t) s += ch.branching_ratio;
  return s;
}

// Brute-force decay mass in [a, b) of a population alive at t = 10.
double decay_mass_oracle(double gamma, double a, double b) {
  return oracle::trapezoid([gamma](double t) { return gamma * std::exp(-gamma * (t - 10.0)); }, a, b, 1000);
}

}  // namespace

TEST_CASE("survival fractions") {
  const auto& c = default_constants();
  const TaggingWindow w{10, 21};
  const double s = survival_fraction(w, Parent::KS, c);
  CHECK(std::abs(s - std::exp(-11.0)) < 1e-12);
  MESSAGE("undecayed K_S fraction " << s << " (reference 1.5e-5, ratio " << s / 1.5e-5 << ")");
  CHECK(s / 1.5e-5 < 1.2);
  CHECK(s / 1.5e-5 > 1.0 / 1.2);

  CHECK(survival_fraction(w, Parent::KL, c) == doctest::Approx(std::exp(-11.0 / c.tau_L)).epsilon(1e-14));
  CHECK(survival_fraction(w, Parent::KL, c) == doctest::Approx(0.981).epsilon(1e-3));
  CHECK(survival_fraction({12, 12}, Parent::KS, c) == 1.0);
  CHECK(survival_fraction({12, 12}, Parent::KL, c) == 1.0);
  CHECK_THROWS_AS(survival_fraction({-1, 2}, Parent::KS, c), KaonError);
  CHECK_THROWS_AS(survival_fraction({5, 2}, Parent::KS, c), KaonError);
}

TEST_CASE("untaggable fraction") {
  const auto& c = default_constants();
  const double u = untaggable_fraction({10, 21}, c);
  CHECK(u == doctest::Approx(-std::expm1(-11.0) * br(c, Parent::KS, TagClass::KL_LIKE)).epsilon(1e-13));
  MESSAGE("untaggable K_S fraction " << u << " (reference 7.2e-4, ratio " << u / 7.2e-4 << ")");
  CHECK(u / 7.2e-4 < 2.0);
  CHECK(u / 7.2e-4 > 0.5);
  CHECK(untaggable_fraction({10, 10}, c) == 0.0);

  PhysicalConstants all_tagged = c;
  for (auto& ch : all_tagged.branching_table)
    if (ch.parent == Parent::KS) ch.tag_class = TagClass::KS_TAG;
  CHECK(untaggable_fraction({10, 21}, all_tagged) == 0.0);

  PhysicalConstants no_ks = c;
  std::erase_if(no_ks.branching_table, [](const DecayChannel& ch) { return ch.parent == Parent::KS; });
  CHECK_THROWS_AS(untaggable_fraction({10, 21}, no_ks), KaonError);
}

TEST_CASE("misidentification budget") {
  const auto& c = default_constants();
  const auto b = misid_budget({10, 21}, c);
  CHECK(std::abs(b.m_S - (b.undecayed_fraction + b.untaggable_fraction)) < 1e-12);
  const double m_l = -std::expm1(-11.0 / c.tau_L) * br(c, Parent::KL, TagClass::KS_TAG);
  CHECK(b.m_L == doctest::Approx(m_l).epsilon(1e-13));
  MESSAGE("m_L " << b.m_L << " (reference 5.7e-5), m_S " << b.m_S << " (reference 7.3e-4)");
  CHECK(b.m_L == doctest::Approx(5.7e-5).epsilon(0.15));
  CHECK(b.m_S / 7.3e-4 < 2.0);
  CHECK(b.m_S / 7.3e-4 > 0.5);

  const auto z = misid_budget({10, 10}, c);
  CHECK(z.m_S == 1.0);
  CHECK(z.m_L == 0.0);

  // The two K_S pieces move in opposite directions with t1.
  double prev_undecayed = 2.0, prev_untaggable = -1.0;
  for (double t1 = 10.5; t1 <= 30.0; t1 += 0.5) {
    const auto x = misid_budget({10, t1}, c);
    CHECK(x.undecayed_fraction < prev_undecayed);
    CHECK(x.untaggable_fraction > prev_untaggable);
    CHECK(x.m_S >= 0.0);
    CHECK(x.m_S <= 1.0);
    CHECK(x.m_L >= 0.0);
    prev_undecayed = x.undecayed_fraction;
    prev_untaggable = x.untaggable_fraction;
  }

  const auto d = detection_with_budget(0.5, 0.25, {10, 21}, c);
  CHECK(d.eta == 0.5);
  CHECK(d.eta_prime == 0.25);
  CHECK(d.m_S == b.m_S);
  CHECK(d.m_L == b.m_L);
}

TEST_CASE("contamination histogram checkpoints") {
  const auto& c = default_constants();
  const auto bins = contamination_histogram(18, 23, 1, c);
  REQUIRE(bins.size() == 5);
  for (const auto& b : bins) MESSAGE("[" << b.start << ", " << b.end << ") ratio " << b.ratio);
  CHECK(bins[3].start == 21.0);
  CHECK(bins[3].ratio == doctest::Approx(0.50).epsilon(0.15));
  CHECK(bins[4].ratio == doctest::Approx(1.35).epsilon(0.15));
  for (std::size_t i = 1; i < bins.size(); ++i) CHECK(bins[i].ratio > bins[i - 1].ratio);

  CHECK(contamination_histogram(18, 23, 0.5, c).size() == 10);
}

TEST_CASE("contamination ratio matches numeric integration") {
  const auto& c = default_constants();
  const double brs = br(c, Parent::KS, TagClass::KS_TAG);
  const double brl = br(c, Parent::KL, TagClass::KS_TAG);
  for (const auto& b : contamination_histogram(10, 30, 1, c)) {
    const double expect =
        decay_mass_oracle(c.gamma_L, b.start, b.end) * brl / (decay_mass_oracle(c.gamma_S, b.start, b.end) * brs);
    CAPTURE(b.start);
    CHECK(std::abs(b.ratio / expect - 1.0) < 1e-6);
  }
  CHECK(bin_decay_mass(10, 11, Parent::KS, c) == doctest::Approx(-std::expm1(-1.0)).epsilon(1e-14));
}

TEST_CASE("contamination histogram errors") {
  const auto& c = default_constants();
  CHECK_THROWS_AS(contamination_histogram(9, 12, 1, c), KaonError);
  CHECK_THROWS_AS(contamination_histogram(18, 23, 0.7, c), KaonError);
  CHECK_THROWS_AS(contamination_histogram(18, 23, 0, c), KaonError);
  CHECK_THROWS_AS(contamination_histogram(23, 18, 1, c), KaonError);
  CHECK_THROWS_AS(contamination_ratio(9.5, 10.5, c), KaonError);
}

TEST_CASE("window end search") {
  const auto& c = default_constants();
  const auto half = max_window_end(0.5, c);
  MESSAGE("t1 for cap 0.5: " << half.t1);
  CHECK(std::abs(half.t1 - 21.0) <= 1.0);
  CHECK_FALSE(half.hit_upper_bound);
  CHECK(contamination_ratio(half.t1, half.t1 + 1.0, c) < 0.5);
  CHECK(contamination_ratio(half.t1 + 0.1, half.t1 + 1.1, c) >= 0.5);

  const auto big = max_window_end(1.35, c);
  CHECK(big.t1 >= 21.5);
  CHECK(big.t1 <= 23.0);

  const auto huge = max_window_end(1e6, c);
  CHECK(huge.hit_upper_bound);
  CHECK(huge.t1 == doctest::Approx(30.0));

  CHECK_THROWS_AS(max_window_end(1e-12, c), KaonError);
  CHECK_THROWS_AS(max_window_end(0.0, c), KaonError);
  CHECK_THROWS_AS(max_window_end(-1.0, c), KaonError);
  CHECK_THROWS_AS(max_window_end(INFINITY, c), KaonError);
}
