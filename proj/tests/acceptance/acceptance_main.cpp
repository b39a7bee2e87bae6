// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kaon/kaon.hpp"
#include "oracles.hpp"

using namespace kaon;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("violated: " + what);
    }
  }
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= budget_s) {
    v.pass = false;
    v.notes.push_back("runtime " + g(secs) + " s exceeds " + g(budget_s) + " s");
  }
  if (!v.pass) ++failures;
  std::printf("%s  %2d  %-34s %s  [%.3g s]\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), secs);
  for (const auto& n : v.notes) std::printf("          %s\n", n.c_str());
  std::fflush(stdout);
}

oracle::Ket4 mass_ket(Amplitude R, Amplitude Rp) {
  // R'|KS KS> + |KS KL> - |KL KS> + R|KL KL>, written with explicit kets.
  oracle::Ket4 psi{};
  psi = oracle::axpy(psi, Rp, oracle::tensor(oracle::ks(), oracle::ks()));
  psi = oracle::axpy(psi, 1.0, oracle::tensor(oracle::ks(), oracle::kl()));
  psi = oracle::axpy(psi, -1.0, oracle::tensor(oracle::kl(), oracle::ks()));
  psi = oracle::axpy(psi, R, oracle::tensor(oracle::kl(), oracle::kl()));
  const double n = std::sqrt(std::real(oracle::inner(psi, psi)));
  for (auto& a : psi) a /= n;
  return psi;
}

double oracle_entropy(Amplitude R, Amplitude Rp) {
  const auto rho = oracle::partial_trace_right(mass_ket(R, Rp));
  const double tr = rho[0][0].real() + rho[1][1].real();
  const double det = (rho[0][0] * rho[1][1] - rho[0][1] * rho[1][0]).real();
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  return oracle::entropy_bits({0.5 * (tr + disc), 0.5 * (tr - disc)});
}

double decay_mass(double gamma, double a, double b) {
  return oracle::trapezoid([gamma](double t) { return gamma * std::exp(-gamma * (t - 10.0)); }, a, b, 1000);
}

std::string event_stream(const EventSource& src, const DetectionModel& d, unsigned workers, std::uint64_t n) {
  std::ostringstream out;
  RunOptions o;
  o.n_events = n;
  o.seed = 7;
  o.workers = workers;
  o.block_size = 50000;
  monte_carlo_run(src, d, default_constants(), o, [&](std::span<const EventRecord> evs) { write_events(out, evs); });
  return out.str();
}

}  // namespace

int main() {
  const PhysicalConstants& c = default_constants();
  std::printf("constants fingerprint %s, tau_L/tau_S = %.6g\n\n", c.fingerprint.c_str(), c.tau_L);

  criterion(1, "entropy endpoints", 1.0, [&] {
    Verdict v;
    const double s0 = entanglement_entropy(build_phi_mass_basis(0.0, 0.0));
    v.require(std::abs(s0 - 1.0) < 1e-10, "S(R=0) = 1 within 1e-10");
    double worst = 0.0;
    for (double r : {1.0, -1.0}) {
      // |r| = 1 sits on the boundary of the regeneration domain, so the T = 0
      // coefficients R = -r, R' = r are written out directly.
      const double s = entanglement_entropy(build_phi_mass_basis(-r, r));
      worst = std::max(worst, std::abs(s));
      v.require(std::abs(s) < 1e-10, "S(r=" + g(r) + ", T=0) = 0 within 1e-10");
    }
    v.detail = "S(R=0)=" + g(s0) + "  max S(r=+-1,T=0)=" + g(worst);
    return v;
  });

  criterion(2, "entropy at R = -1", 1.0, [&] {
    Verdict v;
    const double s = entanglement_entropy(build_phi_mass_basis(-1.0, 0.0));
    const double o = oracle_entropy(-1.0, 0.0);
    const double jac = oracle::entropy_bits(oracle::jacobi_eigenvalues(oracle::partial_trace_left(mass_ket(-1.0, 0.0))));
    v.require(std::abs(s - o) < 1e-10, "agreement with the quadratic-formula oracle within 1e-10");
    v.require(std::abs(s - jac) < 1e-10, "agreement with the Jacobi oracle within 1e-10");
    v.detail = "S=" + g(s) + " oracle=" + g(o) + " |diff|=" + g(std::abs(s - o)) + "  reference 0.59";
    if (s < 0.50 || s > 0.65)
      v.notes.push_back("FLAG: outside the [0.50, 0.65] band around the reference value (not a failure)");
    else
      v.notes.push_back("reference comparison: S - 0.59 = " + g(s - 0.59) + ", inside [0.50, 0.65]");
    return v;
  });

  criterion(3, "Hardy pattern at R = -1", 1.0, [&] {
    Verdict v;
    const auto p = qm_probability_set(Amplitude{-1.0}, DetectionModel{});
    v.require(std::abs(p.p_k0_k0bar - 1.0 / 12.0) < 1e-15, "P(K0,K0bar) = 1/12 at eta = eta' = 1");
    const double zero = std::max({p.p_k0_kl, p.p_kl_k0bar, p.p_ks_ks});
    v.require(zero < 1e-12, "three zeros below 1e-12");
    double worst = 0.0;
    for (double eta : {0.9, 0.5, 0.023, 1e-3})
      for (double etap : {1.0, 0.3, 1e-2}) {
        DetectionModel d;
        d.eta = eta;
        d.eta_prime = etap;
        const double got = qm_probability_set(Amplitude{-1.0}, d).p_k0_k0bar;
        worst = std::max(worst, std::abs(got / (eta * etap / 12.0) - 1.0));
      }
    v.require(worst < 1e-13, "P(K0,K0bar) = eta eta'/12 across efficiencies");
    v.detail = "P(K0,K0bar)=" + g(p.p_k0_k0bar) + " max zero=" + g(zero) + " max rel dev=" + g(worst);
    return v;
  });

  criterion(4, "falsification threshold", 1e-3, [&] {
    Verdict v;
    const double t = threshold_falsification(7.3e-4);
    v.require(t >= 0.0930 && t <= 0.0940, "threshold in [0.0930, 0.0940]");
    v.detail = "eta > " + g(t) + "  (reference: > 9%)";
    return v;
  });

  criterion(5, "Clauser-Horne threshold", 1.0, [&] {
    Verdict v;
    const double t = threshold_ch(7.3e-4, 5.7e-5);
    const double t_l = threshold_ch(0.0, 5.7e-5);
    v.require(t >= 0.0218 && t <= 0.0242, "threshold in [0.0218, 0.0242]");
    v.require(t_l > 0.9 * t, "m_L dominates: threshold(0, m_L) > 0.9 threshold(m_S, m_L)");
    v.detail = "eta > " + g(t) + "  m_L only " + g(t_l) + " (" + g(t_l / t) + " of full)";
    return v;
  });

  criterion(6, "misidentification budget (10, 21)", 1.0, [&] {
    Verdict v;
    const auto b = misid_budget({10, 21}, c);
    v.require(std::abs(b.m_L / 5.7e-5 - 1.0) <= 0.15, "m_L within 15% of 5.7e-5");
    v.require(std::abs(b.undecayed_fraction - std::exp(-11.0)) < 1e-12, "undecayed fraction = e^-11 within 1e-12");
    const double ru = b.undecayed_fraction / 1.5e-5;
    v.require(ru <= 1.2 && ru >= 1.0 / 1.2, "undecayed fraction within factor 1.2 of 1.5e-5");
    const double rt = b.untaggable_fraction / 7.2e-4;
    v.require(rt <= 2.0 && rt >= 0.5, "untaggable fraction within factor 2 of 7.2e-4");
    v.detail = "m_L=" + g(b.m_L) + " undecayed=" + g(b.undecayed_fraction) + " untaggable=" + g(b.untaggable_fraction);
    v.notes.push_back("reference: m_L 5.7e-5, undecayed 1.5e-5 (ratio " + g(ru) + "), untaggable 7.2e-4 (ratio " + g(rt) +
                      "), m_S " + g(b.m_S) + " vs 7.3e-4");
    return v;
  });

  criterion(7, "contamination histogram", 1.0, [&] {
    Verdict v;
    const auto bins = contamination_histogram(18, 23, 1, c);
    v.require(bins.size() == 5, "five 1 tau_S bins from 18 to 23");
    if (bins.size() != 5) return v;
    v.require(std::abs(bins[3].ratio / 0.50 - 1.0) <= 0.15, "[21,22) within 15% of 0.50");
    v.require(std::abs(bins[4].ratio / 1.35 - 1.0) <= 0.15, "[22,23) within 15% of 1.35");
    double worst = 0.0;
    const double brs = c.branching_sum(Parent::KS, TagClass::KS_TAG);
    const double brl = c.branching_sum(Parent::KL, TagClass::KS_TAG);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (i > 0) v.require(bins[i].ratio > bins[i - 1].ratio, "ratios increase from bin to bin");
      const double o = decay_mass(c.gamma_L, bins[i].start, bins[i].end) * brl /
                       (decay_mass(c.gamma_S, bins[i].start, bins[i].end) * brs);
      worst = std::max(worst, std::abs(bins[i].ratio / o - 1.0));
    }
    v.require(worst < 1e-6, "numeric-integration oracle within 1e-6 relative");
    v.detail = "[21,22)=" + g(bins[3].ratio) + " [22,23)=" + g(bins[4].ratio) + " oracle dev=" + g(worst);
    return v;
  });

  criterion(8, "evading local model at eta = 1e-3", 60.0, [&] {
    Verdict v;
    const auto d = detection_with_budget(1e-3, 1e-3, {10, 21}, c);
    const auto e = construct_evading_lhv(d, c);
    const auto got = lhv_probability_set(e, d, c);
    const auto want = measured_probabilities(d);
    const double dev = std::max({std::abs(got.p_k0_k0bar - want.p_k0_k0bar), std::abs(got.p_k0_kl - want.p_k0_kl),
                                 std::abs(got.p_kl_k0bar - want.p_kl_k0bar), std::abs(got.p_ks_ks - want.p_ks_ks)});
    v.require(dev < 1e-6, "exact probabilities match the measured set within 1e-6");

    RunOptions o;
    o.n_events = 10'000'000;
    o.seed = 7;
    o.workers = std::max(1u, std::thread::hardware_concurrency());
    const auto run = monte_carlo_run(LhvSource{e}, d, c, o);
    const auto& k = run.counts;
    v.require(k.genuine_ks_ks == 0, "no in-window K_S K_S pair");
    const double p = d.eta * d.eta_prime / 12.0;
    const double n = static_cast<double>(k.n_setting[0][0]);
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    const double pull = std::abs(static_cast<double>(k.k0_k0bar) / n - p) / sigma;
    v.require(pull <= 3.0, "K0 K0bar rate within 3 sigma of eta eta'/12");
    v.detail = "max dev=" + g(dev) + " in-window KSKS=" + std::to_string(k.genuine_ks_ks) +
               " K0K0bar=" + std::to_string(k.k0_k0bar) + "/" + std::to_string(k.n_setting[0][0]) +
               " (" + g(pull) + " sigma)";
    v.notes.push_back("KS KS tags from misread K_L: " + std::to_string(k.ks_ks) + " of " +
                      std::to_string(k.n_setting[1][1]) + " (expected rate " + g(want.p_ks_ks) + ")");
    return v;
  });

  criterion(9, "evading local model at eta = 0.2", 1.0, [&] {
    Verdict v;
    const auto d = detection_with_budget(0.2, 0.2, {10, 21}, c);
    try {
      construct_evading_lhv(d, c);
      v.require(false, "construction must be refused");
      v.detail = "constructed";
    } catch (const KaonError& err) {
      const std::string msg = err.what();
      v.require(err.code() == "infeasible", "error code 'infeasible'");
      v.require(msg.find("falsification threshold") != std::string::npos, "message cites the falsification bound");
      v.detail = "refused: " + msg.substr(0, 90) + "...";
    }
    return v;
  });

  criterion(10, "determinism across workers", 60.0, [&] {
    Verdict v;
    const auto d = detection_with_budget(0.3, 0.3, {10, 21}, c);
    const auto ed = detection_with_budget(1e-3, 1e-3, {10, 21}, c);
    const EventSource qm = qm_source(-1.0);
    const EventSource lhv = LhvSource{construct_evading_lhv(ed, c)};
    const std::uint64_t n = 300000;
    const std::string q1 = event_stream(qm, d, 1, n);
    const std::string l1 = event_stream(lhv, ed, 1, n);
    std::string hashes;
    for (unsigned w : {2u, 4u, 7u}) {
      v.require(event_stream(qm, d, w, n) == q1, "QM stream identical with " + std::to_string(w) + " workers");
      v.require(event_stream(lhv, ed, w, n) == l1, "LHV stream identical with " + std::to_string(w) + " workers");
    }
    v.detail = "QM " + fnv1a_hex(q1) + "  LHV " + fnv1a_hex(l1) + "  (" + std::to_string(n) + " events, 1/2/4/7 workers)";
    return v;
  });

  std::printf("\n%d of 10 criteria failed\n", failures);
  return failures;
}
