#include "kaon/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kaon/decay_engine.hpp"
#include "kaon/error.hpp"
#include "kaon/parallel.hpp"
#include "kaon/rng.hpp"

namespace kaon {

std::string_view to_string(Tag t) {
  switch (t) {
    case Tag::K0: return "K0";
    case Tag::K0BAR: return "K0BAR";
    case Tag::KS: return "KS";
    case Tag::KL: return "KL";
    case Tag::UNTAGGED: return "UNTAGGED";
  }
  return "UNTAGGED";
}

std::string_view to_string(Truth t) { return t == Truth::QM ? "QM" : "LHV"; }

Tag parse_tag(std::string_view s) {
  if (s == "K0") return Tag::K0;
  if (s == "K0BAR") return Tag::K0BAR;
  if (s == "KS") return Tag::KS;
  if (s == "KL") return Tag::KL;
  if (s == "UNTAGGED") return Tag::UNTAGGED;
  throw KaonError("parse", "unknown tag '" + std::string(s) + "'");
}

Truth parse_truth(std::string_view s) {
  if (s == "QM") return Truth::QM;
  if (s == "LHV") return Truth::LHV;
  throw KaonError("parse", "unknown truth '" + std::string(s) + "'");
}

void HardyCounts::add(const EventRecord& ev) {
  ++n_events;
  const int ls = strangeness_setting(ev.left_tag) ? 0 : 1;
  const int rs = strangeness_setting(ev.right_tag) ? 0 : 1;
  ++n_setting[ls][rs];
  ++tag_pairs[static_cast<int>(ev.left_tag)][static_cast<int>(ev.right_tag)];
  if (ev.left_tag == Tag::K0 && ev.right_tag == Tag::K0BAR) ++k0_k0bar;
  if (ev.left_tag == Tag::K0 && ev.right_tag == Tag::KL) ++k0_kl;
  if (ev.left_tag == Tag::KL && ev.right_tag == Tag::K0BAR) ++kl_k0bar;
  if (ev.left_tag == Tag::KS && ev.right_tag == Tag::KS) {
    ++ks_ks;
    if (ev.left_mass == Parent::KS && ev.right_mass == Parent::KS) ++genuine_ks_ks;
  }
}

void HardyCounts::merge(const HardyCounts& o) {
  n_events += o.n_events;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) n_setting[i][j] += o.n_setting[i][j];
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) tag_pairs[i][j] += o.tag_pairs[i][j];
  k0_k0bar += o.k0_k0bar;
  k0_kl += o.k0_kl;
  kl_k0bar += o.kl_k0bar;
  ks_ks += o.ks_ks;
  genuine_ks_ks += o.genuine_ks_ks;
}

VerdictReport falsification_verdict(const HardyCounts& counts, const DetectionModel& d) {
  VerdictReport v;
  v.counts = counts;
  v.n_events = counts.n_events;
  v.m_S_budget = d.m_S;
  auto estimate = [](std::uint64_t k, std::uint64_t n, double& p, double& se) {
    if (n == 0) {
      p = se = 0.0;
      return;
    }
    p = static_cast<double>(k) / static_cast<double>(n);
    se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  };
  estimate(counts.k0_k0bar, counts.n_setting[0][0], v.p_measured.p_k0_k0bar, v.standard_error.p_k0_k0bar);
  estimate(counts.k0_kl, counts.n_setting[0][1], v.p_measured.p_k0_kl, v.standard_error.p_k0_kl);
  estimate(counts.kl_k0bar, counts.n_setting[1][0], v.p_measured.p_kl_k0bar, v.standard_error.p_kl_k0bar);
  estimate(counts.ks_ks, counts.n_setting[1][1], v.p_measured.p_ks_ks, v.standard_error.p_ks_ks);
  v.ch_margin = ch_margin(v.p_measured);
  const auto& se = v.standard_error;
  v.ch_margin_error = std::sqrt(se.p_k0_k0bar * se.p_k0_k0bar + se.p_k0_kl * se.p_k0_kl +
                                se.p_kl_k0bar * se.p_kl_k0bar + se.p_ks_ks * se.p_ks_ks);
  v.falsification_pass = v.p_measured.p_k0_k0bar > d.m_S;
  v.ch_pass = v.ch_margin > 0.0;
  return v;
}

QmSource qm_source(Amplitude R) { return {build_phi_strangeness_basis(R)}; }

namespace {

Tag tag_of(Outcome o) {
  switch (o) {
    case Outcome::K0: return Tag::K0;
    case Outcome::K0BAR: return Tag::K0BAR;
    case Outcome::KS: return Tag::KS;
    case Outcome::KL: return Tag::KL;
  }
  return Tag::UNTAGGED;
}

// Born table per setting pair: cumulative probabilities over the four
// outcome pairs (index 2 * left + right in each side's natural basis).
class QmSampler {
 public:
  QmSampler(const TwoKaonState& s, const DetectionModel& d, const PhysicalConstants& c) : d_(d), c_(c) {
    const DetectionModel ideal{};
    for (int ls = 0; ls < 2; ++ls)
      for (int rs = 0; rs < 2; ++rs) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          acc += joint_probability(s, outcome(ls, k / 2), outcome(rs, k % 2), ideal);
          cumulative_[ls][rs][k] = acc;
        }
      }
  }

  EventRecord sample(std::uint64_t id, EventStream& rng) const {
    EventRecord ev;
    ev.event_id = id;
    ev.truth = Truth::QM;
    const int ls = rng.bernoulli(0.5) ? 0 : 1;
    const int rs = rng.bernoulli(0.5) ? 0 : 1;
    const auto& cum = cumulative_[ls][rs];
    const double u = rng.uniform() * cum[3];
    int k = 0;
    while (k < 3 && u >= cum[k]) ++k;
    side(outcome(ls, k / 2), rng, ev.left_tag, ev.left_t, ev.left_mass);
    side(outcome(rs, k % 2), rng, ev.right_tag, ev.right_t, ev.right_mass);
    return ev;
  }

 private:
  static Outcome outcome(int setting, int index) {
    if (setting == 0) return index == 0 ? Outcome::K0 : Outcome::K0BAR;
    return index == 0 ? Outcome::KS : Outcome::KL;
  }

  void side(Outcome o, EventStream& rng, Tag& tag, double& t, std::optional<Parent>& mass) const {
    const TaggingWindow& w = d_.window;
    if (is_strangeness(o)) {
      tag = rng.bernoulli(d_.efficiency(o)) ? tag_of(o) : Tag::UNTAGGED;
      t = w.t0;
      return;
    }
    const Parent truth = o == Outcome::KS ? Parent::KS : Parent::KL;
    mass = truth;
    const bool flip = rng.bernoulli(truth == Parent::KS ? d_.m_S : d_.m_L);
    const bool tagged_ks = (truth == Parent::KS) != flip;
    tag = tagged_ks ? Tag::KS : Tag::KL;
    const double g = c_.width(truth);
    if (tagged_ks)
      t = w.t0 + rng.truncated_exponential(g, w.length());
    else if (truth == Parent::KS)
      t = w.t1 + rng.exponential(g);
    else
      t = w.t0 + rng.exponential(g);
  }

  std::array<std::array<std::array<double, 4>, 2>, 2> cumulative_{};
  DetectionModel d_;
  const PhysicalConstants& c_;
};

class LhvSampler {
 public:
  LhvSampler(const HiddenVariableEnsemble& e, const DetectionModel& d, const PhysicalConstants& c)
      : e_(e), d_(d) {
    validate(e, c);
    double acc = 0.0;
    for (const auto& entry : e.entries) {
      acc += entry.weight;
      cumulative_.push_back(acc);
      tags_.push_back({tag_of(lifetime_tag(entry.assignment.left, d.window, c)),
                       tag_of(lifetime_tag(entry.assignment.right, d.window, c))});
    }
  }

  EventRecord sample(std::uint64_t id, EventStream& rng) const {
    EventRecord ev;
    ev.event_id = id;
    ev.truth = Truth::LHV;
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t i = std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
    const HiddenAssignment& a = e_.entries[i].assignment;
    const bool left_strange = rng.bernoulli(0.5);
    const bool right_strange = rng.bernoulli(0.5);
    side(a.left, tags_[i][0], left_strange, rng, ev.left_tag, ev.left_t, ev.left_mass);
    side(a.right, tags_[i][1], right_strange, rng, ev.right_tag, ev.right_t, ev.right_mass);
    return ev;
  }

 private:
  void side(const KaonAssignment& k, Tag lifetime, bool strange, EventStream& rng, Tag& tag, double& t,
            std::optional<Parent>& mass) const {
    if (strange) {
      t = d_.window.t0;
      if (k.strangeness == StrangenessResponse::NONE) {
        tag = Tag::UNTAGGED;
        return;
      }
      const Outcome o = k.strangeness == StrangenessResponse::K0 ? Outcome::K0 : Outcome::K0BAR;
      const bool detected = e_.efficiency == EfficiencyModel::ABSORBED || rng.bernoulli(d_.efficiency(o));
      tag = detected ? tag_of(o) : Tag::UNTAGGED;
      return;
    }
    tag = lifetime;
    t = k.decay.time;
    mass = k.mass;
  }

  const HiddenVariableEnsemble& e_;
  DetectionModel d_;
  std::vector<double> cumulative_;
  std::vector<std::array<Tag, 2>> tags_;
};

template <class Sampler>
HardyCounts run_with(const Sampler& sampler, const RunOptions& options, const EventSink& sink) {
  HardyCounts total;
  const std::uint64_t block = std::max<std::uint64_t>(1, options.block_size);
  std::vector<EventRecord> buffer;
  for (std::uint64_t first = 0; first < options.n_events; first += block) {
    const std::uint64_t count = std::min(block, options.n_events - first);
    buffer.resize(count);
    parallel_ranges(count, options.workers, [&](std::uint64_t begin, std::uint64_t end) {
      for (std::uint64_t k = begin; k < end; ++k) {
        EventStream rng(options.seed, first + k);
        buffer[k] = sampler.sample(first + k, rng);
      }
    });
    for (const auto& ev : buffer) total.add(ev);
    if (sink) sink(std::span<const EventRecord>(buffer));
  }
  return total;
}

}  // namespace

RunResult monte_carlo_run(const EventSource& source, const DetectionModel& d, const PhysicalConstants& c,
                          const RunOptions& options, const EventSink& sink) {
  validate(d);
  if (options.n_events < 1) throw KaonError("domain", "monte_carlo_run: n_events must be >= 1");
  RunResult result;
  if (const auto* qm = std::get_if<QmSource>(&source)) {
    if (std::abs(qm->state.norm() - 1.0) > 1e-12) throw KaonError("invariant", "QM source state is not normalized");
    result.counts = run_with(QmSampler(qm->state, d, c), options, sink);
  } else {
    result.counts = run_with(LhvSampler(std::get<LhvSource>(source).ensemble, d, c), options, sink);
  }
  result.verdict = falsification_verdict(result.counts, d);
  result.verdict.seed = options.seed;
  return result;
}

}  // namespace kaon
