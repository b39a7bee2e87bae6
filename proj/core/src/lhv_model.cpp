#include "kaon/lhv_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kaon/decay_engine.hpp"
#include "kaon/error.hpp"

namespace kaon {

std::string_view to_string(StrangenessResponse r) {
  switch (r) {
    case StrangenessResponse::K0: return "K0";
    case StrangenessResponse::K0BAR: return "K0BAR";
    case StrangenessResponse::NONE: return "NONE";
  }
  return "NONE";
}

double HiddenVariableEnsemble::total_weight() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.weight;
  return sum;
}

void validate(const HiddenVariableEnsemble& e, const PhysicalConstants& c) {
  if (e.entries.empty()) throw KaonError("invariant", "ensemble is empty");
  for (const auto& entry : e.entries) {
    if (!(entry.weight >= 0.0) || !std::isfinite(entry.weight))
      throw KaonError("invariant", "ensemble weights must be finite and >= 0");
    for (const KaonAssignment* k : {&entry.assignment.left, &entry.assignment.right}) {
      if (!(k->decay.time >= kReferenceTime))
        throw KaonError("invariant", "decay times must not precede the reference time");
      const DecayChannel* ch = c.find_channel(k->decay.channel);
      if (ch == nullptr) throw KaonError("invariant", "unknown decay channel '" + k->decay.channel + "'");
      if (ch->parent != k->mass)
        throw KaonError("invariant", "channel '" + ch->id + "' does not belong to the assigned mass eigenstate");
    }
  }
  if (std::abs(e.total_weight() - 1.0) > 1e-10) throw KaonError("invariant", "ensemble weights do not sum to 1");
}

Outcome lifetime_tag(const KaonAssignment& k, const TaggingWindow& w, const PhysicalConstants& c) {
  const DecayChannel* ch = c.find_channel(k.decay.channel);
  if (ch == nullptr) throw KaonError("invariant", "unknown decay channel '" + k.decay.channel + "'");
  return (w.contains(k.decay.time) && ch->tag_class == TagClass::KS_TAG) ? Outcome::KS : Outcome::KL;
}

double response(const KaonAssignment& k, Outcome o, EfficiencyModel model, const DetectionModel& d,
                const PhysicalConstants& c) {
  if (!is_strangeness(o)) return lifetime_tag(k, d.window, c) == o ? 1.0 : 0.0;
  const StrangenessResponse want = o == Outcome::K0 ? StrangenessResponse::K0 : StrangenessResponse::K0BAR;
  if (k.strangeness != want) return 0.0;
  return model == EfficiencyModel::THINNING ? d.efficiency(o) : 1.0;
}

double lhv_joint_probability(const HiddenVariableEnsemble& e, Outcome left, Outcome right,
                             const DetectionModel& d, const PhysicalConstants& c) {
  double p = 0.0;
  for (const auto& entry : e.entries) {
    if (entry.weight == 0.0) continue;
    p += entry.weight * response(entry.assignment.left, left, e.efficiency, d, c) *
         response(entry.assignment.right, right, e.efficiency, d, c);
  }
  return p;
}

double lhv_marginal(const HiddenVariableEnsemble& e, Side side, Outcome o, const DetectionModel& d,
                    const PhysicalConstants& c) {
  double p = 0.0;
  for (const auto& entry : e.entries) {
    const KaonAssignment& k = side == Side::LEFT ? entry.assignment.left : entry.assignment.right;
    p += entry.weight * response(k, o, e.efficiency, d, c);
  }
  return p;
}

ProbabilitySet lhv_probability_set(const HiddenVariableEnsemble& e, const DetectionModel& d,
                                   const PhysicalConstants& c) {
  return {lhv_joint_probability(e, Outcome::K0, Outcome::K0BAR, d, c),
          lhv_joint_probability(e, Outcome::K0, Outcome::KL, d, c),
          lhv_joint_probability(e, Outcome::KL, Outcome::K0BAR, d, c),
          lhv_joint_probability(e, Outcome::KS, Outcome::KS, d, c)};
}

double genuine_ks_ks(const HiddenVariableEnsemble& e, const DetectionModel& d, const PhysicalConstants& c) {
  double p = 0.0;
  for (const auto& entry : e.entries) {
    const auto& [l, r] = entry.assignment;
    if (l.mass == Parent::KS && r.mass == Parent::KS && lifetime_tag(l, d.window, c) == Outcome::KS &&
        lifetime_tag(r, d.window, c) == Outcome::KS)
      p += entry.weight;
  }
  return p;
}

HardyReport hardy_constraint_check(const HiddenVariableEnsemble& e, const DetectionModel& d,
                                   const PhysicalConstants& c) {
  HardyReport rep;
  for (const auto& entry : e.entries) {
    const auto& [l, r] = entry.assignment;
    const double w = entry.weight;
    const bool left_k0 = l.strangeness == StrangenessResponse::K0;
    const bool right_k0bar = r.strangeness == StrangenessResponse::K0BAR;
    if (left_k0 && right_k0bar) rep.mass_A += w;
    if (left_k0 && r.mass == Parent::KL) rep.p_k0_kl_mass += w;
    if (l.mass == Parent::KL && right_k0bar) rep.p_kl_k0bar_mass += w;
    if (l.mass == Parent::KS && r.mass == Parent::KS) rep.p_ks_ks_mass += w;
  }
  rep.p_ks_ks_window = genuine_ks_ks(e, d, c);
  rep.zeros_reproduced = rep.p_k0_kl_mass <= 1e-12 && rep.p_kl_k0bar_mass <= 1e-12;
  rep.bound_holds = rep.p_ks_ks_mass >= rep.mass_A - 1e-15;
  rep.escape_exhibited = rep.p_ks_ks_window < rep.mass_A;
  return rep;
}

namespace {

const DecayChannel& pick_channel(const PhysicalConstants& c, Parent parent, TagClass tag) {
  const DecayChannel* best = nullptr;
  for (const auto& ch : c.branching_table)
    if (ch.parent == parent && ch.tag_class == tag && (best == nullptr || ch.branching_ratio > best->branching_ratio))
      best = &ch;
  if (best == nullptr) {
    std::ostringstream msg;
    msg << "branching_table has no " << to_string(parent) << " channel classed " << to_string(tag);
    throw KaonError("classification", msg.str());
  }
  return *best;
}

std::string format_sci(double v) {
  std::ostringstream s;
  s.precision(4);
  s << std::scientific << v;
  return s.str();
}

}  // namespace

HiddenVariableEnsemble construct_evading_lhv(const DetectionModel& d, const PhysicalConstants& c,
                                             const EvadingOptions& options) {
  validate(d);
  const ProbabilitySet target = measured_probabilities(d);
  const double a = target.p_k0_k0bar;
  const double b = target.p_k0_kl;
  const double cc = target.p_kl_k0bar;
  const double dd = target.p_ks_ks;

  if (a > d.m_S) {
    throw KaonError("infeasible",
                    "eta*eta'/12 = " + format_sci(a) + " exceeds the K_S misidentification budget m_S = " +
                        format_sci(d.m_S) + "; falsification threshold eta = eta' > " +
                        format_sci(threshold_falsification(d.m_S)) + ", no local model can hide the K0/K0bar pairs");
  }
  if (a > b + cc + dd) {
    throw KaonError("infeasible", "measured probabilities violate the Clauser-Horne-like inequality (margin " +
                                      format_sci(a - b - cc - dd) + "); CH threshold eta = eta' > " +
                                      format_sci(threshold_ch(d.m_S, d.m_L)));
  }

  const TaggingWindow& w = d.window;
  const double t_in = w.t0 + std::min(1.0, 0.5 * w.length());
  const double t_out = w.t1 + options.escape_offset;
  if (!(options.escape_offset > 0.0)) throw KaonError("domain", "escape_offset must be positive");

  const DecayChannel& ks_tag = pick_channel(c, Parent::KS, TagClass::KS_TAG);
  const DecayChannel& kl_pipi = pick_channel(c, Parent::KL, TagClass::KS_TAG);
  const DecayChannel& kl_bulk = pick_channel(c, Parent::KL, TagClass::KL_LIKE);

  using SR = StrangenessResponse;
  auto ks_tagged = [&](SR s) { return KaonAssignment{s, Parent::KS, {ks_tag.id, t_in}}; };
  auto ks_escaping = [&](SR s) {
    if (options.escape == EvadingOptions::Escape::CHANNEL)
      return KaonAssignment{s, Parent::KS, {pick_channel(c, Parent::KS, TagClass::KL_LIKE).id, t_in}};
    return KaonAssignment{s, Parent::KS, {ks_tag.id, t_out}};
  };
  auto kl_misid = [&](SR s) { return KaonAssignment{s, Parent::KL, {kl_pipi.id, t_in}}; };
  auto kl_plain = [&](SR s) { return KaonAssignment{s, Parent::KL, {kl_bulk.id, t_out}}; };

  // Split the K0/K0bar weight between entries that feed P(K0,KL) and
  // P(KL,K0bar) through the escaping side. Only what does not fit there goes
  // to K_L pairs misread as K_S K_S.
  double a_b = 0.0, a_c = 0.0, a_d = 0.0;
  if (b + cc >= a) {
    if (b + cc > 0.0) {
      a_b = a * b / (b + cc);
      a_c = a - a_b;
    }
  } else {
    a_b = b;
    a_c = cc;
    a_d = a - b - cc;
  }

  HiddenVariableEnsemble e;
  e.efficiency = EfficiencyModel::ABSORBED;
  auto add = [&](KaonAssignment l, KaonAssignment r, double weight) {
    if (weight > 0.0) e.entries.push_back({{std::move(l), std::move(r)}, weight});
  };

  add(ks_tagged(SR::K0), ks_escaping(SR::K0BAR), a_b);
  add(ks_escaping(SR::K0), ks_tagged(SR::K0BAR), a_c);
  add(kl_misid(SR::K0), kl_misid(SR::K0BAR), a_d);
  add(ks_tagged(SR::K0), ks_escaping(SR::NONE), b - a_b);
  add(ks_escaping(SR::NONE), ks_tagged(SR::K0BAR), cc - a_c);

  const double d_rest = dd - a_d;
  if (dd > 0.0) {
    const double single = d_rest * (d.m_L / 3.0) / dd;
    add(ks_tagged(SR::NONE), kl_misid(SR::NONE), single);
    add(kl_misid(SR::NONE), ks_tagged(SR::NONE), single);
    add(kl_misid(SR::NONE), kl_misid(SR::NONE), d_rest - 2.0 * single);
  }

  const double rest = 1.0 - (b + cc + dd);
  add(ks_tagged(SR::NONE), kl_plain(SR::NONE), 0.5 * rest);
  add(kl_plain(SR::NONE), ks_tagged(SR::NONE), 0.5 * rest);

  validate(e, c);
  return e;
}

}  // namespace kaon
