#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "kaon/kaon.hpp"

namespace kaon::cli {
namespace {

using json = nlohmann::ordered_json;

#ifndef KAON_VERSION
#define KAON_VERSION "0.0.0"
#endif

// Reference values for the (10, 21) tau_S window; `thresholds` uses
// them unless told otherwise.
constexpr double kReferenceMS = 7.3e-4;
constexpr double kReferenceML = 5.7e-5;

json num(double v) { return round12(v); }

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || !std::isfinite(v))
    throw KaonError("usage", std::string(what) + ": not a number '" + std::string(s) + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s, std::size_t n, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(':', start);
    out.push_back(parse_double(std::string_view(s).substr(start, pos - start), what));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (out.size() != n)
    throw KaonError("usage", std::string(what) + ": expected " + std::to_string(n) + " values separated by ':'");
  return out;
}

TaggingWindow parse_window(const std::string& s) {
  const auto v = parse_list(s, 2, "--window");
  TaggingWindow w{v[0], v[1]};
  validate(w);
  return w;
}

std::uint64_t parse_count(const std::string& s, std::string_view what) {
  const double v = parse_double(s, what);
  if (v < 1.0 || v != std::floor(v) || v > 9007199254740992.0)
    throw KaonError("usage", std::string(what) + ": expected a positive integer, got '" + s + "'");
  return static_cast<std::uint64_t>(v);
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, format_number(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string key_value_csv(const json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::string text = "key,value\n";
  for (const auto& [k, v] : rows) text += csv_field(k) + ',' + csv_field(v) + '\n';
  return text;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json probabilities_json(const ProbabilitySet& p) {
  return {{"p_k0_k0bar", num(p.p_k0_k0bar)},
          {"p_k0_kl", num(p.p_k0_kl)},
          {"p_kl_k0bar", num(p.p_kl_k0bar)},
          {"p_ks_ks", num(p.p_ks_ks)}};
}

json verdict_json(const VerdictReport& v) {
  const auto& k = v.counts;
  json counts = {{"n_events", k.n_events},
                 {"n_setting",
                  {{"strangeness_strangeness", k.n_setting[0][0]},
                   {"strangeness_lifetime", k.n_setting[0][1]},
                   {"lifetime_strangeness", k.n_setting[1][0]},
                   {"lifetime_lifetime", k.n_setting[1][1]}}},
                 {"k0_k0bar", k.k0_k0bar},
                 {"k0_kl", k.k0_kl},
                 {"kl_k0bar", k.kl_k0bar},
                 {"ks_ks", k.ks_ks},
                 {"genuine_ks_ks", k.genuine_ks_ks}};
  json j = {{"p_measured", probabilities_json(v.p_measured)},
            {"standard_error", probabilities_json(v.standard_error)},
            {"ch_margin", num(v.ch_margin)},
            {"ch_margin_error", num(v.ch_margin_error)},
            {"m_S_budget", num(v.m_S_budget)},
            {"falsification_pass", v.falsification_pass},
            {"ch_pass", v.ch_pass},
            {"counts", std::move(counts)},
            {"n_events", v.n_events}};
  j["seed"] = v.seed ? json(*v.seed) : json(nullptr);
  return j;
}

struct Globals {
  std::string constants_path;
  std::string format;
  std::string out_path;
  std::uint64_t seed = 1;
  bool no_manifest = false;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  const PhysicalConstants& constants() {
    if (!constants_) {
      constants_ = g_.constants_path.empty()
                       ? std::make_unique<PhysicalConstants>(default_constants())
                       : std::make_unique<PhysicalConstants>(load_constants_file(g_.constants_path));
    }
    return *constants_;
  }

  bool want_csv(bool tabular) const { return g_.format.empty() ? tabular : g_.format == "csv"; }

  std::string render(const json& j, bool tabular_default = false) const {
    return want_csv(tabular_default) ? key_value_csv(j) : j.dump(2) + "\n";
  }

  void emit(const std::string& text) {
    if (g_.out_path.empty() || events_took_out_) {
      out_ << text;
      return;
    }
    write_file(g_.out_path, text);
  }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw KaonError("io", "cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw KaonError("io", "write failed for '" + path + "'");
  }

  void manifest(const CLI::App& sub, bool seeded) {
    json params = json::object();
    auto echo = [&](const CLI::App& app) {
      for (const CLI::Option* o : app.get_options()) {
        if (o->get_name() == "--help" || o->get_name().empty()) continue;
        std::string name = o->get_lnames().empty() ? o->get_name() : o->get_lnames().front();
        if (o->count() > 0) {
          const auto& r = o->results();
          std::string joined;
          for (std::size_t i = 0; i < r.size(); ++i) joined += (i ? " " : "") + r[i];
          params[name] = o->get_expected_max() == 0 ? json(true) : json(joined);
        } else if (!o->get_default_str().empty()) {
          params[name] = o->get_default_str();
        }
      }
    };
    echo(*sub.get_parent());
    echo(sub);
    json m = {{"subcommand", sub.get_name()},
              {"params", std::move(params)},
              {"constants_fingerprint", constants().fingerprint},
              {"version", KAON_VERSION}};
    m["seed"] = seeded ? json(g_.seed) : json(nullptr);
    m["timestamp"] = utc_now();
    if (!g_.out_path.empty()) {
      write_file(g_.out_path + ".manifest.json", m.dump(2) + "\n");
    } else if (!g_.no_manifest) {
      err_ << m.dump() << '\n';
    }
  }

  std::ostream& out_;
  std::ostream& err_;
  Globals g_;
  std::unique_ptr<PhysicalConstants> constants_;
  bool events_took_out_ = false;
};

int Runner::run(const std::vector<std::string>& args) {
  CLI::App app{"Neutral kaon pair entanglement, Hardy-type probabilities and local hidden-variable models", "lhv"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", KAON_VERSION);
  app.add_option("--constants", g_.constants_path, "constants document (JSON); shipped PDG values by default");
  app.add_option("--format", g_.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g_.out_path, "write the result here (simulate: the event stream)");
  app.add_option("--seed", g_.seed, "random seed")->capture_default_str();
  app.add_flag("--no-manifest", g_.no_manifest, "do not print the run manifest on stderr");

  std::function<void()> action;
  bool seeded = false;

  auto* constants_cmd = app.add_subcommand("constants", "print the physical constants and their sources");
  constants_cmd->callback([&] {
    action = [&] {
      const auto& c = constants();
      if (want_csv(true)) {
        std::string text = "quantity,value,unit,provenance\n";
        auto row = [&](const std::string& q, double v, const std::string& unit, const std::string& prov) {
          text += csv_field(q) + ',' + format_number(v) + ',' + unit + ',' + csv_field(prov) + '\n';
        };
        if (c.tau_S_seconds) row("tau_S", *c.tau_S_seconds, "s", c.tau_S_provenance);
        row("tau_L", c.tau_L, "tau_S", c.tau_L_provenance);
        row("delta_m", c.delta_m, "hbar/tau_S", c.delta_m_provenance);
        row("ks_kl_overlap", c.ks_kl_overlap, "1", c.overlap_provenance);
        for (const auto& ch : c.branching_table)
          row("BR(" + ch.id + ")", ch.branching_ratio, std::string(to_string(ch.tag_class)), ch.provenance);
        emit(text);
      } else {
        json doc = json::parse(serialize_constants(c));
        doc["fingerprint"] = c.fingerprint;
        if (c.tau_S_seconds) doc["tau_S_seconds"] = *c.tau_S_seconds;
        emit(doc.dump(2) + "\n");
      }
    };
  });

  std::string re_range = "-2:2", im_range = "-2:2";
  int grid = 81;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* surface_cmd = app.add_subcommand("entropy-surface", "entanglement entropy over a grid of complex R");
  surface_cmd->add_option("--re-range", re_range, "lo:hi for Re R")->capture_default_str();
  surface_cmd->add_option("--im-range", im_range, "lo:hi for Im R")->capture_default_str();
  surface_cmd->add_option("--grid", grid, "points per axis")->capture_default_str();
  surface_cmd->add_option("--workers", workers, "threads")->capture_default_str();
  surface_cmd->callback([&] {
    action = [&] {
      const auto re = parse_list(re_range, 2, "--re-range");
      const auto im = parse_list(im_range, 2, "--im-range");
      const auto pts = entropy_surface({re[0], re[1]}, {im[0], im[1]}, grid, workers);
      if (want_csv(true)) {
        std::ostringstream s;
        write_surface_csv(s, pts);
        emit(s.str());
      } else {
        json arr = json::array();
        for (const auto& p : pts) arr.push_back({{"re_R", num(p.re_R)}, {"im_R", num(p.im_R)}, {"entropy", num(p.entropy)}});
        emit(arr.dump(2) + "\n");
      }
    };
  });

  std::string bins = "18:23:1";
  auto* fig2_cmd = app.add_subcommand("fig2", "K_L / K_S two-pion contamination per decay-time bin");
  fig2_cmd->add_option("--bins", bins, "start:end:width in tau_S")->capture_default_str();
  fig2_cmd->callback([&] {
    action = [&] {
      const auto b = parse_list(bins, 3, "--bins");
      const auto hist = contamination_histogram(b[0], b[1], b[2], constants());
      if (want_csv(true)) {
        std::ostringstream s;
        write_histogram_csv(s, hist);
        emit(s.str());
      } else {
        json arr = json::array();
        for (const auto& h : hist)
          arr.push_back({{"bin_start", num(h.start)}, {"bin_end", num(h.end)}, {"ratio", num(h.ratio)}});
        emit(arr.dump(2) + "\n");
      }
    };
  });

  std::string window = "10:21";
  auto* budget_cmd = app.add_subcommand("budget", "misidentification budget m_S, m_L for a tagging window");
  budget_cmd->add_option("--window", window, "t0:t1 in tau_S")->capture_default_str();
  budget_cmd->callback([&] {
    action = [&] {
      const auto w = parse_window(window);
      const auto b = misid_budget(w, constants());
      json j = {{"window", {num(w.t0), num(w.t1)}},
                {"undecayed_fraction", num(b.undecayed_fraction)},
                {"untaggable_fraction", num(b.untaggable_fraction)},
                {"m_S", num(b.m_S)},
                {"m_L", num(b.m_L)},
                {"constants_fingerprint", constants().fingerprint}};
      emit(render(j));
    };
  });

  std::optional<double> m_s, m_l;
  auto* thresholds_cmd = app.add_subcommand("thresholds", "efficiency thresholds for a conclusive test");
  thresholds_cmd->add_option("--m-s", m_s, "K_S misidentification probability");
  thresholds_cmd->add_option("--m-l", m_l, "K_L misidentification probability");
  auto* thresholds_window = thresholds_cmd->add_option("--window", window, "take m_S, m_L from this window's budget");
  thresholds_cmd->callback([&] {
    action = [&] {
      double ms = kReferenceMS, ml = kReferenceML;
      std::string source = "reference";
      if (thresholds_window->count() > 0) {
        const auto b = misid_budget(parse_window(window), constants());
        ms = b.m_S;
        ml = b.m_L;
        source = "budget";
      }
      if (m_s) ms = *m_s;
      if (m_l) ml = *m_l;
      if (m_s || m_l) source = thresholds_window->count() > 0 ? "budget+explicit" : "explicit";
      json j = {{"m_S", num(ms)},
                {"m_L", num(ml)},
                {"source", source},
                {"eta_falsification", num(threshold_falsification(ms))},
                {"eta_ch", num(threshold_ch(ms, ml))}};
      emit(render(j));
    };
  });

  double re_R = -1.0, im_R = 0.0, eta = 1.0;
  std::optional<double> eta_prime;
  auto detection = [&]() {
    DetectionModel d = detection_with_budget(eta, eta_prime.value_or(eta), parse_window(window), constants());
    if (m_s) d.m_S = *m_s;
    if (m_l) d.m_L = *m_l;
    validate(d);
    return d;
  };
  auto add_detection_options = [&](CLI::App* cmd) {
    cmd->add_option("--eta", eta, "K0 identification efficiency")->capture_default_str();
    cmd->add_option("--eta-prime", eta_prime, "K0bar identification efficiency (default: eta)");
    cmd->add_option("--window", window, "tagging window t0:t1 in tau_S")->capture_default_str();
    cmd->add_option("--m-s", m_s, "override the window's m_S");
    cmd->add_option("--m-l", m_l, "override the window's m_L");
  };

  auto* prob_cmd = app.add_subcommand("probabilities", "Hardy-type joint probabilities, ideal and measured");
  prob_cmd->add_option("--re-R", re_R, "Re R")->capture_default_str();
  prob_cmd->add_option("--im-R", im_R, "Im R")->capture_default_str();
  add_detection_options(prob_cmd);
  prob_cmd->callback([&] {
    action = [&] {
      const auto d = detection();
      const Amplitude R{re_R, im_R};
      const auto measured = measured_probabilities(d);
      json j = {{"R", {{"re", num(re_R)}, {"im", num(im_R)}}},
                {"eta", num(d.eta)},
                {"eta_prime", num(d.eta_prime)},
                {"window", {num(d.window.t0), num(d.window.t1)}},
                {"m_S", num(d.m_S)},
                {"m_L", num(d.m_L)},
                {"entropy", num(entanglement_entropy(build_phi_strangeness_basis(R)))},
                {"qm", probabilities_json(qm_probability_set(R, d))},
                {"measured", probabilities_json(measured)},
                {"ch_margin", num(ch_margin(measured))}};
      std::string feasibility = "feasible";
      try {
        (void)construct_evading_lhv(d, constants());
      } catch (const KaonError& e) {
        feasibility = e.what();
      }
      j["evading_lhv"] = feasibility;
      emit(render(j));
    };
  });

  std::string source = "qm", events = "1e6";
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo event generation and falsification verdict");
  sim_cmd->add_option("--source", source, "qm or evading")->check(CLI::IsMember({"qm", "evading"}))->capture_default_str();
  sim_cmd->add_option("--events", events, "number of pairs")->capture_default_str();
  sim_cmd->add_option("--workers", workers, "threads")->capture_default_str();
  sim_cmd->add_option("--re-R", re_R, "Re R of the QM source")->capture_default_str();
  sim_cmd->add_option("--im-R", im_R, "Im R of the QM source")->capture_default_str();
  add_detection_options(sim_cmd);
  sim_cmd->callback([&] {
    seeded = true;
    action = [&] {
      const auto d = detection();
      RunOptions opts;
      opts.n_events = parse_count(events, "--events");
      opts.seed = g_.seed;
      opts.workers = std::max(1u, workers);
      const EventSource src = source == "qm" ? EventSource{qm_source(Amplitude{re_R, im_R})}
                                             : EventSource{LhvSource{construct_evading_lhv(d, constants())}};
      std::ofstream events_file;
      EventSink sink;
      if (!g_.out_path.empty()) {
        events_file.open(g_.out_path, std::ios::binary);
        if (!events_file) throw KaonError("io", "cannot open '" + g_.out_path + "' for writing");
        events_file << kEventHeader << '\n';
        sink = [&](std::span<const EventRecord> evs) { write_events(events_file, evs); };
      }
      const auto result = monte_carlo_run(src, d, constants(), opts, sink);
      if (events_file.is_open()) {
        events_file.close();
        if (!events_file) throw KaonError("io", "write failed for '" + g_.out_path + "'");
        events_took_out_ = true;
      }
      json j = {{"source", source},
                {"eta", num(d.eta)},
                {"eta_prime", num(d.eta_prime)},
                {"window", {num(d.window.t0), num(d.window.t1)}},
                {"m_S", num(d.m_S)},
                {"m_L", num(d.m_L)},
                {"expected", probabilities_json(source == "qm" ? qm_probability_set(Amplitude{re_R, im_R}, d)
                                                               : measured_probabilities(d))},
                {"verdict", verdict_json(result.verdict)}};
      emit(render(j));
    };
  });

  std::string in_path;
  auto* verdict_cmd = app.add_subcommand("verdict", "falsification verdict for a recorded event file");
  verdict_cmd->add_option("events", in_path, "event file ('-' for stdin)")->required();
  add_detection_options(verdict_cmd);
  verdict_cmd->callback([&] {
    action = [&] {
      const auto d = detection();
      HardyCounts counts;
      if (in_path == "-") {
        counts = read_event_counts(std::cin);
      } else {
        std::ifstream f(in_path);
        if (!f) throw KaonError("io", "cannot open '" + in_path + "'");
        counts = read_event_counts(f);
      }
      if (counts.n_events == 0) throw KaonError("domain", "event file contains no events");
      emit(render(verdict_json(falsification_verdict(counts, d))));
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out_, err_);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out_, err_);
  } catch (const CLI::ParseError& e) {
    err_ << json({{"error", "usage"}, {"message", e.what()}}).dump() << '\n';
    return 2;
  }

  try {
    action();
    manifest(*app.get_subcommands().front(), seeded);
  } catch (const KaonError& e) {
    err_ << json({{"error", e.code()}, {"message", e.what()}}).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err_ << json({{"error", "internal"}, {"message", e.what()}}).dump() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

}  // namespace kaon::cli
