#include "kaon/io.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "kaon/error.hpp"

namespace kaon {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  const std::string s = format_number(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

std::string format_event(const EventRecord& ev) {
  std::string line = std::to_string(ev.event_id);
  line += ',';
  line += to_string(ev.left_tag);
  line += ',';
  line += to_string(ev.right_tag);
  line += ',';
  line += format_number(ev.left_t);
  line += ',';
  line += format_number(ev.right_t);
  line += ',';
  line += to_string(ev.truth);
  return line;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
T parse_number(std::string_view s, const char* what) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw KaonError("parse", std::string("bad ") + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

EventRecord parse_event(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = split(line, ',');
  if (f.size() != 6) throw KaonError("parse", "event line needs 6 fields: '" + std::string(line) + "'");
  EventRecord ev;
  ev.event_id = parse_number<std::uint64_t>(f[0], "event_id");
  ev.left_tag = parse_tag(f[1]);
  ev.right_tag = parse_tag(f[2]);
  ev.left_t = parse_number<double>(f[3], "left_t");
  ev.right_t = parse_number<double>(f[4], "right_t");
  ev.truth = parse_truth(f[5]);
  return ev;
}

void write_events(std::ostream& out, std::span<const EventRecord> events) {
  std::string chunk;
  for (const auto& ev : events) {
    chunk += format_event(ev);
    chunk += '\n';
  }
  out << chunk;
}

HardyCounts read_event_counts(std::istream& in) {
  HardyCounts counts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first && line.rfind("event_id", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    counts.add(parse_event(line));
  }
  return counts;
}

void write_surface_csv(std::ostream& out, std::span<const SurfacePoint> points) {
  std::string text(kSurfaceHeader);
  text += '\n';
  for (const auto& p : points) {
    text += format_number(p.re_R) + ',' + format_number(p.im_R) + ',' + format_number(p.entropy) + '\n';
  }
  out << text;
}

void write_histogram_csv(std::ostream& out, std::span<const ContaminationBin> bins) {
  std::string text(kHistogramHeader);
  text += '\n';
  for (const auto& b : bins) {
    text += format_number(b.start) + ',' + format_number(b.end) + ',' + format_number(b.ratio) + '\n';
  }
  out << text;
}

}  // namespace kaon
