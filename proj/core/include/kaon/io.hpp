#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "kaon/decay_engine.hpp"
#include "kaon/entangled_pair.hpp"
#include "kaon/monte_carlo.hpp"

namespace kaon {

/// Shortest form of `v` at 12 significant digits ("%.12g" semantics),
/// independent of the global locale.
std::string format_number(double v);

/// `v` rounded to 12 significant digits, for JSON emission.
double round12(double v);

inline constexpr std::string_view kEventHeader = "event_id,left_tag,right_tag,left_t,right_t,truth";
inline constexpr std::string_view kSurfaceHeader = "re_R,im_R,entropy";
inline constexpr std::string_view kHistogramHeader = "bin_start,bin_end,ratio";

std::string format_event(const EventRecord& ev);
/// Parses one event line. Throws KaonError("parse", ...) on malformed input.
EventRecord parse_event(std::string_view line);

void write_events(std::ostream& out, std::span<const EventRecord> events);

/// Reads an event stream (optional header line) and accumulates counts.
HardyCounts read_event_counts(std::istream& in);

void write_surface_csv(std::ostream& out, std::span<const SurfacePoint> points);
void write_histogram_csv(std::ostream& out, std::span<const ContaminationBin> bins);

}  // namespace kaon
