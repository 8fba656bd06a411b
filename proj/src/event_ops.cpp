#include "aertk/event_ops.hpp"

#include <algorithm>
#include <string>

#include "aertk/error.hpp"

namespace aertk {

namespace {

EventStream copy_shell(const EventStream& stream) {
  EventStream out;
  out.width = stream.width;
  out.height = stream.height;
  out.source_id = stream.source_id;
  return out;
}

} // namespace

SaccadePlan SaccadePlan::equal_windows(std::uint32_t t_last, std::size_t k) {
  if (k == 0) {
    throw ArgumentError("saccade plan needs at least one window");
  }
  SaccadePlan plan;
  plan.windows_.reserve(k);
  const std::uint64_t span = t_last;
  for (std::size_t i = 0; i < k; ++i) {
    SaccadeWindow window;
    window.t_start = static_cast<std::uint32_t>(span * i / k);
    window.t_end = static_cast<std::uint32_t>(span * (i + 1) / k);
    plan.windows_.push_back(window);
  }
  return plan;
}

SaccadePlan SaccadePlan::from_boundaries(std::span<const std::uint32_t> edges) {
  if (edges.size() < 2) {
    throw ArgumentError("boundary list needs at least 2 edges");
  }
  SaccadePlan plan;
  plan.windows_.reserve(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i] >= edges[i + 1]) {
      throw ArgumentError("boundary edges must be strictly increasing");
    }
    plan.windows_.push_back({edges[i], edges[i + 1]});
  }
  return plan;
}

bool SaccadePlan::contains(std::size_t index, std::uint32_t t) const {
  const SaccadeWindow& window = windows_.at(index);
  if (t < window.t_start) return false;
  if (index + 1 == windows_.size()) return t <= window.t_end;
  return t < window.t_end;
}

EventStream filter_polarity(const EventStream& stream, Polarity keep) {
  EventStream out = copy_shell(stream);
  for (const Event& event : stream.events) {
    if (event.polarity == keep) {
      out.events.push_back(event);
    }
  }
  return out;
}

SaccadePlan plan_saccades(const EventStream& stream, std::size_t k) {
  return SaccadePlan::equal_windows(stream.t_last(), k);
}

EventStream select_saccades(const EventStream& stream, const SaccadePlan& plan,
                            std::span<const std::size_t> indices) {
  for (const std::size_t index : indices) {
    if (index >= plan.count()) {
      throw ArgumentError("saccade index " + std::to_string(index) +
                          " out of range for a " + std::to_string(plan.count()) +
                          "-window plan");
    }
  }
  EventStream out = copy_shell(stream);
  for (const Event& event : stream.events) {
    const bool selected =
        std::any_of(indices.begin(), indices.end(), [&](std::size_t index) {
          return plan.contains(index, event.timestamp_us);
        });
    if (selected) {
      out.events.push_back(event);
    }
  }
  return out;
}

EventStream time_window(const EventStream& stream, std::uint32_t t0,
                        std::uint32_t t1) {
  if (t0 > t1) {
    throw ArgumentError("time window start " + std::to_string(t0) +
                        " exceeds end " + std::to_string(t1));
  }
  EventStream out = copy_shell(stream);
  for (const Event& event : stream.events) {
    if (event.timestamp_us >= t0 && event.timestamp_us < t1) {
      out.events.push_back(event);
    }
  }
  return out;
}

} // namespace aertk
