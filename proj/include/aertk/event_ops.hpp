#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aertk/events.hpp"

namespace aertk {

struct SaccadeWindow {
  std::uint32_t t_start = 0;
  std::uint32_t t_end = 0;

  bool operator==(const SaccadeWindow&) const = default;
};

// An ordered partition of a recording into saccade windows. Windows are
// half-open [t_start, t_end) except the final one, which includes its end
// point so the event at t_last is never orphaned.
class SaccadePlan {
public:
  // k equal windows over [0, t_last]. t_last == 0 yields k degenerate [0, 0]
  // windows. Boundaries are floor(i * t_last / k).
  static SaccadePlan equal_windows(std::uint32_t t_last, std::size_t k);

  // Explicit window edges; edges must hold at least 2 strictly increasing
  // values and define edges.size() - 1 windows.
  static SaccadePlan from_boundaries(std::span<const std::uint32_t> edges);

  std::size_t count() const { return windows_.size(); }
  const std::vector<SaccadeWindow>& windows() const { return windows_; }

  // Membership of a timestamp in window `index` under the half-open /
  // last-closed convention.
  bool contains(std::size_t index, std::uint32_t t) const;

private:
  std::vector<SaccadeWindow> windows_;
};

// Keeps only events whose polarity matches; order and dims preserved.
EventStream filter_polarity(const EventStream& stream, Polarity keep);

// Equal division of [0, stream.t_last()] into k windows. k must be >= 1.
SaccadePlan plan_saccades(const EventStream& stream, std::size_t k);

// Keeps events lying in any selected window; order preserved. Every index
// must be < plan.count().
EventStream select_saccades(const EventStream& stream, const SaccadePlan& plan,
                            std::span<const std::size_t> indices);

// Keeps events with t0 <= t < t1. t0 must not exceed t1.
EventStream time_window(const EventStream& stream, std::uint32_t t0,
                        std::uint32_t t1);

} // namespace aertk
