#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "iotrim/core/errors.hpp"
#include "iotrim/core/pattern.hpp"
#include "iotrim/core/records.hpp"

namespace iotrim::probes {

// Calibrated traffic-probe profile for one device: any window peak above
// `threshold` KB/s to the probe destinations signals activation traffic.
struct PeakProfile {
  std::string device_id;
  std::vector<DestinationPattern> probe_destinations;
  double window_seconds = 20.0;
  double b_max = 0.0;      // max background peak, KB/s
  double a_min = 0.0;      // min activation peak, KB/s
  double threshold = 0.0;  // (a_min + b_max) / 2
};

// Maximum over sliding windows of device-to-destination payload bytes within
// the window, in KB/s, restricted to records matching `dests`. Records are
// re-sorted by timestamp, so input order does not matter. Anchoring a window
// at every record timestamp yields the exact supremum over all window
// placements.
inline double data_peak(std::span<const TraceEvent> events, const std::string& device_id,
                        std::span<const DestinationPattern> dests, double window_seconds = 20.0) {
  if (dests.empty()) throw RejectedInputError("data_peak: empty probe destination set");
  if (window_seconds <= 0) throw RejectedInputError("data_peak: non-positive window");

  std::vector<TraceEvent> ordered(events.begin(), events.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return event_timestamp(a) < event_timestamp(b);
  });

  std::vector<std::pair<double, std::uint64_t>> samples;  // (ts, bytes)
  for_each_attributed(ordered, [&](const TrafficRecord& rec, const std::string& target) {
    if (rec.device_id != device_id) return;
    if (rec.direction != Direction::DeviceToDst) return;
    for (const auto& p : dests) {
      if (p.matches(target)) {
        samples.emplace_back(rec.timestamp, rec.payload_bytes);
        return;
      }
    }
  });

  std::uint64_t best = 0, window_sum = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < samples.size(); ++hi) {
    window_sum += samples[hi].second;
    while (samples[hi].first - samples[lo].first >= window_seconds)
      window_sum -= samples[lo++].second;
    best = std::max(best, window_sum);
  }
  return static_cast<double>(best) / 1000.0 / window_seconds;
}

// B_max/A_min/X from preliminary peak series. Fails when the classes are not
// separable at peak level.
inline PeakProfile calibrate_threshold(std::span<const double> activation_peaks,
                                       std::span<const double> background_peaks) {
  if (activation_peaks.empty() || background_peaks.empty())
    throw RejectedInputError("calibrate_threshold: empty peak series");
  PeakProfile p;
  p.a_min = *std::min_element(activation_peaks.begin(), activation_peaks.end());
  p.b_max = *std::max_element(background_peaks.begin(), background_peaks.end());
  if (p.a_min <= p.b_max)
    throw CalibrationOverlapError("activation/background peaks overlap: A_min=" +
                                  std::to_string(p.a_min) + " B_max=" + std::to_string(p.b_max));
  p.threshold = (p.a_min + p.b_max) / 2.0;
  return p;
}

// Strictly above the activation threshold means the function ran.
inline bool traffic_probe(std::span<const TraceEvent> events, const PeakProfile& profile) {
  return data_peak(events, profile.device_id, profile.probe_destinations,
                   profile.window_seconds) > profile.threshold;
}

}  // namespace iotrim::probes
