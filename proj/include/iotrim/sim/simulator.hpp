#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotrim/core/pattern.hpp"
#include "iotrim/core/records.hpp"
#include "iotrim/probes/data_peak.hpp"
#include "iotrim/sim/device_model.hpp"
#include "iotrim/sim/rng.hpp"

namespace iotrim::sim {

struct TriggerOutcome {
  bool succeeded = false;
  std::size_t segment_begin = 0;  // trace indices [begin, end)
  std::size_t segment_end = 0;
};

struct ProbeReading {
  bool observed_success = false;
};

// Deterministic simulated testbed: device models emit traffic/DNS traces per
// trigger, a function succeeds iff every required destination is reachable
// under the installed blocking rules, and probe noise comes from a seeded
// per-device stream. Virtual clock; identical seed and command sequence give
// identical traces.
class Simulator {
 public:
  Simulator(const DeviceFixture& fixture, std::uint64_t seed)
      : fixture_(fixture), seed_(seed) {}

  const DeviceFixture& fixture() const { return fixture_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  double clock() const { return clock_; }

  std::span<const TraceEvent> segment(const TriggerOutcome& o) const {
    return {trace_.data() + o.segment_begin, o.segment_end - o.segment_begin};
  }

  void set_noise_enabled(bool on) { noise_enabled_ = on; }

  // With retention off the trace is dropped at each power cycle; long
  // experiment campaigns only ever need the current iteration's segment.
  void set_trace_retention(bool keep) { retain_trace_ = keep; }

  void set_block_patterns(const std::string& device_id, std::vector<DestinationPattern> patterns) {
    fixture_.get(device_id);
    blocks_[device_id] = std::move(patterns);
  }

  void clear_block_patterns(const std::string& device_id) { blocks_.erase(device_id); }

  std::vector<DestinationPattern> block_patterns(const std::string& device_id) const {
    auto it = blocks_.find(device_id);
    return it == blocks_.end() ? std::vector<DestinationPattern>{} : it->second;
  }

  // Reset + boot. Repeating it lands in the same post-state as doing it once.
  void power_cycle(const std::string& device_id) {
    const auto& model = fixture_.get(device_id);
    auto& st = state(device_id);
    if (!retain_trace_) trace_.clear();
    st.powered = true;
    st.triggered = false;
    st.last.reset();
    advance(1.0);
    emit_traffic(device_id, fixture_.ntp_ip, 123, Proto::UDP, 48);
    advance(model.boot_delay_s);
    ++st.cycles;
  }

  TriggerOutcome invoke_trigger(const std::string& device_id, const std::string& function) {
    const auto& model = fixture_.get(device_id);
    const auto* fn = model.find_function(function);
    if (!fn) throw UnknownFunctionError(device_id + ": unknown function '" + function + "'");
    auto& st = state(device_id);
    if (!st.powered) throw ProtocolOrderError(device_id + ": trigger before power on");

    emit_background(model, st);

    TriggerOutcome out;
    out.segment_begin = trace_.size();
    advance(10.0);

    // Replica draws happen for every pooled spec up front, in fixture order,
    // so the stream position does not depend on the installed rules.
    std::vector<std::string> req_targets, opt_targets;
    for (const auto& spec : fn->required) req_targets.push_back(draw_target(spec, st));
    for (const auto& spec : fn->optional) opt_targets.push_back(draw_target(spec, st));

    out.succeeded = true;
    for (std::size_t i = 0; i < fn->required.size(); ++i)
      if (is_blocked(device_id, req_targets[i])) out.succeeded = false;

    for (std::size_t i = 0; i < fn->required.size(); ++i)
      emit_contact(model, st, fn->required[i], req_targets[i], true, out.succeeded);
    for (std::size_t i = 0; i < fn->optional.size(); ++i)
      emit_contact(model, st, fn->optional[i], opt_targets[i], false, out.succeeded);

    advance(15.0);
    out.segment_end = trace_.size();
    if (out.succeeded) ++st.activations;
    st.triggered = true;
    st.last = out;
    return out;
  }

  // Ground-truth outcome read through the device's probe. Screen probes flip
  // a true success to a failure with probability error_rate; a real failure
  // is never misread unless a false-positive rate is configured. Traffic
  // probes compare the segment's data peak against the activation threshold.
  ProbeReading probe_device(const std::string& device_id, const std::string& function) {
    const auto& model = fixture_.get(device_id);
    if (!model.find_function(function))
      throw UnknownFunctionError(device_id + ": unknown function '" + function + "'");
    auto& st = state(device_id);
    if (!st.triggered || !st.last)
      throw ProtocolOrderError(device_id + ": probe before any trigger");
    advance(5.0);
    if (model.probe.kind == ProbeSpec::Kind::Traffic)
      return {probes::data_peak(segment(*st.last), device_id, probe_patterns(model),
                                model.probe.window_seconds) > threshold(model)};
    return {apply_noise(model, st, st.last->succeeded)};
  }

  // Probe of the untriggered state; used by probe evaluation scenario runs.
  ProbeReading probe_idle(const std::string& device_id, const std::string& function) {
    const auto& model = fixture_.get(device_id);
    if (!model.find_function(function))
      throw UnknownFunctionError(device_id + ": unknown function '" + function + "'");
    auto& st = state(device_id);
    if (!st.powered) throw ProtocolOrderError(device_id + ": probe before power on");
    if (st.triggered) throw ProtocolOrderError(device_id + ": device was triggered; use probe_device");
    std::size_t begin = trace_.size();
    emit_background(model, st);
    advance(5.0);
    if (model.probe.kind == ProbeSpec::Kind::Traffic)
      return {probes::data_peak({trace_.data() + begin, trace_.size() - begin}, device_id,
                                probe_patterns(model), model.probe.window_seconds) >
              threshold(model)};
    return {apply_noise(model, st, false)};
  }

  bool last_ground_truth(const std::string& device_id) const {
    auto it = states_.find(device_id);
    if (it == states_.end() || !it->second.last)
      throw ProtocolOrderError(device_id + ": no trigger outcome recorded");
    return it->second.last->succeeded;
  }

  probes::PeakProfile peak_profile(const std::string& device_id) const {
    const auto& model = fixture_.get(device_id);
    probes::PeakProfile p;
    p.device_id = device_id;
    p.probe_destinations = probe_patterns(model);
    p.window_seconds = model.probe.window_seconds;
    p.b_max = model.probe.b_max;
    p.a_min = model.probe.a_min;
    p.threshold = threshold(model);
    return p;
  }

 private:
  struct DeviceState {
    bool powered = false;
    bool triggered = false;
    std::optional<TriggerOutcome> last;
    std::uint64_t cycles = 0;
    std::uint64_t activations = 0;   // successful triggers; drives burst schedule
    std::uint64_t backgrounds = 0;   // emitted background samples
    std::optional<Rng> rng;
  };

  DeviceState& state(const std::string& device_id) {
    auto& st = states_[device_id];
    if (!st.rng) st.rng.emplace(derive_seed(seed_, device_id));
    return st;
  }

  void advance(double dt) { clock_ += dt; }

  void emit_traffic(const std::string& device_id, const std::string& dst_ip, std::uint16_t port,
                    Proto proto, std::uint64_t bytes,
                    Direction dir = Direction::DeviceToDst) {
    advance(0.25);
    trace_.emplace_back(TrafficRecord{clock_, device_id, dst_ip, port, proto, bytes, dir});
  }

  void emit_dns(const std::string& device_id, const std::string& name, const std::string& ip) {
    advance(0.25);
    trace_.emplace_back(DnsObservation{clock_, device_id, name, {ip}});
    trace_.emplace_back(
        TrafficRecord{clock_, device_id, fixture_.resolver_ip, 53, Proto::UDP,
                      24 + name.size(), Direction::DeviceToDst});
  }

  std::string draw_target(const DestinationSpec& spec, DeviceState& st) {
    if (spec.replica_pool.empty()) return spec.base;
    std::vector<double> w;
    for (const auto& r : spec.replica_pool) w.push_back(r.probability);
    return spec.replica_pool[st.rng->pick_index(w)].host;
  }

  bool is_blocked(const std::string& device_id, const std::string& target) const {
    auto it = blocks_.find(device_id);
    if (it == blocks_.end()) return false;
    std::string ip = is_ipv4(target) ? target : std::string{};
    if (ip.empty()) {
      auto h = fixture_.hostname_ips.find(target);
      if (h != fixture_.hostname_ips.end()) ip = h->second;
    }
    for (const auto& p : it->second) {
      if (p.matches(target)) return true;
      if (!ip.empty() && !p.is_hostname_kind() && p.matches(ip)) return true;
    }
    return false;
  }

  void emit_contact(const DeviceModel& model, DeviceState& st, const DestinationSpec& spec,
                    const std::string& target, bool required, bool succeeded) {
    bool blocked = is_blocked(model.device_id, target);
    if (!is_ipv4(target)) {
      emit_dns(model.device_id, target, blocked ? "127.0.0.1" : fixture_.ip_of(target));
      if (blocked) {
        // Blocked required destinations trigger retry lookups; no payload flows.
        if (required) emit_dns(model.device_id, target, "127.0.0.1");
        return;
      }
      std::uint64_t bytes = spec.payload_bytes;
      if (spec.probe_burst && model.probe.kind == ProbeSpec::Kind::Traffic) {
        if (!succeeded) return;  // activation burst only when the function runs
        bytes = activation_bytes(model, st.activations);
      }
      emit_traffic(model.device_id, fixture_.ip_of(target), spec.port, spec.proto, bytes);
      if (required)
        emit_traffic(model.device_id, fixture_.ip_of(target), spec.port, spec.proto, 120,
                     Direction::DstToDevice);
      return;
    }
    if (blocked) return;  // IP-literal destinations fail silently when dropped
    emit_traffic(model.device_id, target, spec.port, spec.proto, spec.payload_bytes);
    if (required)
      emit_traffic(model.device_id, target, spec.port, spec.proto, 120, Direction::DstToDevice);
  }

  // Idle chatter to the probe destinations, emitted once per cycle before the
  // trigger (or before an idle probe). The k-th sample rate peaks at exactly
  // b_max so calibration reproduces the profile extremes.
  void emit_background(const DeviceModel& model, DeviceState& st) {
    if (model.probe.kind != ProbeSpec::Kind::Traffic || model.probe.b_max <= 0) return;
    const std::string& dest = model.probe.destinations.front();
    std::uint64_t k = st.backgrounds++;
    double rate = model.probe.b_max * (1.0 - 0.12 * double((5 * k + 2) % 7) / 6.0);
    if (is_blocked(model.device_id, dest)) return;
    std::uint64_t bytes =
        std::llround(rate * model.probe.window_seconds * 1000.0);
    advance(2.0);
    emit_dns(model.device_id, dest, fixture_.ip_of(dest));
    emit_traffic(model.device_id, fixture_.ip_of(dest), 443, Proto::TCP, bytes);
  }

  std::uint64_t activation_bytes(const DeviceModel& model, std::uint64_t k) const {
    double rate = model.probe.a_min * (1.0 + 0.08 * double((3 * k) % 7) / 6.0);
    return std::llround(rate * model.probe.window_seconds * 1000.0);
  }

  static std::vector<DestinationPattern> probe_patterns(const DeviceModel& model) {
    std::vector<DestinationPattern> out;
    for (const auto& d : model.probe.destinations) out.push_back(DestinationPattern::parse(d));
    return out;
  }

  static double threshold(const DeviceModel& model) {
    return (model.probe.a_min + model.probe.b_max) / 2.0;
  }

  bool apply_noise(const DeviceModel& model, DeviceState& st, bool truth) {
    double u = st.rng->uniform01();  // one draw per probe keeps streams aligned
    if (!noise_enabled_) return truth;
    if (truth) return u >= model.probe.error_rate;
    return u < model.probe.false_positive_rate;
  }

  const DeviceFixture& fixture_;
  std::uint64_t seed_;
  double clock_ = 0;
  bool noise_enabled_ = true;
  bool retain_trace_ = true;
  std::vector<TraceEvent> trace_;
  std::map<std::string, DeviceState> states_;
  std::map<std::string, std::vector<DestinationPattern>> blocks_;
};

}  // namespace iotrim::sim
