#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "iotrim/core/errors.hpp"
#include "iotrim/core/hostname.hpp"

namespace iotrim {

enum class Proto { TCP, UDP, ICMP };
enum class Direction { DeviceToDst, DstToDevice };

inline const char* to_string(Proto p) {
  switch (p) {
    case Proto::TCP: return "TCP";
    case Proto::UDP: return "UDP";
    case Proto::ICMP: return "ICMP";
  }
  return "?";
}

inline Proto proto_from_string(std::string_view s) {
  if (s == "TCP") return Proto::TCP;
  if (s == "UDP") return Proto::UDP;
  if (s == "ICMP") return Proto::ICMP;
  throw RejectedInputError("unknown proto: '" + std::string(s) + "'");
}

inline const char* to_string(Direction d) {
  return d == Direction::DeviceToDst ? "device_to_dst" : "dst_to_device";
}

inline Direction direction_from_string(std::string_view s) {
  if (s == "device_to_dst") return Direction::DeviceToDst;
  if (s == "dst_to_device") return Direction::DstToDevice;
  throw RejectedInputError("unknown direction: '" + std::string(s) + "'");
}

// One timestamped flow observation attributed to a device. Payload bytes only,
// headers excluded.
struct TrafficRecord {
  double timestamp = 0;
  std::string device_id;
  std::string dst_ip;
  std::uint16_t dst_port = 0;
  Proto proto = Proto::TCP;
  std::uint64_t payload_bytes = 0;
  Direction direction = Direction::DeviceToDst;
};

struct DnsObservation {
  double timestamp = 0;
  std::string device_id;
  std::string query_name;
  std::vector<std::string> answer_ips;
};

using TraceEvent = std::variant<TrafficRecord, DnsObservation>;

inline double event_timestamp(const TraceEvent& ev) {
  return std::visit([](const auto& e) { return e.timestamp; }, ev);
}

inline nlohmann::json to_json(const TrafficRecord& r) {
  return {{"type", "traffic"},
          {"timestamp", r.timestamp},
          {"device_id", r.device_id},
          {"dst_ip", r.dst_ip},
          {"dst_port", r.dst_port},
          {"proto", to_string(r.proto)},
          {"payload_bytes", r.payload_bytes},
          {"direction", to_string(r.direction)}};
}

inline nlohmann::json to_json(const DnsObservation& o) {
  return {{"type", "dns"},
          {"timestamp", o.timestamp},
          {"device_id", o.device_id},
          {"query_name", o.query_name},
          {"answer_ips", o.answer_ips}};
}

// Trace files are JSONL: one object per line, discriminated by "type".
inline void write_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
  for (const auto& ev : events)
    out << std::visit([](const auto& e) { return to_json(e); }, ev).dump() << '\n';
}

inline std::vector<TraceEvent> read_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  double last_ts = -1e300;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    const std::string type = j.at("type").get<std::string>();
    double ts = j.at("timestamp").get<double>();
    if (ts < last_ts)
      throw RejectedInputError("trace timestamps decrease at line " + std::to_string(lineno));
    last_ts = ts;
    if (type == "traffic") {
      TrafficRecord r;
      r.timestamp = ts;
      r.device_id = j.at("device_id").get<std::string>();
      r.dst_ip = j.at("dst_ip").get<std::string>();
      r.dst_port = j.at("dst_port").get<std::uint16_t>();
      r.proto = proto_from_string(j.at("proto").get<std::string>());
      r.payload_bytes = j.at("payload_bytes").get<std::uint64_t>();
      r.direction = direction_from_string(j.at("direction").get<std::string>());
      events.emplace_back(std::move(r));
    } else if (type == "dns") {
      DnsObservation o;
      o.timestamp = ts;
      o.device_id = j.at("device_id").get<std::string>();
      o.query_name = normalize_hostname(j.at("query_name").get<std::string>());
      o.answer_ips = j.at("answer_ips").get<std::vector<std::string>>();
      if (o.answer_ips.empty())
        throw RejectedInputError("dns observation with no answers at line " + std::to_string(lineno));
      events.emplace_back(std::move(o));
    } else {
      throw RejectedInputError("unknown trace record type '" + type + "'");
    }
  }
  return events;
}

// Maps destination IPs back to the hostname whose DNS answer most recently
// contained them, per device. Ties on timestamp keep the later observation.
class DnsIpIndex {
 public:
  void add(const DnsObservation& obs) {
    for (const auto& ip : obs.answer_ips) {
      auto& slot = latest_[obs.device_id][ip];
      if (obs.timestamp >= slot.second) slot = {obs.query_name, obs.timestamp};
    }
  }

  // Hostname for dst_ip as known at time `ts`, or empty if never answered.
  std::string lookup(const std::string& device_id, const std::string& ip) const {
    auto dev = latest_.find(device_id);
    if (dev == latest_.end()) return {};
    auto it = dev->second.find(ip);
    return it == dev->second.end() ? std::string{} : it->second.first;
  }

 private:
  std::map<std::string, std::map<std::string, std::pair<std::string, double>>> latest_;
};

// Chronological attribution: walk events in order, resolving each traffic
// record against DNS answers seen so far.
template <typename Fn>
void for_each_attributed(const std::vector<TraceEvent>& events, Fn&& fn) {
  DnsIpIndex index;
  for (const auto& ev : events) {
    if (const auto* dns = std::get_if<DnsObservation>(&ev)) {
      index.add(*dns);
    } else {
      const auto& rec = std::get<TrafficRecord>(ev);
      std::string host = index.lookup(rec.device_id, rec.dst_ip);
      fn(rec, host.empty() ? rec.dst_ip : host);
    }
  }
}

}  // namespace iotrim
