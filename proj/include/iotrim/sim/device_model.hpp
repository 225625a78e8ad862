#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iotrim/core/errors.hpp"
#include "iotrim/core/hostname.hpp"
#include "iotrim/core/records.hpp"

namespace iotrim::sim {

using iotrim::Proto;
using iotrim::proto_from_string;

// One destination a function talks to. A replica pool models ephemeral
// destinations: each iteration draws one concrete hostname.
struct DestinationSpec {
  struct Replica {
    std::string host;
    double probability = 0;
  };

  std::string base;  // hostname or IPv4 literal
  std::vector<Replica> replica_pool;
  Proto proto = Proto::TCP;
  std::uint16_t port = 443;
  std::uint64_t payload_bytes = 0;
  bool probe_burst = false;  // carries the activation burst for traffic probes

  bool is_ip() const { return is_ipv4(base); }
};

struct FunctionModel {
  std::string name;
  bool main = false;
  std::vector<DestinationSpec> required;  // all must be reachable for success
  std::vector<DestinationSpec> optional;  // contacted, never needed
};

struct ProbeSpec {
  enum class Kind { Screen, Traffic };
  Kind kind = Kind::Screen;
  double error_rate = 0.0;           // false-negative rate: success misread as failure
  double false_positive_rate = 0.0;  // stress-test only; zero in shipped fixtures
  bool manual_override = false;      // classification may proceed on manual readings
  // Traffic-probe calibration targets:
  std::vector<std::string> destinations;
  double window_seconds = 20.0;
  double b_max = 0.0;
  double a_min = 0.0;
};

struct DeviceModel {
  std::string device_id;
  std::string display_name;
  std::string manufacturer;
  std::string category;
  std::string client_ip;
  std::string mac;
  double boot_delay_s = 120.0;
  ProbeSpec probe;
  std::vector<FunctionModel> functions;

  const FunctionModel* find_function(const std::string& name) const {
    for (const auto& f : functions)
      if (f.name == name) return &f;
    return nullptr;
  }

  const FunctionModel& main_function() const {
    for (const auto& f : functions)
      if (f.main) return f;
    return functions.front();
  }
};

struct DeviceFixture {
  std::vector<DeviceModel> devices;
  std::map<std::string, std::string> hostname_ips;  // fixture DNS zone
  std::string resolver_ip = "192.168.4.1";
  std::string ntp_ip = "129.6.15.28";

  const DeviceModel* find(const std::string& device_id) const {
    for (const auto& d : devices)
      if (d.device_id == device_id) return &d;
    return nullptr;
  }

  const DeviceModel& get(const std::string& device_id) const {
    if (const auto* d = find(device_id)) return *d;
    throw UnknownDeviceError("unknown device: '" + device_id + "'");
  }

  std::string ip_of(const std::string& hostname) const {
    auto it = hostname_ips.find(hostname);
    if (it == hostname_ips.end())
      throw RejectedInputError("fixture has no IP for hostname '" + hostname + "'");
    return it->second;
  }
};

namespace detail {

inline DestinationSpec destination_spec_from_json(const nlohmann::json& j) {
  DestinationSpec s;
  if (j.contains("pool")) {
    const auto& pool = j.at("pool");
    for (auto it = pool.begin(); it != pool.end(); ++it)
      s.replica_pool.push_back({normalize_hostname(it.key()), it.value().get<double>()});
    std::sort(s.replica_pool.begin(), s.replica_pool.end(),
              [](const auto& a, const auto& b) { return a.host < b.host; });
    double sum = 0;
    for (const auto& r : s.replica_pool) sum += r.probability;
    if (std::abs(sum - 1.0) > 1e-9)
      throw RejectedInputError("replica pool probabilities must sum to 1");
    s.base = j.at("dest").get<std::string>();  // group label, not contacted itself
  } else {
    s.base = j.at("dest").get<std::string>();
  }
  if (!is_ipv4(s.base)) s.base = normalize_hostname(s.base);
  if (j.contains("proto")) s.proto = proto_from_string(j.at("proto").get<std::string>());
  if (j.contains("port")) s.port = j.at("port").get<std::uint16_t>();
  if (j.contains("bytes")) s.payload_bytes = j.at("bytes").get<std::uint64_t>();
  if (j.contains("probe_burst")) s.probe_burst = j.at("probe_burst").get<bool>();
  return s;
}

}  // namespace detail

inline DeviceFixture load_device_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read device fixture " + path);
  nlohmann::json root;
  in >> root;

  DeviceFixture fx;
  if (root.contains("resolver_ip")) fx.resolver_ip = root.at("resolver_ip").get<std::string>();
  if (root.contains("ntp_ip")) fx.ntp_ip = root.at("ntp_ip").get<std::string>();
  for (auto it = root.at("dns").begin(); it != root.at("dns").end(); ++it)
    fx.hostname_ips[normalize_hostname(it.key())] = it.value().get<std::string>();

  for (const auto& dj : root.at("devices")) {
    DeviceModel d;
    d.device_id = dj.at("device_id").get<std::string>();
    d.display_name = dj.value("name", d.device_id);
    d.manufacturer = dj.at("manufacturer").get<std::string>();
    d.category = dj.value("category", "");
    d.client_ip = dj.value("client_ip", "");
    d.mac = dj.value("mac", "");
    d.boot_delay_s = dj.value("boot_delay_s", 120.0);

    const auto& pj = dj.at("probe");
    const std::string kind = pj.at("kind").get<std::string>();
    d.probe.kind = kind == "traffic" ? ProbeSpec::Kind::Traffic : ProbeSpec::Kind::Screen;
    d.probe.error_rate = pj.value("error_rate", 0.0);
    d.probe.false_positive_rate = pj.value("false_positive_rate", 0.0);
    d.probe.manual_override = pj.value("manual_override", false);
    if (d.probe.error_rate < 0 || d.probe.error_rate >= 1)
      throw RejectedInputError(d.device_id + ": probe error_rate must be in [0,1)");
    if (d.probe.kind == ProbeSpec::Kind::Traffic) {
      for (const auto& s : pj.at("destinations"))
        d.probe.destinations.push_back(s.get<std::string>());
      d.probe.window_seconds = pj.value("window_s", 20.0);
      d.probe.b_max = pj.at("b_max").get<double>();
      d.probe.a_min = pj.at("a_min").get<double>();
      if (d.probe.a_min <= d.probe.b_max)
        throw RejectedInputError(d.device_id + ": a_min must exceed b_max");
    }

    for (const auto& fj : dj.at("functions")) {
      FunctionModel f;
      f.name = fj.at("name").get<std::string>();
      f.main = fj.value("main", false);
      for (const auto& sj : fj.value("required", nlohmann::json::array()))
        f.required.push_back(detail::destination_spec_from_json(sj));
      for (const auto& sj : fj.value("optional", nlohmann::json::array()))
        f.optional.push_back(detail::destination_spec_from_json(sj));

      std::set<std::string> req_names;
      for (const auto& s : f.required) req_names.insert(s.base);
      for (const auto& s : f.optional)
        if (req_names.count(s.base))
          throw RejectedInputError(d.device_id + "/" + f.name +
                                   ": destination both required and optional: " + s.base);
      d.functions.push_back(std::move(f));
    }
    if (d.functions.empty())
      throw RejectedInputError(d.device_id + ": device model needs at least one function");
    fx.devices.push_back(std::move(d));
  }
  return fx;
}

}  // namespace iotrim::sim
