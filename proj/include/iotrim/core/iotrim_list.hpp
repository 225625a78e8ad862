#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iotrim/core/errors.hpp"
#include "iotrim/core/pattern.hpp"

namespace iotrim {

enum class Classification { Required, NonRequired };
enum class Party { First, Support, Third, Unknown };

inline const char* to_string(Classification c) {
  return c == Classification::Required ? "required" : "non_required";
}

inline Classification classification_from_string(std::string_view s) {
  if (s == "required") return Classification::Required;
  if (s == "non_required") return Classification::NonRequired;
  throw RejectedInputError("unknown classification: '" + std::string(s) + "'");
}

inline const char* to_string(Party p) {
  switch (p) {
    case Party::First: return "first";
    case Party::Support: return "support";
    case Party::Third: return "third";
    case Party::Unknown: return "unknown";
  }
  return "?";
}

inline Party party_from_string(std::string_view s) {
  if (s == "first") return Party::First;
  if (s == "support") return Party::Support;
  if (s == "third") return Party::Third;
  if (s == "unknown") return Party::Unknown;
  throw RejectedInputError("unknown party: '" + std::string(s) + "'");
}

// One (device, destination, classification, party) record; collections of
// these form the list consumed by the enforcement engine.
struct IoTrimEntry {
  std::string device_id;
  DestinationPattern pattern;
  Classification classification = Classification::NonRequired;
  Party party = Party::Unknown;
  std::vector<std::string> functions;

  friend bool operator==(const IoTrimEntry&, const IoTrimEntry&) = default;
};

inline nlohmann::json to_json(const IoTrimEntry& e) {
  return {{"device_id", e.device_id},
          {"pattern", e.pattern.value()},
          {"kind", to_string(e.pattern.kind())},
          {"classification", to_string(e.classification)},
          {"party", to_string(e.party)},
          {"functions", e.functions}};
}

inline IoTrimEntry iotrim_entry_from_json(const nlohmann::json& j) {
  IoTrimEntry e;
  e.device_id = j.at("device_id").get<std::string>();
  e.pattern = DestinationPattern::parse(j.at("pattern").get<std::string>());
  if (pattern_kind_from_string(j.at("kind").get<std::string>()) != e.pattern.kind())
    throw RejectedInputError("pattern kind mismatch for '" + e.pattern.value() + "'");
  e.classification = classification_from_string(j.at("classification").get<std::string>());
  e.party = party_from_string(j.at("party").get<std::string>());
  e.functions = j.at("functions").get<std::vector<std::string>>();
  return e;
}

inline void check_unique_entries(const std::vector<IoTrimEntry>& entries) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : entries)
    if (!seen.emplace(e.device_id, e.pattern.value()).second)
      throw RejectedInputError("duplicate entry for (" + e.device_id + ", " +
                               e.pattern.value() + ")");
}

inline nlohmann::json iotrim_list_to_json(const std::vector<IoTrimEntry>& entries) {
  check_unique_entries(entries);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) arr.push_back(to_json(e));
  return arr;
}

inline std::vector<IoTrimEntry> iotrim_list_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw RejectedInputError("iotrim list must be a JSON array");
  std::vector<IoTrimEntry> entries;
  entries.reserve(arr.size());
  for (const auto& j : arr) entries.push_back(iotrim_entry_from_json(j));
  check_unique_entries(entries);
  return entries;
}

inline void save_iotrim_list(const std::string& path, const std::vector<IoTrimEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << iotrim_list_to_json(entries).dump(2) << '\n';
}

inline std::vector<IoTrimEntry> load_iotrim_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  return iotrim_list_from_json(j);
}

}  // namespace iotrim
