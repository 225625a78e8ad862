#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "iotrim/core/errors.hpp"
#include "iotrim/core/hostname.hpp"

namespace iotrim {

enum class PatternKind { Hostname, WildcardHostname, IpAddress, CidrBlock };

inline const char* to_string(PatternKind k) {
  switch (k) {
    case PatternKind::Hostname: return "hostname";
    case PatternKind::WildcardHostname: return "wildcard_hostname";
    case PatternKind::IpAddress: return "ip_address";
    case PatternKind::CidrBlock: return "cidr_block";
  }
  return "?";
}

inline PatternKind pattern_kind_from_string(std::string_view s) {
  if (s == "hostname") return PatternKind::Hostname;
  if (s == "wildcard_hostname") return PatternKind::WildcardHostname;
  if (s == "ip_address") return PatternKind::IpAddress;
  if (s == "cidr_block") return PatternKind::CidrBlock;
  throw RejectedInputError("unknown pattern kind: '" + std::string(s) + "'");
}

// The unit of observation, classification and blocking: a hostname, a
// prefix-wildcard hostname group, an IPv4 address, or a CIDR block.
class DestinationPattern {
 public:
  DestinationPattern() = default;

  static DestinationPattern parse(std::string_view raw) {
    DestinationPattern p;
    if (auto cidr = CidrBlock4::parse(raw)) {
      p.kind_ = PatternKind::CidrBlock;
      p.value_ = cidr->str();
      return p;
    }
    if (auto ip = Ipv4::parse(raw)) {
      p.kind_ = PatternKind::IpAddress;
      p.value_ = ip->str();
      return p;
    }
    std::string lowered = to_lower_ascii(raw);
    if (!lowered.empty() && lowered.front() == '*') {
      std::string suffix = lowered.substr(1);
      if (suffix.empty() || suffix.find('*') != std::string::npos)
        throw RejectedInputError("invalid wildcard pattern: '" + std::string(raw) + "'");
      // The suffix may begin mid-label ("-b-c.ww.com"); validate the rest.
      std::string tail = suffix.front() == '.' ? suffix.substr(1) : suffix;
      std::size_t dot = tail.find('.');
      if (dot == std::string::npos || !is_valid_hostname(tail.substr(dot + 1)))
        throw RejectedInputError("invalid wildcard pattern: '" + std::string(raw) + "'");
      p.kind_ = PatternKind::WildcardHostname;
      p.value_ = lowered;
      return p;
    }
    p.kind_ = PatternKind::Hostname;
    p.value_ = normalize_hostname(raw);
    return p;
  }

  PatternKind kind() const { return kind_; }
  const std::string& value() const { return value_; }

  // Hostname targets never match IP patterns and vice versa. The wildcard
  // matches zero or more leading characters.
  bool matches(std::string_view raw_target) const {
    if (auto ip = Ipv4::parse(raw_target)) {
      switch (kind_) {
        case PatternKind::IpAddress: return value_ == ip->str();
        case PatternKind::CidrBlock: return CidrBlock4::parse(value_)->contains(*ip);
        default: return false;
      }
    }
    std::string host = normalize_hostname(raw_target);
    switch (kind_) {
      case PatternKind::Hostname:
        return value_ == host;
      case PatternKind::WildcardHostname: {
        std::string_view suffix{value_};
        suffix.remove_prefix(1);
        return host.size() >= suffix.size() &&
               host.compare(host.size() - suffix.size(), suffix.size(), suffix) == 0;
      }
      default:
        return false;
    }
  }

  bool is_hostname_kind() const {
    return kind_ == PatternKind::Hostname || kind_ == PatternKind::WildcardHostname;
  }

  friend bool operator==(const DestinationPattern& a, const DestinationPattern& b) {
    return a.kind_ == b.kind_ && a.value_ == b.value_;
  }
  // Classification order is lexicographic by pattern string.
  friend auto operator<=>(const DestinationPattern& a, const DestinationPattern& b) {
    if (auto c = a.value_ <=> b.value_; c != 0) return c;
    return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  }

 private:
  PatternKind kind_ = PatternKind::Hostname;
  std::string value_;
};

}  // namespace iotrim
