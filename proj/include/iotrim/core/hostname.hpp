#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "iotrim/core/errors.hpp"

namespace iotrim {

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool is_valid_hostname(std::string_view host) {
  if (host.empty() || host.size() > 253) return false;
  std::size_t label_len = 0;
  char prev = '.';
  for (std::size_t i = 0; i < host.size(); ++i) {
    char c = host[i];
    if (c == '.') {
      if (label_len == 0 || prev == '-') return false;
      label_len = 0;
    } else {
      bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
      if (!alnum && c != '-' && c != '_') return false;
      if (label_len == 0 && c == '-') return false;
      if (++label_len > 63) return false;
    }
    prev = c;
  }
  return label_len > 0 && prev != '-';
}

// Lowercases and strips one trailing dot; DNS names compare case-insensitively.
inline std::string normalize_hostname(std::string_view raw) {
  std::string host = to_lower_ascii(raw);
  if (!host.empty() && host.back() == '.') host.pop_back();
  if (!is_valid_hostname(host))
    throw RejectedInputError("invalid hostname: '" + std::string(raw) + "'");
  // Digits-and-dots only is a malformed IP, not a hostname.
  if (host.find_first_not_of("0123456789.") == std::string::npos)
    throw RejectedInputError("malformed IP address: '" + std::string(raw) + "'");
  return host;
}

struct Ipv4 {
  std::uint32_t value = 0;

  static std::optional<Ipv4> parse(std::string_view s) {
    std::uint32_t acc = 0;
    int octets = 0;
    std::size_t i = 0;
    while (i < s.size()) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
      std::uint32_t oct = 0;
      std::size_t digits = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        oct = oct * 10 + static_cast<std::uint32_t>(s[i] - '0');
        if (oct > 255 || ++digits > 3) return std::nullopt;
        ++i;
      }
      acc = (acc << 8) | oct;
      ++octets;
      if (i < s.size()) {
        if (s[i] != '.' || octets == 4) return std::nullopt;
        ++i;
        if (i == s.size()) return std::nullopt;
      }
    }
    if (octets != 4) return std::nullopt;
    return Ipv4{acc};
  }

  std::string str() const {
    return std::to_string(value >> 24) + '.' + std::to_string((value >> 16) & 0xff) + '.' +
           std::to_string((value >> 8) & 0xff) + '.' + std::to_string(value & 0xff);
  }

  friend bool operator==(Ipv4 a, Ipv4 b) { return a.value == b.value; }
};

inline bool is_ipv4(std::string_view s) { return Ipv4::parse(s).has_value(); }

struct CidrBlock4 {
  std::uint32_t network = 0;
  int prefix = 0;

  static std::optional<CidrBlock4> parse(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto ip = Ipv4::parse(s.substr(0, slash));
    if (!ip) return std::nullopt;
    auto rest = s.substr(slash + 1);
    if (rest.empty() || rest.size() > 2) return std::nullopt;
    int p = 0;
    for (char c : rest) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      p = p * 10 + (c - '0');
    }
    if (p < 0 || p > 32) return std::nullopt;
    CidrBlock4 b{ip->value, p};
    b.network &= b.mask();
    return b;
  }

  std::uint32_t mask() const {
    return prefix == 0 ? 0u : ~std::uint32_t{0} << (32 - prefix);
  }

  bool contains(Ipv4 ip) const { return (ip.value & mask()) == network; }

  std::string str() const { return Ipv4{network}.str() + '/' + std::to_string(prefix); }
};

}  // namespace iotrim
