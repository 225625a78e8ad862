#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "iotrim/core/errors.hpp"
#include "iotrim/core/hostname.hpp"

namespace iotrim {
namespace detail {

// Static public-suffix snapshot bundled for deterministic, offline operation.
// ICANN suffixes cover the TLDs seen in practice; the hosting entries keep
// rented infrastructure (AWS ELB/IoT endpoints, Azure) from being folded into
// the provider's bare domain. "*." entries match exactly one extra label.
inline constexpr std::array<std::string_view, 68> kPublicSuffixSnapshot = {
    "com",  "net",     "org",    "edu",   "gov",     "mil",   "int",   "arpa",
    "io",   "co",      "ai",     "tv",    "me",      "cc",    "info",  "biz",
    "name", "mobi",    "app",    "dev",   "cloud",   "xyz",   "site",  "online",
    "uk",   "co.uk",   "org.uk", "ac.uk", "gov.uk",  "de",    "fr",    "it",
    "nl",   "es",      "se",     "ch",    "at",      "be",    "pl",    "eu",
    "cn",   "com.cn",  "net.cn", "org.cn","jp",      "co.jp", "ne.jp", "or.jp",
    "kr",   "co.kr",   "us",     "ca",    "au",      "com.au","net.au","br",
    "com.br","ru",     "su",     "in",    "co.in",   "tw",    "com.tw",
    "cloudapp.net",
    "azurewebsites.net",
    "cloudapp.azure.com",
    "*.elb.amazonaws.com",
    "iot.us-east-1.amazonaws.com",
};

struct SuffixTable {
  std::set<std::string, std::less<>> exact;
  std::set<std::string, std::less<>> wildcard;  // stored without the "*." prefix

  SuffixTable() {
    for (std::string_view rule : kPublicSuffixSnapshot) {
      if (rule.substr(0, 2) == "*.")
        wildcard.emplace(rule.substr(2));
      else
        exact.emplace(rule);
    }
  }

  static const SuffixTable& instance() {
    static const SuffixTable table;
    return table;
  }
};

inline std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t start = 0;
  while (true) {
    auto dot = host.find('.', start);
    if (dot == std::string_view::npos) {
      labels.push_back(host.substr(start));
      break;
    }
    labels.push_back(host.substr(start, dot - start));
    start = dot + 1;
  }
  return labels;
}

}  // namespace detail

// Registrable (second-level) domain of a hostname against the bundled
// public-suffix snapshot. "zz.com" is already registrable and returned as-is.
inline std::string effective_sld(std::string_view raw_host) {
  std::string host = normalize_hostname(raw_host);
  const auto labels = detail::split_labels(host);
  const auto& table = detail::SuffixTable::instance();

  // Longest matching rule wins; an unlisted TLD falls back to the last label.
  std::size_t suffix_labels = 1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::size_t pos = 0;
    for (std::size_t j = 0; j < i; ++j) pos += labels[j].size() + 1;
    std::string_view candidate{host.data() + pos, host.size() - pos};
    std::size_t n = labels.size() - i;
    if (table.exact.count(candidate)) {
      suffix_labels = std::max(suffix_labels, n);
    } else if (n >= 2) {
      auto dot = candidate.find('.');
      if (table.wildcard.count(candidate.substr(dot + 1)))
        suffix_labels = std::max(suffix_labels, n);
    }
  }

  if (labels.size() <= suffix_labels)
    throw RejectedInputError("hostname '" + host + "' is not below a registrable domain");

  std::size_t keep = suffix_labels + 1;
  std::size_t pos = 0;
  for (std::size_t j = 0; j + keep < labels.size(); ++j) pos += labels[j].size() + 1;
  return host.substr(pos);
}

// SLD under a pattern: the registrable domain of the literal suffix. Partial
// leading labels ("*-b-c.ww.com") are dropped down to the first full label.
inline std::string effective_sld_of_pattern_value(std::string_view pattern_value) {
  std::string_view v = pattern_value;
  if (!v.empty() && v.front() == '*') v.remove_prefix(1);
  if (!v.empty() && v.front() == '.') v.remove_prefix(1);
  while (!v.empty()) {
    if (is_valid_hostname(v)) return effective_sld(v);
    auto dot = v.find('.');
    if (dot == std::string_view::npos) break;
    v.remove_prefix(dot + 1);
  }
  throw RejectedInputError("pattern '" + std::string(pattern_value) + "' has no usable domain");
}

}  // namespace iotrim
