#pragma once

#include <stdexcept>
#include <string>

namespace iotrim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input that fails validation (malformed hostname, bad pattern, bad file field).
struct RejectedInputError : Error {
  using Error::Error;
};

struct UnknownDeviceError : Error {
  using Error::Error;
};

struct UnknownFunctionError : Error {
  using Error::Error;
};

// An operation invoked out of order (e.g. probing before any trigger).
struct ProtocolOrderError : Error {
  using Error::Error;
};

// Activation and background peaks overlap; no threshold separates them.
struct CalibrationOverlapError : Error {
  using Error::Error;
};

// WHOIS oracle has no block for an IP that needs grouping.
struct UnresolvedIpError : Error {
  using Error::Error;
};

// A destination-observing run did not succeed with nothing blocked.
struct TestbedFaultError : Error {
  using Error::Error;
};

struct ServiceError : Error {
  using Error::Error;
};

}  // namespace iotrim
