#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace levval {

inline constexpr const char* kReportSchemaVersion = "1.0";

/// Envelope for machine-readable command reports. Every report is
/// reproducible from (command line, input files, seed): the digest pins the
/// data inputs, the seed pins all randomness, and the payload carries the
/// command-specific results.
struct Report {
  std::string command;
  std::string inputs_digest;
  std::uint64_t seed = 0;
  nlohmann::json payload;
};

/// FNV-1a (64-bit) over length-framed parts, so ("ab","c") and ("a","bc")
/// digest differently. An empty builder reports the FNV offset basis.
class DigestBuilder {
 public:
  DigestBuilder& add(std::string_view part);
  std::string hex() const;  // 16 lowercase hex digits

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Report as a JSON object with keys schema_version, command, inputs_digest,
/// seed, payload.
nlohmann::json report_json(const Report& report);

/// Canonical serialization: sorted keys, two-space indent, trailing newline.
/// Byte-stable for identical report contents.
std::string serialize_report(const Report& report);

}  // namespace levval
