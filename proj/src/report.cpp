#include "levval/report.hpp"

namespace levval {

namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fold_byte(std::uint64_t state, unsigned char byte) {
  return (state ^ byte) * kFnvPrime;
}

}  // namespace

DigestBuilder& DigestBuilder::add(std::string_view part) {
  std::uint64_t length = part.size();
  for (int i = 0; i < 8; ++i) {
    state_ = fold_byte(state_, static_cast<unsigned char>(length & 0xff));
    length >>= 8;
  }
  for (char c : part) {
    state_ = fold_byte(state_, static_cast<unsigned char>(c));
  }
  return *this;
}

std::string DigestBuilder::hex() const {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  std::uint64_t value = state_;
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

nlohmann::json report_json(const Report& report) {
  return nlohmann::json{{"schema_version", kReportSchemaVersion},
                        {"command", report.command},
                        {"inputs_digest", report.inputs_digest},
                        {"seed", report.seed},
                        {"payload", report.payload}};
}

std::string serialize_report(const Report& report) {
  return report_json(report).dump(2) + "\n";
}

}  // namespace levval
