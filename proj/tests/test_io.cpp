#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "levval/csv.hpp"
#include "levval/errors.hpp"
#include "levval/report.hpp"
#include "levval/rng.hpp"

using namespace levval;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a levval::Error");
  return Errc::InvalidInput;
}

}  // namespace

TEST_CASE("parse_csv reads headerless numeric tables") {
  const CsvTable table = parse_csv("1,0\n0,1\n");
  CHECK(table.header.empty());
  REQUIRE(table.values.rows() == 2);
  REQUIRE(table.values.cols() == 2);
  CHECK(table.values(0, 0) == 1.0);
  CHECK(table.values(1, 1) == 1.0);
}

TEST_CASE("parse_csv detects a header row and CRLF endings") {
  const CsvTable table = parse_csv("x, y\r\n1.5,-2\r\n3e2,0.25\r\n");
  REQUIRE(table.header.size() == 2);
  CHECK(table.header[0] == "x");
  CHECK(table.header[1] == "y");
  REQUIRE(table.values.rows() == 2);
  CHECK(table.values(0, 0) == 1.5);
  CHECK(table.values(0, 1) == -2.0);
  CHECK(table.values(1, 0) == 300.0);
  CHECK(table.values(1, 1) == 0.25);
}

TEST_CASE("parse_csv reports the offending line and column") {
  try {
    parse_csv("1,2\n1,zz\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }

  try {
    parse_csv("1,2\n3,4\n5\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("parse_csv rejects empty and header-only input") {
  CHECK(code_of([] { parse_csv(""); }) == Errc::ParseError);
  CHECK(code_of([] { parse_csv("\n"); }) == Errc::ParseError);
  CHECK(code_of([] { parse_csv("a,b\n"); }) == Errc::ParseError);
}

TEST_CASE("format_csv round-trips doubles bit for bit") {
  Rng rng(314);
  Matrix m(6, 3);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal() * 1e3;
  }
  m(0, 0) = 0.1;
  m(1, 1) = -1e-17;
  m(2, 2) = 1e300;
  m(3, 0) = 0.0;
  m(4, 1) = 1.0 / 3.0;

  const CsvTable bare = parse_csv(format_csv(m));
  CHECK(bare.header.empty());
  CHECK(bare.values == m);

  const std::vector<std::string> header = {"a", "b", "c"};
  const CsvTable titled = parse_csv(format_csv(m, header));
  CHECK(titled.header == header);
  CHECK(titled.values == m);
}

TEST_CASE("save_csv and load_csv round-trip through a file") {
  Matrix m(2, 2);
  m << 0.5, -2.25, 3.0, 1e-9;
  const std::string path = "io_roundtrip_tmp.csv";
  save_csv(path, m, {"u", "v"});
  const CsvTable table = load_csv(path);
  std::remove(path.c_str());
  CHECK(table.header == std::vector<std::string>{"u", "v"});
  CHECK(table.values == m);

  CHECK(code_of([] { load_csv("does_not_exist.csv"); }) == Errc::ParseError);
}

TEST_CASE("split_target extracts labels by name and by index") {
  const CsvTable named = parse_csv("f0,f1,label\n1,2,0\n3,4,1\n5,6,2\n");
  const LabeledTable by_name = split_target(named, "label");
  REQUIRE(by_name.features.rows() == 3);
  REQUIRE(by_name.features.cols() == 2);
  CHECK(by_name.features(1, 0) == 3.0);
  CHECK(by_name.features(1, 1) == 4.0);
  CHECK(by_name.labels == std::vector<int>{0, 1, 2});

  const CsvTable bare = parse_csv("0,1,2\n1,3,4\n");
  const LabeledTable by_index = split_target(bare, "0");
  CHECK(by_index.labels == std::vector<int>{0, 1});
  CHECK(by_index.features(0, 0) == 1.0);
  CHECK(by_index.features(0, 1) == 2.0);
}

TEST_CASE("split_target validates the target column") {
  const CsvTable table = parse_csv("f,label\n1,0.5\n");
  CHECK(code_of([&] { split_target(table, "label"); }) == Errc::ParseError);

  const CsvTable negative = parse_csv("f,label\n1,-1\n");
  CHECK(code_of([&] { split_target(negative, "label"); }) == Errc::ParseError);

  CHECK(code_of([&] { split_target(table, "missing"); }) == Errc::ParseError);
  CHECK(code_of([&] { split_target(table, "7"); }) == Errc::ParseError);

  const CsvTable narrow = parse_csv("label\n1\n");
  CHECK(code_of([&] { split_target(narrow, "label"); }) == Errc::ParseError);
}

TEST_CASE("digest builder is length-framed and stable") {
  CHECK(DigestBuilder{}.hex() == "cbf29ce484222325");

  DigestBuilder a;
  a.add("ab").add("c");
  DigestBuilder b;
  b.add("a").add("bc");
  CHECK(a.hex() != b.hex());

  DigestBuilder c;
  c.add("ab").add("c");
  CHECK(c.hex() == a.hex());
  CHECK(a.hex().size() == 16);
}

TEST_CASE("serialize_report emits sorted keys and a trailing newline") {
  Report report;
  report.command = "value";
  report.inputs_digest = "00ff";
  report.seed = 7;
  report.payload = {{"scores", {0.25, 0.5, 0.25}}};

  const std::string text = serialize_report(report);
  CHECK(text.back() == '\n');
  CHECK(serialize_report(report) == text);

  const auto parsed = nlohmann::json::parse(text);
  CHECK(parsed.at("schema_version") == kReportSchemaVersion);
  CHECK(parsed.at("command") == "value");
  CHECK(parsed.at("inputs_digest") == "00ff");
  CHECK(parsed.at("seed") == 7);
  CHECK(parsed.at("payload").at("scores").size() == 3);

  const auto pos_command = text.find("\"command\"");
  const auto pos_digest = text.find("\"inputs_digest\"");
  const auto pos_payload = text.find("\"payload\"");
  const auto pos_schema = text.find("\"schema_version\"");
  const auto pos_seed = text.find("\"seed\"");
  CHECK(pos_command < pos_digest);
  CHECK(pos_digest < pos_payload);
  CHECK(pos_payload < pos_schema);
  CHECK(pos_schema < pos_seed);
}
