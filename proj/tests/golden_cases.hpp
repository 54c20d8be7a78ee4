#pragma once

#include <sys/wait.h>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "levval/csv.hpp"

// Golden CLI case table plus run/compare helpers, shared by the golden
// runner and the acceptance suite. Commands use {fix} for the fixtures
// directory and {tmp} for the per-case scratch directory.
namespace golden {

struct ReportCase {
  std::string name;
  std::string args;
  // Files the command writes into {tmp} beyond the report, compared against
  // goldens of the same name.
  std::vector<std::string> extra_files;
};

struct ErrorCase {
  std::string name;
  std::string args;
  int expected_exit = 2;
  std::string stderr_needle;
};

inline std::vector<ReportCase> report_cases() {
  std::vector<ReportCase> cases = {
      {"value_exact_m32", "value \"{fix}/m32.csv\" --mode exact", {}},
      {"value_ridge_id2", "value \"{fix}/id2.csv\" --mode ridge --lambda 1",
       {}},
      {"value_coeff_gauss",
       "value \"{fix}/gauss.csv\" --mode ridge --lambda-coeff 0.05", {}},
      {"sample_verify_file",
       "sample \"{fix}/gauss.csv\" --target \"{fix}/gauss_y.csv\" --lambda 1 "
       "--epsilon 0.2 --delta 0.1 --seed 7 --verify",
       {}},
      {"sample_synthetic",
       "sample \"{fix}/gauss.csv\" --lambda 1 --epsilon 0.3 --delta 0.2 "
       "--constant 2 --seed 11 --verify",
       {}},
      {"design_d1",
       "design \"{fix}/id2.csv\" --lambda 1 --criterion D --budget 1", {}},
      {"design_a2",
       "design \"{fix}/m32.csv\" --lambda 0.5 --criterion A --budget 2", {}},
      {"design_budget0",
       "design \"{fix}/id2.csv\" --lambda 1 --criterion D --budget 0", {}},
      {"shapley_span_exact",
       "shapley \"{fix}/m32.csv\" --utility span --exact", {}},
      {"shapley_dlogdet_mc",
       "shapley \"{fix}/m32.csv\" --utility dlogdet --lambda 1 --mc 200 "
       "--seed 3",
       {}},
      {"shapley_compare",
       "shapley \"{fix}/m32.csv\" --utility span --exact --lambda 0.5 "
       "--compare",
       {}},
      {"chernoff_id4",
       "chernoff \"{fix}/identity4.csv\" --lambda 1 --m 8 --trials 20 "
       "--seed 11",
       {}},
  };

  ReportCase al;
  al.name = "al_small";
  al.args =
      "al --synthetic-n 80 --classes 3 --dim 4 --data-seed 5 --separation 3 "
      "--strategy all --seeds 0 1 --rounds 3 --per-round 4 --init 6 "
      "--pretrain 30 --lambda-coeff 0.01 --out-dir \"{tmp}\"";
  for (const char* s : {"ridge_leverage", "k_center", "margin", "entropy",
                        "egl", "random"}) {
    for (int seed : {0, 1}) {
      al.extra_files.push_back("curve_" + std::string(s) + "_seed" +
                               std::to_string(seed) + ".csv");
    }
  }
  cases.push_back(std::move(al));
  return cases;
}

inline std::vector<ErrorCase> error_cases() {
  return {
      {"err_value_rankdef", "value \"{fix}/rankdef.csv\" --mode exact", 2,
       "ridge"},
      {"err_value_ragged", "value \"{fix}/ragged.csv\"", 2, "line 2"},
      {"err_sample_epsilon", "sample \"{fix}/gauss.csv\" --lambda 1 "
       "--epsilon 0.7", 2, "epsilon"},
      {"err_design_budget",
       "design \"{fix}/id2.csv\" --lambda 1 --criterion D --budget 5", 2,
       "budget"},
      {"err_shapley_players",
       "shapley \"{fix}/tall25x2.csv\" --utility span --exact", 2,
       "exceeds 20"},
      {"err_al_budget",
       "al --synthetic-n 20 --classes 2 --dim 3 --data-seed 1 "
       "--strategy random --seeds 0 --rounds 5 --per-round 10 --init 5 "
       "--out-dir \"{tmp}\"",
       2, "exceeds pool size"},
      {"err_unknown_subcommand", "frobnicate", 2, ""},
  };
}

inline std::string replace_all(std::string text, const std::string& from,
                               const std::string& to) {
  for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos;
       pos += to.size()) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

inline bool read_bytes(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

inline void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

inline int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status < 0) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

// First byte where the strings differ, with a short printable context.
inline std::string first_diff(const std::string& want, const std::string& got) {
  std::size_t i = 0;
  while (i < want.size() && i < got.size() && want[i] == got[i]) ++i;
  auto snippet = [&](const std::string& s) {
    std::string clip = s.substr(i > 20 ? i - 20 : 0, 40);
    for (char& c : clip) {
      if (c == '\n') c = ' ';
    }
    return clip;
  };
  std::ostringstream msg;
  msg << "first difference at byte " << i << " (golden " << want.size()
      << " bytes, actual " << got.size() << "); golden '..." << snippet(want)
      << "...' vs actual '..." << snippet(got) << "...'";
  return msg.str();
}

struct Outcome {
  bool pass = false;
  std::string message;
};

// Validates the report envelope against the published schema
// (docs/report-schema.json): the five required fields with their types.
inline Outcome validate_envelope(const std::string& bytes) {
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(bytes);
  } catch (const std::exception& e) {
    return {false, std::string("report is not valid JSON: ") + e.what()};
  }
  if (!report.is_object() || report.size() != 5) {
    return {false, "report must be an object with exactly five fields"};
  }
  if (!report.contains("schema_version") ||
      report["schema_version"] != "1.0") {
    return {false, "schema_version must be \"1.0\""};
  }
  if (!report.contains("command") || !report["command"].is_string()) {
    return {false, "command must be a string"};
  }
  if (!report.contains("inputs_digest") ||
      !report["inputs_digest"].is_string()) {
    return {false, "inputs_digest must be a string"};
  }
  const std::string digest = report["inputs_digest"];
  if (digest.size() != 16) {
    return {false, "inputs_digest must be 16 hex characters"};
  }
  for (char c : digest) {
    if (!std::isxdigit(static_cast<unsigned char>(c)) ||
        std::isupper(static_cast<unsigned char>(c))) {
      return {false, "inputs_digest must be lowercase hex"};
    }
  }
  if (!report.contains("seed") || !report["seed"].is_number_unsigned()) {
    return {false, "seed must be a non-negative integer"};
  }
  if (!report.contains("payload") || !report["payload"].is_object()) {
    return {false, "payload must be an object"};
  }
  return {true, "envelope valid"};
}

inline Outcome compare_file(const std::string& golden_path,
                            const std::string& actual_path, bool update) {
  std::string actual;
  if (!read_bytes(actual_path, actual)) {
    return {false, "missing output file " + actual_path};
  }
  if (update) {
    write_bytes(golden_path, actual);
    return {true, "updated"};
  }
  std::string want;
  if (!read_bytes(golden_path, want)) {
    return {false, "missing golden " + golden_path +
                       " (run the runner with --update to seed it)"};
  }
  if (want != actual) {
    return {false, first_diff(want, actual)};
  }
  return {true, "byte-for-byte"};
}

inline Outcome run_report_case(const std::string& cli, const std::string& fix,
                               const std::string& work_root,
                               const ReportCase& c, bool update) {
  namespace fs = std::filesystem;
  const std::string tmp = work_root + "/" + c.name;
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  const std::string report_path = tmp + "/report.json";
  std::string cmd = "\"" + cli + "\" " + c.args + " --out \"" + report_path +
                    "\" >\"" + tmp + "/stdout.txt\" 2>\"" + tmp +
                    "/stderr.txt\"";
  cmd = replace_all(replace_all(cmd, "{fix}", fix), "{tmp}", tmp);

  const int code = run_command(cmd);
  if (code != 0) {
    std::string err;
    read_bytes(tmp + "/stderr.txt", err);
    return {false, "exit code " + std::to_string(code) + ": " + err};
  }

  Outcome report = compare_file(fix + "/golden/" + c.name + ".json",
                                report_path, update);
  if (!report.pass) return report;

  std::string report_bytes;
  read_bytes(report_path, report_bytes);
  const Outcome envelope = validate_envelope(report_bytes);
  if (!envelope.pass) return envelope;

  for (const std::string& f : c.extra_files) {
    const Outcome extra = compare_file(fix + "/golden/" + f, tmp + "/" + f,
                                       update);
    if (!extra.pass) return {false, f + ": " + extra.message};

    // Emitted CSVs must round-trip through the loader unchanged.
    if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") {
      std::string bytes;
      read_bytes(tmp + "/" + f, bytes);
      const levval::CsvTable table = levval::parse_csv(bytes);
      if (levval::format_csv(table.values, table.header) != bytes) {
        return {false, f + ": CSV does not round-trip through the loader"};
      }
    }
  }
  return {true, update ? "updated" : "byte-for-byte"};
}

inline Outcome run_error_case(const std::string& cli, const std::string& fix,
                              const std::string& work_root,
                              const ErrorCase& c) {
  namespace fs = std::filesystem;
  const std::string tmp = work_root + "/" + c.name;
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  std::string cmd = "\"" + cli + "\" " + c.args + " >\"" + tmp +
                    "/stdout.txt\" 2>\"" + tmp + "/stderr.txt\"";
  cmd = replace_all(replace_all(cmd, "{fix}", fix), "{tmp}", tmp);

  const int code = run_command(cmd);
  if (code != c.expected_exit) {
    return {false, "expected exit " + std::to_string(c.expected_exit) +
                       ", got " + std::to_string(code)};
  }
  if (!c.stderr_needle.empty()) {
    std::string err;
    read_bytes(tmp + "/stderr.txt", err);
    std::string out;
    read_bytes(tmp + "/stdout.txt", out);
    if (err.find(c.stderr_needle) == std::string::npos &&
        out.find(c.stderr_needle) == std::string::npos) {
      return {false, "diagnostic lacks '" + c.stderr_needle + "': " + err};
    }
  }
  return {true, "exit " + std::to_string(c.expected_exit)};
}

// Runs every case, logging one line each; returns the failure count.
inline int run_all(const std::string& cli, const std::string& fix,
                   const std::string& work_root, bool update,
                   std::ostream& log) {
  int failures = 0;
  for (const ReportCase& c : report_cases()) {
    const Outcome o = run_report_case(cli, fix, work_root, c, update);
    log << (o.pass ? "ok   " : "FAIL ") << c.name << ": " << o.message
        << "\n";
    if (!o.pass) ++failures;
  }
  for (const ErrorCase& c : error_cases()) {
    const Outcome o = run_error_case(cli, fix, work_root, c);
    log << (o.pass ? "ok   " : "FAIL ") << c.name << ": " << o.message
        << "\n";
    if (!o.pass) ++failures;
  }
  return failures;
}

}  // namespace golden
