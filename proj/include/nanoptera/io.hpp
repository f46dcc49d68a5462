#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

// Result-file plumbing shared by the command-line tools: CSV emission at
// full round-trip precision and a JSON manifest describing each invocation.

namespace nanoptera {

inline constexpr const char* tool_version = "nanoptera 1.0.0";

// Render a double with enough digits to round-trip exactly.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class csv_writer {
 public:
  csv_writer(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) {
      throw std::runtime_error("cannot open output file: " + path.string());
    }
    out_ << header << '\n';
  }

  // One row from mixed cell content; doubles go through format_full.
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void numeric_row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_full(cells[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

// Invocation record: which command ran, with which parameters, what it wrote.
// Every data file an invocation emits is listed in exactly one manifest (the
// one written alongside it by that invocation).
struct run_manifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::vector<std::string> outputs;
  std::string version = tool_version;
  double wall_time_seconds = 0.0;

  void write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["outputs"] = outputs;
    j["tool_version"] = version;
    j["wall_time_seconds"] = wall_time_seconds;
    std::ofstream out(path);
    if (!out) {
      throw std::runtime_error("cannot open manifest file: " + path.string());
    }
    out << j.dump(2) << '\n';
  }
};

// Wall-clock stopwatch for manifest timing.
class stopwatch {
 public:
  stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// The manifest sits next to the primary output: foo.csv -> foo.manifest.json.
inline std::filesystem::path manifest_path_for(const std::filesystem::path& primary) {
  std::filesystem::path p = primary;
  p.replace_extension("");
  p += ".manifest.json";
  return p;
}

}  // namespace nanoptera
