#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace mbdos::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumeric = 3, kOracleMismatch = 4 };

struct RunConfig {
  std::string command;
  int n = 2;
  int d = 2;
  std::string stat = "fermion";
  double gamma = 0;
  // disk:R, ring:R1,R2, cylinder:C,L, segment:L, rectangle:A,B; overrides gamma.
  std::string geometry;
  std::string bc = "dirichlet";
  int chi = 0;
  double emin = 0;
  double emax = 10;
  int points = 101;
  double qmin = 1;
  double qmax = 50;
  int order = 1;
  std::vector<int> omit;
  std::string model = "equidistant:1";
  std::string preset;
  unsigned precision_bits = 256;
  std::string format = "csv";
  int digits = 15;
  std::string units = "natural";
  double mass = 1;
  double hbar = 1;
  double volume = 0;
  // Not part of the embedded config.
  std::string out;
};

// Canonical form embedded in every artifact (sorted keys, no output path).
nlohmann::json to_json(const RunConfig& c);
RunConfig from_json(const nlohmann::json& j);

// Throws DomainError on inconsistent settings.
void validate(const RunConfig& c);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  // Set by checking commands when a comparison failed.
  bool mismatch = false;
};

Table compute(const RunConfig& c);
std::string render(const RunConfig& c, const Table& t);

// Reads the embedded config back from a CSV or JSON artifact.
RunConfig config_from_artifact(const std::string& path);

// Full command-line entry point.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mbdos::cli
