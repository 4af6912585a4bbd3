#pragma once

// Command-line front end. `run` parses the arguments, evaluates the requested
// quantity and writes a CSV (or JSON) table plus a JSON metadata sidecar.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace casdec::cli {

enum ExitCode { kOk = 0, kUsage = 2, kComputation = 3 };

struct RunConfig {
  std::string command;
  double L_si = 1e-6;
  double alpha = 1.0 / 137.035999;
  double epsilon = 1e-3;
  long m_max = 10000;
  long n_max = 0;
  int samples = 401;
  double dx = 0.1;
  bool samples_given = false;
  double t_max = 5.0;
  bool t_max_given = false;
  double dt = 1e-3;
  bool dt_given = false;
  std::string mode;
  int which = 0;
  std::string out;
  std::string format = "csv";
  std::string config;
  // command-specific extras
  double x = 0.0;
  bool x_given = false;
  double T = 20.0;
  double omega = 1.0;
  double mass = 0.0;  // 0: grid default
  std::string state = "ground";
  std::string profile = "bump";
  double ramp = 0.0;  // 0: a quarter of the window
  std::string checkpoint;
  long record_every = 0;
  long eigen_every = 0;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();  // derived run metadata
};

/// Runs one command. Normal output goes to `out` when no --out path is given;
/// errors are written to `err` as one JSON line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Evaluates a parsed configuration (no I/O).
Table evaluate(const RunConfig& cfg);

/// CSV with a header row, numbers in %.17g.
void write_csv(const Table& table, std::ostream& os);

}  // namespace casdec::cli
