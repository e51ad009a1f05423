#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "conform/config.hpp"

namespace conform {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitDegenerate = 2, kExitNumerics = 3 };

struct RunResult {
  int exit_code = kExitOk;
  std::string message;                      // diagnostic when exit_code != 0
  std::vector<std::array<double, 4>> rows;  // t, x, dax, residual
  std::string report;                       // JSON text; empty on config errors
  std::string csv_name = "trajectory.csv";
  std::string json_name = "report.json";
};

// Executes one task. Degenerate and numerics failures are caught and
// reported through exit_code; the JSON report is still produced.
RunResult run(const RunConfig& rc);

// Accepts a flat config or a JSON report whose "config" member is re-run.
RunResult run_text(std::string_view text, const Overrides& ov = {});
RunResult run_file(const std::string& path, const Overrides& ov = {});

// Header t,x,dax,residual; %.15g; LF endings.
std::string format_csv(const std::vector<std::array<double, 4>>& rows);

// Writes the CSV (when rows exist) and the JSON report into dir.
void write_outputs(const RunResult& r, const std::string& dir);

}  // namespace conform
