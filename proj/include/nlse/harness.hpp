#pragma once
// Experiment drivers: accuracy/energy tables as tidy CSV, and single runs that
// write field dumps, CSVs and a manifest into an output directory.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlse/config.hpp"

namespace nlse {

std::string library_version();

// Scientific notation with 4 significant digits ("1.667E-08"); empty for NaN.
std::string format_sci(double v);

struct TableOptions {
  // Full parameter sets (finer references, larger grids); otherwise a reduced set that
  // finishes in minutes. Cells outside the budget are emitted with status "skipped".
  bool full = false;
  double tol = 1e-12;
  // Progress lines, one per finished cell.
  std::ostream* log = nullptr;
};

struct TableCell {
  std::string block, row, column;
  double value = 0.0;
  std::optional<double> target;  // published value for this cell, when there is one
  // Provenance.
  std::string method, kernel;
  int dim = 0;
  std::string L, h, N;  // per axis, 'x'-separated when anisotropic
  double tau = 0.0;     // 0 for one-shot potentials
  std::string reference;
  std::string status = "ok";
  double seconds = 0.0;  // manifest only, kept out of the CSV
};

struct TableResult {
  int id = 0;
  std::string title;
  bool full = false;
  std::vector<TableCell> cells;
  double seconds = 0.0;
};

// 1..15; id 6 is a timing-scaling run.
std::vector<int> table_ids();
std::string table_title(int id);
// Throws std::invalid_argument for an unknown id.
TableResult reproduce_table(int id, const TableOptions& opts = {});

// Columns: table,block,row,column,value,target,method,kernel,dim,L,h,N,tau,reference,status
void write_table_csv(std::ostream& out, const TableResult& t);

struct RunReport {
  std::vector<std::string> files;  // relative to the output directory
  double seconds = 0.0;
};

// Executes one configured command into cfg.out (created if needed) and writes manifest.json.
// Errors propagate: ConfigError / std::invalid_argument for bad input, ConvergenceError
// for iterations that miss their tolerance, std::runtime_error for I/O.
RunReport run(const RunConfig& cfg, std::ostream& log);

// Process exit status for an exception escaping run(): 2 config, 3 convergence, 4 other.
int exit_code_for(const std::exception& e);

}  // namespace nlse
