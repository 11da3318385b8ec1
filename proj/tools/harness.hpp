#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qstat::cli {

struct RunConfig {
  std::vector<double> betas;
  std::vector<double> lambdas;
  std::vector<double> mus;
  std::vector<double> xs;
  int n_lo = 0;
  int n_hi = 0;
  std::vector<std::string> methods;
  double tol_series = 1e-12;
  double tol_root = 1e-12;
  std::string out_dir = "out";
  std::string format = "csv";  // csv | json
  int jobs = 1;
  bool overwrite = true;
};

struct ResultRow {
  std::optional<double> beta_or_x;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<int> n;
  std::string method;
  std::string kind;  // E | Z | F | Ebar
  double value = 0.0;
  std::optional<double> ref_value;
  std::optional<double> rel_err;
};

// Grid syntax: "a,b,c" | "lin:lo:hi:count" | "log:lo:hi:count".
std::vector<double> parse_grid(const std::string& spec);

// Loads config keys {beta, lambda, mu, x, n_range, methods, out, format,
// jobs, tol_series, tol_root} from a JSON document; unknown keys rejected.
void load_config_file(const std::string& path, RunConfig& cfg);

void validate(const RunConfig& cfg);  // throws std::invalid_argument

// Deterministic canonical ordering used by every writer.
void sort_rows(std::vector<ResultRow>& rows);

// Atomic writers (write to a temp file in the target directory, then
// rename).  Values are printed with 12 significant digits; absent fields
// are empty in CSV and omitted in JSON.
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);
void write_json(const std::string& path, const RunConfig& cfg,
                const std::vector<ResultRow>& rows);

// Commands; each returns the number of per-row failures it logged.
int cmd_spectrum(const RunConfig& cfg);
int cmd_rotator(const RunConfig& cfg);
int cmd_qao_thermo(const RunConfig& cfg);
int cmd_avg_energy(const RunConfig& cfg);

// Runs the acceptance suite, writes <out>/verify.json, prints one line per
// criterion; returns the number of failed criteria.
int cmd_verify(const RunConfig& cfg);

}  // namespace qstat::cli
