#pragma once

#include "mixeig/bounds.hpp"
#include "mixeig/core.hpp"
#include "mixeig/iterate.hpp"
#include "mixeig/shoot.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixeig::cli {

/// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCompute = 3;
inline constexpr int kExitViolation = 4;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { Bounds, Iterate, Shoot, Figure, Certify };

std::string to_string(Command c);
Command parse_command(std::string_view text);

/// Inclusive grid lo, lo + step, ... up to hi.
struct PRange {
    double lo = 1.1;
    double hi = 8.0;
    double step = 0.1;

    std::vector<double> values() const;
    std::string text() const;
};
/// "LO:HI:STEP"
PRange parse_p_range(std::string_view text);

/// Parses "inf" (any case, optionally signed +) or a positive real.
double parse_length(std::string_view text);

struct RunConfig {
    Command command = Command::Bounds;
    WeightFn u = WeightFn::constant(1.0);
    WeightFn v = WeightFn::constant(1.0);
    double D = 1.0;
    double p = 2.0;
    std::optional<PRange> p_range;
    Boundary boundary = Boundary::ND;
    /// Relative tolerance of quadrature; the ODE integrator uses a tenth of it (at most 1e-11).
    double rel_tol = 1e-10;
    /// Mesh cells of the iterations.
    int grid = 512;
    /// Coarse grid size of the two-parameter family search.
    int grid_m = 24;
    int n_max = 20;
    /// Steps of the family (upper) sequences; each costs a full search.
    int upper_n_max = 3;
    std::optional<std::string> out;
    /// Worker threads for figure sweeps; 0 picks the hardware concurrency.
    unsigned threads = 0;

    /// Throws ConfigError.
    void validate() const;
    ProblemSpec problem_spec(double p_value) const;
    ShootConfig shoot_config() const;
    IterateConfig iterate_config() const;
    /// One-line echo of every setting, in flag syntax.
    std::string header() const;
};

/// Reads a JSON configuration (schema in the README). Throws ConfigError.
RunConfig parse_config(const std::string& json_text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// One row of a figure sweep; all columns are 1/p-th powers.
struct SweepRow {
    double p = 0.0;
    double sigma_root = 0.0;
    double basic_lower_root = 0.0;
    double basic_upper_root = 0.0;
    double delta1_inv_root = 0.0;
    double delta1_prime_inv_root = 0.0;
    double bar_delta1_inv_root = 0.0;
    double lambda_root = 0.0;
    std::optional<double> exact_lambda_root;
};

/// basic_lower <= 1/delta1 <= lambda <= min(1/delta1', 1/bar delta1) <= basic_upper, with
/// relative slack.
bool row_ordered(const SweepRow& row, double slack = 1e-6);

/// True when the configured problem is u = v = 1 on (0, 1), where closed forms apply.
bool has_closed_form(const RunConfig& config);

SweepRow sweep_row(const RunConfig& config, double p);
/// Rows in p order, computed on config.threads workers.
std::vector<SweepRow> sweep(const RunConfig& config);

extern const char* const kCsvHeader;
/// Header row plus one line per row, 15 significant digits, LF endings.
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Outcome of `certify`: one line per checked inequality.
struct Certificate {
    bool ok = true;
    std::vector<std::string> lines;
};
Certificate certify(const RunConfig& config, double slack = 1e-6);

/// Runs the configured command, writing the report to `out` (or to config.out for figures)
/// and diagnostics to `err`. Returns an exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point: flag parsing, config loading and run().
int main(int argc, char** argv);

} // namespace mixeig::cli
