// cli.hpp
// Command-line surface: scenario configuration from flags and an optional
// line-based config file, deterministic CSV emission, and a human-readable
// summary. Exit codes: 0 success, 1 computation failure, 2 usage error.

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "threebox/railspace.hpp"

namespace threebox::cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string scenario;  // weak-values | scan | fig2 | two-pointer
    std::string states;    // preset name, or empty with explicit amplitudes
    std::optional<std::vector<Complex>> pre_amplitudes;
    std::optional<std::vector<Complex>> post_amplitudes;
    std::string rail;
    std::optional<double> k_min;
    std::optional<double> k_max;
    std::optional<int> steps;
    std::optional<double> theta_deg;
    double visibility = 1.0;
    std::string polarizer = "none";  // none | block-v | block-h
    double pixel_scale = 16.09;
    double k_c = -0.69;
    int points = 501;
    std::string output;
};

// Parses `scenario --key value ...`. A `--config FILE` flag loads
// `key = value` lines ('#' starts a comment); command-line flags override
// file values. Unknown keys, malformed numbers, and missing required keys
// throw UsageError naming the offending key.
RunConfig parse_config(const std::vector<std::string>& args);

// Executes a validated config: prints the summary to `out`, writes CSV for
// the scanning scenarios, returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_config + run with UsageError mapped to exit code 2.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

// One complex amplitude in the summary/flag format: "1", "-0.5", "1+2i",
// "3e-2i". Round-trips with format_complex.
Complex parse_complex(const std::string& text);
std::string format_complex(const Complex& z);

// Comma-separated list of complex amplitudes.
std::vector<Complex> parse_amplitudes(const std::string& text);

}  // namespace threebox::cli
