#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mec::cli {

/// Exit codes shared by every subcommand.
enum Exit : int { ok = 0, failure = 1, invalid = 2 };

/// Alpha range and policy set for the `sweep` subcommand.
struct SweepSpec {
    double alpha_start = 0.02;
    double alpha_end = 0.40;
    double alpha_step = 0.02;
    std::vector<std::string> policies{"local", "cloud", "greedy", "optimal"};
    int grid = 100;
    bool refine = false;  ///< refine eta between grid points for "optimal"

    /// Throws InvalidArgument unless 0 < start <= end <= 1, step > 0 and
    /// every policy name is known.
    void validate() const;
    /// start, start + step, ... up to end (inclusive, with a small tolerance),
    /// each value rounded to 12 significant digits.
    std::vector<double> alphas() const;
};

/// Runs the command line given as `args` (without the program name).
/// Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mec::cli
