#pragma once

// CSV formats.
//
// Sample files: a header line "p=<p>,n=<n>", then one row per step holding
// phi row 0 (n values), phi row 1, ..., then y (p values). Blank lines and
// lines starting with '#' are skipped.
//
// Output files: metrics (k,e12,e34,e_par,e_perp,delta12,delta34,delta_perp,rho_P
// with empty cells outside a metric's window), trajectory (k,theta1..thetaN)
// and bound violations (step,bound,bound_value,observed).
//
// Reals are written in shortest round-trip form, so re-reading a file
// reproduces the exact doubles.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sift/bounds.hpp"
#include "sift/harness.hpp"

namespace sift {

class SampleParseError : public std::runtime_error {
 public:
  SampleParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string format_real(double x);

void write_samples_csv(std::ostream& os, const std::vector<RegressionSample>& samples);
/// Throws SampleParseError carrying the offending 1-based line number.
std::vector<RegressionSample> read_samples_csv(std::istream& is);
std::vector<RegressionSample> read_samples_csv(const std::filesystem::path& path);

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records);
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
void write_violations_csv(std::ostream& os, const ViolationReport& report);

}  // namespace sift
