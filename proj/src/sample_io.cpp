#include "sift/sample_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "sift/error.hpp"

namespace sift {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void write_optional(std::ostream& os, const std::optional<double>& v) {
  os << ',';
  if (v) os << format_real(*v);
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void write_samples_csv(std::ostream& os, const std::vector<RegressionSample>& samples) {
  const Index p = samples.empty() ? 0 : samples.front().measurements();
  const Index n = samples.empty() ? 0 : samples.front().parameters();
  os << "p=" << p << ",n=" << n << '\n';
  for (const auto& s : samples) {
    if (s.measurements() != p || s.parameters() != n)
      throw ShapeError("write_samples_csv: samples have inconsistent dimensions");
    bool first = true;
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < n; ++j) {
        if (!first) os << ',';
        os << format_real(s.phi()(i, j));
        first = false;
      }
    for (Index i = 0; i < p; ++i) os << ',' << format_real(s.y()(i));
    os << '\n';
  }
}

std::vector<RegressionSample> read_samples_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  long p = -1;
  long n = -1;
  std::vector<RegressionSample> out;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text, ',');

    if (p < 0) {
      for (auto field : fields) {
        field = trim(field);
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) throw SampleParseError(lineno, "expected header 'p=<p>,n=<n>'");
        const auto key = trim(field.substr(0, eq));
        long value = 0;
        if (!parse_number(field.substr(eq + 1), value) || value < 1)
          throw SampleParseError(lineno, "header value for '" + std::string(key) + "' must be a positive integer");
        if (key == "p") p = value;
        else if (key == "n") n = value;
        else throw SampleParseError(lineno, "unknown header key '" + std::string(key) + "'");
      }
      if (p < 1 || n < 1) throw SampleParseError(lineno, "header must declare both p and n");
      continue;
    }

    const std::size_t expected = static_cast<std::size_t>(p * n + p);
    if (fields.size() != expected)
      throw SampleParseError(lineno, "expected " + std::to_string(expected) + " values, found " +
                                         std::to_string(fields.size()));
    Matrix phi(p, n);
    Vector y(p);
    std::size_t idx = 0;
    auto next = [&](double& dst) {
      if (!parse_number(fields[idx], dst) || !std::isfinite(dst))
        throw SampleParseError(lineno, "field " + std::to_string(idx + 1) + " is not a finite number");
      ++idx;
    };
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < n; ++j) next(phi(i, j));
    for (Index i = 0; i < p; ++i) next(y(i));
    out.emplace_back(std::move(phi), std::move(y));
  }
  if (p < 0) throw SampleParseError(lineno == 0 ? 1 : lineno, "missing header 'p=<p>,n=<n>'");
  return out;
}

std::vector<RegressionSample> read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_samples_csv(in);
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRecord>& records) {
  os << "k,e12,e34,e_par,e_perp,delta12,delta34,delta_perp,rho_P\n";
  for (const auto& r : records) {
    os << r.k;
    write_optional(os, r.e12);
    write_optional(os, r.e34);
    write_optional(os, r.e_par);
    write_optional(os, r.e_perp);
    write_optional(os, r.delta12);
    write_optional(os, r.delta34);
    write_optional(os, r.delta_perp);
    os << ',' << format_real(r.rho_p) << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  const Index n = trajectory.theta.empty() ? 0 : trajectory.theta.front().size();
  os << 'k';
  for (Index i = 0; i < n; ++i) os << ",theta" << (i + 1);
  os << '\n';
  for (std::size_t k = 0; k < trajectory.theta.size(); ++k) {
    os << k;
    for (Index i = 0; i < n; ++i) os << ',' << format_real(trajectory.theta[k](i));
    os << '\n';
  }
}

void write_violations_csv(std::ostream& os, const ViolationReport& report) {
  os << "step,bound,bound_value,observed\n";
  for (const auto& v : report)
    os << v.step << ',' << v.bound << ',' << format_real(v.bound_value) << ',' << format_real(v.observed) << '\n';
}

}  // namespace sift
