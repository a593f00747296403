#include "chemostat/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "chemostat/errors.hpp"

namespace chemostat::csv {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string method_label(LambdaMethod method) {
  return method == LambdaMethod::ErgodicMC ? "ergodic_mc" : "closed_form_quadrature";
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  out << kTrajectoryHeader << '\n';
  for (const auto& s : trajectory.with_terminal()) {
    out << format_number(s.t) << ',' << format_number(s.s) << ',' << format_number(s.x) << ',' << s.regime + 1
        << '\n';
  }
}

void write_lambda(std::ostream& out, std::span<const LambdaEstimate> rows) {
  out << kLambdaHeader << '\n';
  for (const auto& r : rows) {
    out << method_label(r.method) << ',' << format_number(r.value) << ',' << format_number(r.std_error) << ','
        << format_number(r.burn_in) << ',' << format_number(r.horizon) << ',' << r.replicas << '\n';
  }
}

void write_washout(std::ostream& out, const WashoutResult& r) {
  out << kWashoutHeader << '\n';
  out << format_number(r.theta0) << ',' << format_number(r.theta_lo) << ',' << format_number(r.theta_hi) << ','
      << r.iterations << ',' << format_number(r.lambda_at_root) << ',' << format_number(r.lambda_at_root_se) << ','
      << method_label(r.method) << '\n';
}

void write_sweep(std::ostream& out, std::span<const EffluentRow> rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_number(r.theta) << ',' << format_number(r.lambda) << ',' << format_number(r.lambda_se) << ','
        << format_number(r.es_star) << ',' << format_number(r.es_star_se) << '\n';
  }
}

void write_histogram(std::ostream& out, const RegimeHistogram& h) {
  out << kHistogramHeader << '\n';
  for (std::size_t r = 0; r < h.regimes; ++r) {
    for (std::size_t i = 0; i < h.s_bins(); ++i) {
      for (std::size_t j = 0; j < h.x_bins(); ++j) {
        out << r + 1 << ',' << format_number(h.s_edges[i]) << ',' << format_number(h.s_edges[i + 1]) << ','
            << format_number(h.x_edges[j]) << ',' << format_number(h.x_edges[j + 1]) << ','
            << format_number(h.mass(r, i, j)) << '\n';
      }
    }
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::SchemaError, "missing CSV column " + name);
}

double Table::number(std::size_t row, const std::string& name) const {
  const std::string& cell = rows.at(row).at(column(name));
  std::size_t used = 0;
  const double v = std::stod(cell, &used);
  if (used != cell.size()) throw Error(ErrorCode::SchemaError, "malformed number '" + cell + "'");
  return v;
}

Table read(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, "empty CSV");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) throw Error(ErrorCode::SchemaError, "row width differs from header");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::vector<SystemState> read_trajectory(std::istream& in) {
  const Table t = read(in);
  if (t.header != split(kTrajectoryHeader)) throw Error(ErrorCode::SchemaError, "not a trajectory CSV");
  std::vector<SystemState> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto regime = static_cast<std::size_t>(std::stoul(t.rows[r][3]));
    if (regime < 1) throw Error(ErrorCode::SchemaError, "regimes are 1-based");
    out.push_back({t.number(r, "t"), t.number(r, "s"), t.number(r, "x"), regime - 1});
  }
  return out;
}

}  // namespace chemostat::csv
