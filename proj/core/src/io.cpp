#include "gaah/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "gaah/errors.hpp"

namespace gaah::io {

namespace {

constexpr const char* kModule = "io";

int sign(double v) { return (v > 0.0) - (v < 0.0); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const std::string t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ParameterDomainError(kModule, "not a number: '" + s + "'");
  }
  return v;
}

Metadata describe(const lattice::ModelParams& m) {
  return {{"model.N", std::to_string(m.N)},      {"model.lambda", format_double(m.lambda)},
          {"model.Delta", format_double(m.Delta)}, {"model.a", format_double(m.a)},
          {"model.beta", format_double(m.beta)},   {"model.phi", format_double(m.phi)}};
}

Metadata describe(const bath::BathParams& b) {
  return {{"bath.eta", format_double(b.eta)},
          {"bath.omega_c", format_double(b.omega_c)},
          {"bath.s", format_double(b.s)}};
}

void write_header(std::ostream& os, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << " = " << v << '\n';
}

void write_trajectory_csv(std::ostream& os, const dynamics::Trajectory& traj,
                          const Metadata& extra) {
  Metadata meta = describe(traj.model);
  for (auto& kv : describe(traj.bath)) meta.push_back(std::move(kv));
  meta.emplace_back("grid.dt", format_double(traj.grid.dt));
  meta.emplace_back("grid.steps", std::to_string(traj.grid.steps));
  meta.emplace_back("grid.t_max", format_double(traj.grid.t_max()));
  for (const auto& kv : traj.metadata) meta.push_back(kv);
  if (traj.recurrence_time) meta.emplace_back("recurrence_time", format_double(*traj.recurrence_time));
  for (const auto& kv : extra) meta.push_back(kv);
  write_header(os, meta);
  os << "t,SP,IPR,norm,variance,ReS,ImS\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_double(traj.grid.time(i)) << ',' << format_double(traj.sp[i]) << ','
       << format_double(traj.ipr[i]) << ',' << format_double(traj.norm[i]) << ','
       << format_double(traj.variance[i]) << ',' << format_double(traj.collective[i].real())
       << ',' << format_double(traj.collective[i].imag()) << '\n';
  }
}

TrajectoryFile read_trajectory_csv(std::istream& is) {
  TrajectoryFile out;
  auto& traj = out.trajectory;
  std::string line;
  bool header_seen = false;
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      out.metadata.emplace_back(trim(std::string_view(line).substr(1, eq - 1)),
                                trim(std::string_view(line).substr(eq + 1)));
      continue;
    }
    if (!header_seen) {
      if (trim(line) != "t,SP,IPR,norm,variance,ReS,ImS") {
        throw ParameterDomainError(kModule, "unexpected trajectory column header: " + line);
      }
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell));
    if (row.size() != 7) throw ParameterDomainError(kModule, "trajectory row needs 7 columns");
    times.push_back(row[0]);
    traj.sp.push_back(row[1]);
    traj.ipr.push_back(row[2]);
    traj.norm.push_back(row[3]);
    traj.variance.push_back(row[4]);
    traj.collective.emplace_back(row[5], row[6]);
  }
  if (!header_seen || times.size() < 2) {
    throw ParameterDomainError(kModule, "trajectory file has no data rows");
  }
  traj.grid.steps = times.size() - 1;
  traj.grid.dt = (times.back() - times.front()) / static_cast<double>(traj.grid.steps);
  for (const auto& [k, v] : out.metadata) {
    if (k == "grid.dt") traj.grid.dt = parse_double(v);
  }
  return out;
}

void write_poles_csv(std::ostream& os, const std::vector<resonance::ResonancePole>& poles,
                     const Metadata& meta) {
  write_header(os, meta);
  os << "index,ReE,ImE,residual,null_residual,overlap\n";
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const auto& p = poles[i];
    os << i + 1 << ',' << format_double(p.E.real()) << ',' << format_double(p.E.imag()) << ','
       << format_double(p.residual) << ',' << format_double(p.null_residual) << ','
       << (p.overlap ? format_double(*p.overlap) : std::string("nan")) << '\n';
  }
}

void write_grid_csv(std::ostream& os, const resonance::DeterminantGrid& grid,
                    const Metadata& meta) {
  write_header(os, meta);
  os << "ReE,ImE,ReDet,ImDet,signRe,signIm\n";
  for (int j = 0; j <= grid.resolution.im; ++j) {
    for (int i = 0; i <= grid.resolution.re; ++i) {
      const auto E = grid.node(i, j);
      const auto d = grid.value(i, j);
      os << format_double(E.real()) << ',' << format_double(E.imag()) << ','
         << format_double(d.real()) << ',' << format_double(d.imag()) << ',' << sign(d.real())
         << ',' << sign(d.imag()) << '\n';
    }
  }
}

}  // namespace gaah::io
