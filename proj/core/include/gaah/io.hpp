#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gaah/bath.hpp"
#include "gaah/dynamics.hpp"
#include "gaah/lattice.hpp"
#include "gaah/resonance.hpp"

namespace gaah::io {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Parameter header entries named like the configuration keys.
Metadata describe(const lattice::ModelParams& m);
Metadata describe(const bath::BathParams& b);

/// "# key = value" lines.
void write_header(std::ostream& os, const Metadata& meta);

/// Columns t,SP,IPR,norm,variance,ReS,ImS after a commented header carrying
/// model, bath, grid and solver metadata plus `extra`.
void write_trajectory_csv(std::ostream& os, const dynamics::Trajectory& traj,
                          const Metadata& extra = {});

struct TrajectoryFile {
  Metadata metadata;
  dynamics::Trajectory trajectory;
};

/// Reads a file produced by write_trajectory_csv. Only the series and grid
/// are restored; parameters stay in `metadata`.
TrajectoryFile read_trajectory_csv(std::istream& is);

/// One row per pole: index,ReE,ImE,residual,null_residual,overlap.
void write_poles_csv(std::ostream& os, const std::vector<resonance::ResonancePole>& poles,
                     const Metadata& meta);

/// Node samples: ReE,ImE,ReDet,ImDet,signRe,signIm.
void write_grid_csv(std::ostream& os, const resonance::DeterminantGrid& grid,
                    const Metadata& meta);

}  // namespace gaah::io
