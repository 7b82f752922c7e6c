#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <gaah/dynamics.hpp>
#include <gaah/io.hpp>
#include <gaah/resonance.hpp>

namespace gaah::cli {

struct Series {
  std::string label;
  const dynamics::Trajectory* trajectory = nullptr;
};

/// Observable selectable for a panel file.
enum class Observable { SP, IPR, Variance };

std::string_view to_string(Observable o);
const std::vector<double>& column(const dynamics::Trajectory& t, Observable o);

/// Panel file: `t` then, per series, `<label>` and for SP/IPR also
/// `log10_<label>` (floored at 1e-300). All series must share one grid.
/// Throws std::invalid_argument on an empty list or mismatched grids;
/// nothing is written in that case.
void write_panel_csv(std::ostream& os, Observable obs, const std::vector<Series>& series,
                     const io::Metadata& meta);

/// Minimal static line plot, log-scaled y for SP/IPR.
void write_panel_svg(const std::filesystem::path& path, const std::string& title, Observable obs,
                     const std::vector<Series>& series);

/// Sign map of Re det and Im det on the scan grid: cells where the sign
/// of either part changes are drawn as short segments.
void write_grid_svg(const std::filesystem::path& path, const std::string& title,
                    const resonance::DeterminantGrid& grid);

}  // namespace gaah::cli
