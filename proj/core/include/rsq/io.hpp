#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rsq/dynamics.hpp"
#include "rsq/spectrum.hpp"
#include "rsq/sweep.hpp"

namespace rsq {

// 64-bit FNV-1a over bytes; used for provenance hashes of resolved configs.
std::uint64_t fnv1a64(std::string_view bytes);

// Lower-case 16-digit hex of a hash.
std::string hex16(std::uint64_t value);

// Shortest round-trippable-ish decimal with 12 significant digits ("%.12g");
// the fixed width keeps reruns byte-identical across platforms.
std::string format_g(double value);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// "# key=value" comment lines followed by a blank-free CSV body.
void write_comment_header(std::ostream& os, const KeyValues& provenance);

// Columns: t, g, r, n_th, dx2, dy2, n_sig.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const KeyValues& provenance);

enum class GridField { squeezing_db, antisqueezing_db, dx2_min, dy2_max };

// Matrix layout: first row lists axis2 values, first column axis1 values;
// failed cells render as nan.
void write_grid_matrix_csv(std::ostream& os, const SweepGrid& grid, GridField field,
                           const KeyValues& provenance);

// Long layout: one row per cell with every summary field and the error
// string for failed cells.
void write_grid_table_csv(std::ostream& os, const SweepGrid& grid,
                          const KeyValues& provenance);

// Columns: omega, s_squeeze_phase, s_antisqueeze_phase, sampled at the
// state of maximal squeezing; the two phases differ by pi/2.
void write_spectrum_csv(std::ostream& os, const DimensionlessRun& run,
                        const Trajectory& traj, const SqueezeEvents& events,
                        const std::vector<double>& omegas, const KeyValues& provenance);

} // namespace rsq
