#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "etc/sim.hpp"
#include "etc/stats.hpp"

namespace etc {

/// Shortest representation preserving the value (17 significant digits).
std::string format_double(double value);

/// Header t,x1,...,xn,eta,V,W,trigger followed by one row per sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Header i,t_i followed by one row per execution.
void write_execution_times_csv(std::ostream& os, const Trajectory& traj);

void write_table_header(std::ostream& os);
void write_table_row(std::ostream& os, const CellResult& cell);

/// Stable file-name fragment for a generator, e.g. "static_sigma0.001" or
/// "dynamic_sigma0.001_theta1".
std::string generator_label(const Generator& gen);

}  // namespace etc
