#include "etc/csv.hpp"

#include <cstdio>
#include <sstream>

namespace etc {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  os << ",eta,V,W,trigger\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << format_double(traj.times[k]);
    for (int i = 0; i < n; ++i) os << ',' << format_double(traj.states[k][i]);
    os << ',' << format_double(traj.etas[k]) << ',' << format_double(traj.V_values[k]) << ','
       << format_double(traj.W_values[k]) << ',' << format_double(traj.trigger_values[k])
       << '\n';
  }
}

void write_execution_times_csv(std::ostream& os, const Trajectory& traj) {
  os << "i,t_i\n";
  for (std::size_t i = 0; i < traj.execution_times.size(); ++i) {
    os << i << ',' << format_double(traj.execution_times[i]) << '\n';
  }
}

void write_table_header(std::ostream& os) {
  os << "generator,sigma,theta,lambda,mean,sd,cv,min,count\n";
}

void write_table_row(std::ostream& os, const CellResult& cell) {
  if (const auto* dyn = std::get_if<DynamicGenerator>(&cell.gen)) {
    os << "dynamic," << format_double(dyn->sigma) << ',' << format_double(dyn->theta) << ','
       << (dyn->lambda ? format_double(*dyn->lambda) : std::string());
  } else {
    os << "static," << format_double(generator_sigma(cell.gen)) << ",,";
  }
  if (!cell.ok()) {
    os << ",error: " << cell.error << ",,,,\n";
    return;
  }
  os << ',' << format_double(cell.stats.mean) << ',' << format_double(cell.stats.sd) << ','
     << format_double(cell.stats.cv) << ',' << format_double(cell.stats.min) << ','
     << cell.stats.count << '\n';
}

std::string generator_label(const Generator& gen) {
  std::ostringstream os;
  if (const auto* dyn = std::get_if<DynamicGenerator>(&gen)) {
    os << "dynamic_sigma" << dyn->sigma << "_theta" << dyn->theta;
  } else {
    os << "static_sigma" << generator_sigma(gen);
  }
  return os.str();
}

}  // namespace etc
