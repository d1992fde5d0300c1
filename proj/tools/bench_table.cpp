// Times the batch harness on a reduced grid: serial reference vs OpenMP
// fan-out, and verifies that both produce identical statistics.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include "etc/plant.hpp"
#include "etc/stats.hpp"

using namespace etc;

namespace {

BatchSpec paper_spec() {
  Mat A(2, 2), B(2, 1), K(1, 2), P(2, 2), Q(2, 2);
  A << 0, 1, -2, 3;
  B << 0, 1;
  K << 1, -4;
  P << 1, 0.25, 0.25, 1;
  Q << 0.5, 0.25, 0.25, 1.5;
  const LinearPlant plant = make_linear_plant(A, B, K, P, Q, 0.48);

  BatchSpec spec;
  spec.model = loop_model(plant);
  spec.kappa = plant.kappa;
  for (double sigma : {0.001, 0.01, 0.1}) {
    spec.generators.push_back(StaticGenerator{sigma});
    for (double theta : {0.0, 1.0}) {
      DynamicGenerator dyn;
      dyn.sigma = sigma;
      dyn.theta = theta;
      dyn.lambda = (1.0 - sigma) * plant.kappa;
      spec.generators.push_back(dyn);
    }
  }
  spec.initial_conditions = circle_initial_conditions(10.0, 10);
  spec.sim.record_stride = 100;
  return spec;
}

double time_run(const BatchSpec& spec, int jobs, std::vector<CellResult>& out) {
  const auto start = std::chrono::steady_clock::now();
  out = run_table(spec, jobs);
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main() {
  const BatchSpec spec = paper_spec();
  std::cout << "grid: " << spec.generators.size() << " cells x "
            << spec.initial_conditions.size() << " initial conditions\n";

  std::vector<CellResult> serial, parallel;
  const double t_serial = time_run(spec, 1, serial);
  const double t_parallel = time_run(spec, 0, parallel);

  std::cout << "serial reference: " << t_serial << " s\n"
            << "openmp fan-out:   " << t_parallel << " s\n"
            << "speedup:          " << t_serial / t_parallel << "x\n";

  for (std::size_t i = 0; i < serial.size(); ++i) {
    if (serial[i].stats.mean != parallel[i].stats.mean ||
        serial[i].stats.sd != parallel[i].stats.sd ||
        serial[i].stats.count != parallel[i].stats.count) {
      std::cerr << "mismatch between serial and parallel results at cell " << i << "\n";
      return EXIT_FAILURE;
    }
  }
  std::cout << "serial and parallel results identical\n";
  return EXIT_SUCCESS;
}
