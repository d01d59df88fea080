// Serial reference vs OpenMP kernels on the reference setup.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "qquiz/experiments.hpp"
#include "qquiz/protocol.hpp"

using namespace qquiz;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-14s serial %8.4f s   parallel %8.4f s   speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig one;
  one.threads = 1;
  RunConfig many;
  many.threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
  std::printf("threads: %d\n", many.threads);

  const ChainSpec cand = one.candidate();
  const double t_serial = seconds([&] { build_table_serial(one.grid, cand, one.coupling); }, 3);
  const double t_par = seconds([&] { build_table(one.grid, cand, one.coupling, many.threads); }, 3);
  row("table", t_serial, t_par);

  const LookupTable table = build_table(one.grid, cand, one.coupling);
  row("sweep", seconds([&] { sweep_rows(one, table); }, 3), seconds([&] { sweep_rows(many, table); }, 3));
  row("noise eps 0.1", seconds([&] { noise_row(one, table, 0.1, 2); }, 1),
      seconds([&] { noise_row(many, table, 0.1, 2); }, 1));
  row("measure", seconds([&] { measure_rows(one); }, 1), seconds([&] { measure_rows(many); }, 1));
  return 0;
}
