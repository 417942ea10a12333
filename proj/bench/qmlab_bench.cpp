// Serial reference vs OpenMP sweeps on the two dominant workloads: the
// exhaustive defect search and the root-condition spread of a ladder.
//
//   qmlab_bench [max_length] [repeats]

#include "qmlab/kernels.hpp"
#include "qmlab/ladder.hpp"
#include "qmlab/qmcore.hpp"
#include "qmlab/words.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace qmlab;

namespace {

double seconds(const std::function<void()>& f, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, const char* ref, double serial, const char* fast, double parallel, bool agree) {
  std::printf("%-24s %-6s %8.3fs  %-8s %8.3fs  ratio %7.2fx  %s\n", name, ref, serial, fast, parallel,
              parallel > 0 ? serial / parallel : 0.0, agree ? "agree" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = kernels::apply_thread_limit_from_env();
  const std::size_t L = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 5;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("threads %d, max_length %zu, best of %d\n", threads, L, repeats);

  auto f2 = make_presentation(Presentation::free(2));
  const Quasimorphism mu = counting_qm(parse_word(f2, "a b"));

  DefectEstimate ds, dp;
  const double ts = seconds([&] { ds = defect_search(mu, f2, L, kernels::Execution::serial); }, repeats);
  const double tp = seconds([&] { dp = defect_search(mu, f2, L, kernels::Execution::parallel); }, repeats);
  report("defect search (F2, ab)", "serial", ts, "parallel", tp, ds.value == dp.value);

  // Root-condition spread over words of length <= 4: the naive triple loop is
  // O(n m^2) evaluations, the parallel sweep O(n m), so most of the ratio is
  // algorithmic and only the rest comes from threads.
  const auto words = enumerate(f2, std::min<std::size_t>(L, 4));
  auto f = [&](std::size_t i, std::size_t j) {
    return std::optional<Rational>{mu(multiply(words[i], words[j])) - mu(words[j])};
  };
  kernels::ArgMax rs, rp;
  const double ss = seconds([&] { rs = kernels::spread_naive(words.size(), words.size(), f); }, 1);
  const double sp = seconds([&] { rp = kernels::spread_parallel(words.size(), words.size(), f); }, repeats);
  report("root spread (F2, ab)", "naive", ss, "sweep", sp, rs.value == rp.value);
  return ds.value == dp.value && rs.value == rp.value ? 0 : 1;
}
