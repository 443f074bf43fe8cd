#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "kerrcat_app/commands.hpp"
#include "kerrcat_app/config.hpp"

namespace kerrcat::app::detail {

/// Positive LEP3 coordinates used by "lep3" grid units.
struct Lep3Units {
  double eps = 1.0;
  double delta = 1.0;
};

Lep3Units lep3_units(const model::ModelParams& p);

/// Grid values converted to rad/us.
std::vector<double> plane_values(const GridSpec& g, double lep3_value);

std::string config_hash_hex(const RunConfig& cfg);

/// "alpha=... kappa=..." provenance comment for CSV headers.
std::string provenance(const model::ModelParams& p, int dim);

Check make_check(std::string name, double value, double bound, bool passed);
/// value < bound
Check below(std::string name, double value, double bound);
/// value > bound
Check above(std::string name, double value, double bound);

/// Calls fn(i) for i in [0, n) on up to `workers` threads; each index is
/// handled exactly once and the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t nthreads = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  if (nthreads <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace kerrcat::app::detail
