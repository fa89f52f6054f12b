#include "chaos_swr/stats.hpp"

#include <boost/math/distributions/beta.hpp>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace chaos {

Interval clopper_pearson(std::uint64_t k, std::uint64_t trials, double conf) {
  if (!(conf > 0.0 && conf < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  if (k > trials) throw std::invalid_argument("more successes than trials");
  const double alpha = 1.0 - conf;
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(trials);
  Interval ci;
  if (k > 0) ci.low = boost::math::quantile(boost::math::beta_distribution<>(kk, nn - kk + 1.0), alpha / 2);
  if (k < trials)
    ci.high = boost::math::quantile(boost::math::beta_distribution<>(kk + 1.0, nn - kk), 1.0 - alpha / 2);
  return ci;
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CHAOS_SWR_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_chunks(std::uint64_t count, std::size_t workers,
                     const std::function<void(std::uint64_t, std::uint64_t)>& body) {
  workers = std::max<std::size_t>(1, std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
  if (workers == 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::uint64_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = std::min<std::uint64_t>(count, w * chunk);
    const std::uint64_t end = std::min<std::uint64_t>(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace chaos
