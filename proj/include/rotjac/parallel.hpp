#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rotjac {

/// Static-chunk parallel loop. Work item i must depend only on i (the
/// experiment harnesses key their RNG streams that way), so the split cannot
/// affect results. The first exception thrown by a worker is rethrown.
inline void parallel_for(std::size_t n, unsigned parallelism,
                         const std::function<void(std::size_t)>& body) {
  if (parallelism == 0) parallelism = std::thread::hardware_concurrency();
  if (parallelism == 0) parallelism = 1;
  if (parallelism == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(parallelism, n);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Pairwise-tree reduction over [lo, hi). The order of floating-point adds is
/// a function of the index range alone, which pins summaries byte-for-byte
/// regardless of how samples were computed.
inline double pairwise_reduce(std::size_t lo, std::size_t hi,
                              const std::function<double(std::size_t)>& term) {
  const std::size_t n = hi - lo;
  if (n <= 8) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = lo + n / 2;
  return pairwise_reduce(lo, mid, term) + pairwise_reduce(mid, hi, term);
}

struct MeanSE {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Mean and standard error (sample stddev / sqrt(n)) over the entries of
/// `values` whose `include` flag is set; excluded entries contribute zero to
/// the fixed-shape pairwise tree.
inline MeanSE mean_se(const std::vector<double>& values, const std::vector<char>& include) {
  const std::size_t n = values.size();
  const double cnt =
      pairwise_reduce(0, n, [&](std::size_t i) { return include[i] ? 1.0 : 0.0; });
  MeanSE out;
  out.count = static_cast<std::size_t>(cnt);
  if (out.count == 0) return out;
  const double sum =
      pairwise_reduce(0, n, [&](std::size_t i) { return include[i] ? values[i] : 0.0; });
  out.mean = sum / cnt;
  if (out.count < 2) return out;
  const double sumsq = pairwise_reduce(
      0, n, [&](std::size_t i) { return include[i] ? values[i] * values[i] : 0.0; });
  const double var = std::max(0.0, (sumsq - cnt * out.mean * out.mean) / (cnt - 1.0));
  out.std_error = std::sqrt(var / cnt);
  return out;
}

inline MeanSE mean_se(const std::vector<double>& values) {
  return mean_se(values, std::vector<char>(values.size(), 1));
}

}  // namespace rotjac
