#pragma once
// Small numeric helpers shared across modules: stable complex expm1, grid
// generators, log-log line fits, a deterministic gaussian sampler, and a
// slot-based parallel_for whose results never depend on the worker count.

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace hstokes {

using Complex = std::complex<double>;

// e^z - 1 without cancellation for small |z|; exact formula, valid for all z.
Complex expm1c(Complex z);

// count values log-spaced on [lo, hi] inclusive (lo, hi > 0, count >= 2).
std::vector<double> logspace(double lo, double hi, int count);

// count values linearly spaced on [lo, hi] inclusive.
std::vector<double> linspace(double lo, double hi, int count);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of fit residuals
};

// Least-squares line through (x_i, y_i); requires >= 2 distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Fit of log(y) against log(x); inputs must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

// Deterministic standard-normal sampler: Box-Muller over mt19937_64 output
// (the engine sequence is pinned by the standard; std::normal_distribution
// is not, so seeded reports would otherwise depend on the libstdc++ build).
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}
  double next();
  Complex next_complex();  // (g1 + i g2) / sqrt(2), unit variance

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
  double next_uniform();  // in (0, 1]
};

// Runs fn(i) for i in [0, count) on up to `workers` threads. Static block
// partition; callers write results into pre-sized slots indexed by i and
// reduce sequentially afterwards, so the outcome is worker-count invariant.
void parallel_for(long count, int workers, const std::function<void(long)>& fn);

// Hardware concurrency with a floor of 1 (the usual `workers` argument).
int default_workers();

}  // namespace hstokes
