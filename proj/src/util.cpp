#include "hstokes/util.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace hstokes {

Complex expm1c(Complex z) {
  // e^{a+ib} - 1 = expm1(a) cos b - 2 sin^2(b/2) + i e^a sin b
  const double a = z.real(), b = z.imag();
  const double half = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * half * half, std::exp(a) * std::sin(b)};
}

std::vector<double> logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > 0.0) || count < 2)
    throw std::invalid_argument("logspace: need positive bounds and count >= 2");
  std::vector<double> v(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    v[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("linspace: count >= 2");
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
  return v;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need matching inputs, size >= 2");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy * sxx - sx * sxy) / det;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_loglog: inputs must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

double GaussianSource::next_uniform() {
  // 53-bit mantissa from the top bits; maps to (0, 1] so log() below is safe.
  const std::uint64_t r = eng_();
  return (double(r >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

double GaussianSource::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double m = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = m * std::sin(a);
  have_spare_ = true;
  return m * std::cos(a);
}

Complex GaussianSource::next_complex() {
  const double g1 = next();
  const double g2 = next();
  return Complex(g1, g2) * M_SQRT1_2;
}

void parallel_for(long count, int workers, const std::function<void(long)>& fn) {
  if (count <= 0) return;
  if (workers < 1) workers = 1;
  const long nthreads = std::min<long>(workers, count);
  if (nthreads == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nthreads);
  pool.reserve(nthreads);
  for (long t = 0; t < nthreads; ++t) {
    const long lo = count * t / nthreads;
    const long hi = count * (t + 1) / nthreads;
    pool.emplace_back([&, lo, hi, t] {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace hstokes
