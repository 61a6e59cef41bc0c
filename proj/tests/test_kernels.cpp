#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "hstokes/kernels.hpp"

using hstokes::Complex;
namespace K = hstokes::kernels;
using K::KernelPoint;
using K::ResolventParams;

namespace {

// Richardson-extrapolated central difference: O(h^4).
template <class F>
Complex fd_richardson(F f, double x, double h) {
  auto d = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

std::vector<ResolventParams> sector_samples() {
  std::vector<ResolventParams> out;
  const double eps = M_PI / 6.0;
  const double thm = M_PI - eps - M_PI / 90.0;
  for (double mod : {1.0, 10.0, 100.0, 1e4})
    for (double th : {0.0, thm, -thm})
      for (double alpha : {0.0, 1.0, 10.0})
        out.push_back({std::polar(mod, th), alpha, 2});
  return out;
}

double rel(Complex got, Complex want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

}  // namespace

TEST_CASE("principal square root of the shifted resolvent parameter") {
  // (lambda, s) = (-1 + 0.5i, 1): lambda + s^2 = 0.5i, sqrt = 0.5 + 0.5i exactly.
  ResolventParams p{{-1.0, 0.5}, 0.0, 2};
  const Complex q = K::sqrt_shifted(p, 1.0);
  CHECK(std::abs(q - Complex(0.5, 0.5)) <= 1e-15);

  // Re q > 0 on the whole slit plane; Re q >= s exactly on the acute part
  // (Re lambda >= 0 <=> 4 s^2 Re lambda + (Im lambda)^2 >= 0 for all s).
  for (const auto& pp : sector_samples())
    for (double s : {0.0, 1e-3, 0.25, 1.0, 32.0, 1e3}) {
      const Complex qq = K::sqrt_shifted(pp, s);
      CHECK(qq.real() > 0.0);
      if (pp.lambda.real() >= 0.0) CHECK(qq.real() >= s - 1e-12);
    }

  // Beyond 90 degrees the pointwise inequality genuinely fails; pin one
  // obtuse-angle counterexample so the certification counters stay honest.
  ResolventParams obtuse{std::polar(100.0, M_PI - M_PI / 6.0 - M_PI / 90.0), 0.0, 2};
  const Complex qc = K::sqrt_shifted(obtuse, 10.0);
  CHECK(qc.real() == doctest::Approx(5.9296991).epsilon(1e-6));
  CHECK(qc.real() < 10.0);
}

TEST_CASE("sector lower bound Re q >= c (s + sqrt|lambda|) and sqrt|lambda| <= |q+s|") {
  for (const auto& pp : sector_samples())
    for (double s : {0.0, 1e-3, 0.25, 1.0, 32.0, 1e3}) {
      const Complex q = K::sqrt_shifted(pp, s);
      const double mod = std::abs(pp.lambda);
      CHECK(q.real() / (s + std::sqrt(mod)) > 0.01);
      CHECK(std::sqrt(mod) <= std::abs(q + s) * (1.0 + 1e-12));
    }
}

TEST_CASE("frozen value: E(s=1, y=1) at lambda = 1") {
  ResolventParams p{{1.0, 0.0}, 0.0, 2};
  const Complex e = K::big_e(p, {1.0, 1.0});
  // 40-digit reference: -0.1247627067372281107906614496615148029849
  CHECK(rel(e, Complex(-0.12476270673722811079, 0.0)) <= 1e-14);
  CHECK(std::abs(e.imag()) <= 1e-17);
}

TEST_CASE("cancellation regime: E via expm1 factoring vs long-double naive difference") {
  // lambda = 1e-6 (1 + i), s = 1, y = 1: the two exponentials agree to ~6
  // digits, so the naive double evaluation loses that much accuracy. The
  // long-double naive difference keeps ~1e-13 relative accuracy and the
  // 40-digit reference pins both.
  ResolventParams p{{1e-6, 1e-6}, 0.0, 2};
  const Complex e = K::big_e(p, {1.0, 1.0});

  using CL = std::complex<long double>;
  const CL laml(1e-6L, 1e-6L);
  const CL ql = std::sqrt(laml + 1.0L);
  const CL naivel = std::exp(-ql) - CL(std::exp(-1.0L));
  const Complex naive(double(naivel.real()), double(naivel.imag()));

  const Complex frozen(-1.8393972058561386277e-7, -1.8393953664610787325e-7);
  CHECK(rel(e, frozen) <= 1e-12);
  CHECK(rel(naive, frozen) <= 1e-12);
  CHECK(rel(e, naive) <= 1e-12);
}

TEST_CASE("frozen value: m0 at lambda = 1, alpha = 0, s = 1, y = 1") {
  ResolventParams p{{1.0, 0.0}, 0.0, 2};
  // 40-digit reference: -0.08822055597308255636327443281870140133742
  CHECK(rel(K::m0(p, {1.0, 1.0}), Complex(-0.088220555973082556363, 0.0)) <= 1e-14);
}

TEST_CASE("frozen value: m0 at lambda = 10 e^{i 3pi/4}, alpha = 1, s = 0.5, y = 2") {
  ResolventParams p{std::polar(10.0, 3.0 * M_PI / 4.0), 1.0, 2};
  const Complex frozen(0.0087214993004832002467, -0.0027818514534111253510);
  CHECK(rel(K::m0(p, {0.5, 2.0}), frozen) <= 1e-13);
}

TEST_CASE("frozen value: dy_m0 at lambda = 1, alpha = 0, s = 1, y = 1") {
  ResolventParams p{{1.0, 0.0}, 0.0, 2};
  // 40-digit reference: 0.01701331307723023737421390115822020458214
  CHECK(rel(K::dy_m0(p, {1.0, 1.0}), Complex(0.017013313077230237374, 0.0)) <= 1e-13);
}

TEST_CASE("closed-form anchor values") {
  ResolventParams p{{1.0, 0.0}, 0.0, 2};
  CHECK(std::abs(K::m4(p, {0.0, 0.0}) - 0.5) <= 1e-15);           // 1/(lambda + q) = 1/2
  CHECK(std::abs(K::dy_m0(p, {0.0, 0.0}) + 0.5) <= 1e-15);        // -1/D = -1/2
  CHECK(std::abs(K::m3(p, {3.0, 0.0}) - 1.0) == 0.0);             // e^0
  CHECK(std::abs(K::m1(p, {0.0, 0.7})) == 0.0);                   // s factor
  CHECK(std::abs(K::m0(p, {2.0, 0.0})) == 0.0);                   // E(s, 0) = 0 exactly
  CHECK(std::abs(K::big_e(p, {2.0, 0.0})) == 0.0);
}

TEST_CASE("m0 equivalent forms: P E / lambda vs direct two-exponential difference") {
  for (const auto& pp : sector_samples())
    for (double s : {0.1, 1.0, 8.0})
      for (double y : {0.05, 0.8, 3.0}) {
        const Complex q = K::sqrt_shifted(pp, s);
        const Complex direct = (q + s) / (pp.alpha + pp.lambda + s + q) *
                               (std::exp(-y * q) - std::exp(-y * s)) / pp.lambda;
        CHECK(rel(K::m0(pp, {s, y}), direct) <= 1e-9);  // naive form loses digits, not ours
      }
}

TEST_CASE("identity m2 = lambda dy_m0 at machine precision") {
  for (const auto& pp : sector_samples())
    for (double s : {1e-3, 0.3, 1.0, 20.0})
      for (double y : {0.0, 0.1, 1.0, 5.0}) {
        const KernelPoint pt{s, y};
        const Complex lhs = K::m2(pp, pt);
        const Complex rhs = pp.lambda * K::dy_m0(pp, pt);
        const double scale = std::abs(lhs) + std::abs(pp.lambda * K::m1(pp, pt)) + 1e-300;
        CHECK(std::abs(lhs - rhs) / scale <= 1e-12);
      }
}

TEST_CASE("analytic s-derivatives agree with Richardson finite differences") {
  for (const auto& pp : sector_samples()) {
    if (std::abs(pp.lambda) > 2e3) continue;  // keep FD step valid for the scale
    for (double s : {0.2, 1.0, 6.0})
      for (double y : {0.1, 0.9, 2.5}) {
        const double h = 1e-4 * std::max(s, 1.0);
        auto at = [&](auto f) {
          return fd_richardson([&](double ss) { return f(pp, KernelPoint{ss, y}); }, s, h);
        };
        CHECK(rel(K::ds_m3(pp, {s, y}), at(K::m3)) <= 1e-6);
        CHECK(rel(K::ds_sE(pp, {s, y}), at(K::s_big_e)) <= 1e-6);
        CHECK(rel(K::ds_m1(pp, {s, y}), at(K::m1)) <= 1e-6);
        CHECK(rel(K::ds_m2(pp, {s, y}), at(K::m2)) <= 1e-6);
        CHECK(rel(K::ds_m4(pp, {s, y}), at(K::m4)) <= 1e-6);
      }
  }
}

TEST_CASE("dy_m0 agrees with Richardson finite differences of m0 in y") {
  for (const auto& pp : sector_samples()) {
    if (std::abs(pp.lambda) > 2e3) continue;
    for (double s : {0.0, 0.4, 2.0})
      for (double y : {0.05, 0.6, 2.0}) {
        auto f = [&](double yy) { return K::m0(pp, KernelPoint{s, yy}); };
        const double h = 1e-5;
        const Complex a = K::dy_m0(pp, {s, y});
        const Complex b = fd_richardson(f, y, h);
        // Differencing cancels the y-constant part of m0, so the reference
        // carries rounding noise of order eps*|m0|/h; at s=0 and large y the
        // true derivative (~e^{-yq}) can sink below that floor.
        const double noise =
            64 * std::numeric_limits<double>::epsilon() * std::abs(f(y)) / h;
        CHECK(std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b)) + noise);
      }
  }
}

TEST_CASE("kernel bundle consistency and derivative chain") {
  for (const auto& pp : sector_samples()) {
    for (double s : {0.0, 0.5, 3.0})
      for (double y : {0.0, 0.3, 1.7}) {
        const KernelPoint pt{s, y};
        const auto b = K::kernel_bundle(pp, pt);
        CHECK(std::abs(b.m0 - K::m0(pp, pt)) == 0.0);
        CHECK(std::abs(b.dy1 - K::dy_m0(pp, pt)) == 0.0);
        CHECK(std::abs(b.m3 - K::m3(pp, pt)) == 0.0);
        CHECK(std::abs(b.m4 - K::m4(pp, pt)) == 0.0);
        CHECK(std::abs(b.pressure - K::p_factor(pp, s) * std::exp(-y * s)) <= 1e-15);

        // Chain dy^{k+1} = -s dy^k - (-q)^k e^{-yq}/D against the explicit
        // two-exponential derivative (P/lambda)((-q)^k e^{-yq} - (-s)^k e^{-ys}).
        const Complex q = b.q;
        const Complex pf = K::p_factor(pp, s);
        const Complex e_yq = std::exp(-y * q), e_ys = std::exp(-y * s);
        const Complex explicit2 = pf / pp.lambda * (q * q * e_yq - s * s * e_ys);
        const Complex explicit4 =
            pf / pp.lambda * (q * q * q * q * e_yq - double(s * s) * (s * s) * e_ys);
        const double sc2 =
            std::abs(pf / pp.lambda) * (std::abs(q * q * e_yq) + s * s * std::abs(e_ys)) + 1e-300;
        const double sc4 = std::abs(pf / pp.lambda) *
                               (std::abs(q * q * q * q * e_yq) + s * s * s * s * std::abs(e_ys)) +
                           1e-300;
        CHECK(std::abs(b.dy2 - explicit2) / sc2 <= 1e-9);
        CHECK(std::abs(b.dy4 - explicit4) / sc4 <= 1e-9);
      }
  }
}

TEST_CASE("fourth-order interior annihilation of m0 and second-order of m3, m4") {
  for (const auto& pp : sector_samples())
    for (double s : {0.0, 0.7, 4.0})
      for (double y : {0.0, 0.4, 2.2}) {
        const auto b = K::kernel_bundle(pp, {s, y});
        const Complex lam_s2 = pp.lambda + s * s;
        // (lambda + s^2 - dyy)(s^2 - dyy) m0 = 0
        const Complex bi = lam_s2 * (s * s * b.m0 - b.dy2) - (s * s * b.dy2 - b.dy4);
        const double sc = std::abs(lam_s2) * (s * s * std::abs(b.m0) + std::abs(b.dy2)) +
                          s * s * std::abs(b.dy2) + std::abs(b.dy4) + 1e-300;
        CHECK(std::abs(bi) / sc <= 1e-12);
        // (lambda + s^2 - dyy) m3 = 0 and m4 likewise (dyy = q^2 on them)
        CHECK(std::abs(lam_s2 * b.m3 - b.q * b.q * b.m3) / (std::abs(lam_s2 * b.m3) + 1e-300) <= 1e-13);
      }
}

TEST_CASE("dynamic boundary row of m0: (lambda + alpha - dy) dy m0 at y = 0 is -1") {
  for (const auto& pp : sector_samples()) {
    const auto b = K::kernel_bundle(pp, {0.8, 0.0});
    const Complex row = (pp.lambda + pp.alpha) * b.dy1 - b.dy2;
    CHECK(std::abs(row + 1.0) <= 1e-12);

    // Same check with the second derivative taken by one-sided differences of
    // dy_m0 (second-order stencil, Richardson step pair 1e-5 / 5e-6).
    if (std::abs(pp.lambda) > 2e3) continue;
    auto dy1_at = [&](double yy) { return K::dy_m0(pp, KernelPoint{0.8, yy}); };
    auto onesided = [&](double h) {
      return (-3.0 * dy1_at(0.0) + 4.0 * dy1_at(h) - dy1_at(2.0 * h)) / (2.0 * h);
    };
    const Complex dy2_fd = (4.0 * onesided(5e-6) - onesided(1e-5)) / 3.0;
    const Complex row_fd = (pp.lambda + pp.alpha) * dy1_at(0.0) - dy2_fd;
    CHECK(std::abs(row_fd + 1.0) <= 1e-8);
  }
}

TEST_CASE("u_prime symbol: ray/complement split, d = 3") {
  ResolventParams p{std::polar(10.0, M_PI / 3.0), 1.0, 3};
  const double xi[2] = {0.9, 0.0};
  const auto m = K::u_prime_symbol(p, xi, 0.7);
  const KernelPoint pt{0.9, 0.7};
  CHECK(std::abs(m.at(0, 0) - (-K::dy_m0(p, pt))) <= 1e-15);
  CHECK(std::abs(m.at(1, 1) - K::m4(p, pt)) <= 1e-15);
  CHECK(std::abs(m.at(0, 1)) == 0.0);
  CHECK(std::abs(m.at(1, 0)) == 0.0);

  // rotated frequency: matrix stays symmetric with the same eigenvalues
  const double xr[2] = {0.9 * std::cos(0.6), 0.9 * std::sin(0.6)};
  const auto mr = K::u_prime_symbol(p, xr, 0.7);
  CHECK(std::abs(mr.at(0, 1) - mr.at(1, 0)) <= 1e-15);
  CHECK(std::abs(mr.at(0, 0) + mr.at(1, 1) - (m.at(0, 0) + m.at(1, 1))) <= 1e-14);
}

TEST_CASE("u_prime symbol: continuous extension at xi = 0") {
  ResolventParams p{{2.0, 1.0}, 0.5, 2};
  const double zero[1] = {0.0};
  const double tiny[1] = {1e-9};
  const auto m_zero = K::u_prime_symbol(p, zero, 1.3);
  const auto m_tiny = K::u_prime_symbol(p, tiny, 1.3);
  CHECK(std::abs(m_zero.at(0, 0) - K::m4(p, {0.0, 1.3})) <= 1e-15);
  CHECK(std::abs(m_tiny.at(0, 0) - m_zero.at(0, 0)) <= 1e-7);
  // d = 2, xi != 0: the complement part is absent, the symbol is -dy_m0 alone
  const double one[1] = {1.0};
  CHECK(std::abs(K::u_prime_symbol(p, one, 0.4).at(0, 0) - (-K::dy_m0(p, {1.0, 0.4}))) <= 1e-15);
}

TEST_CASE("u_d and pressure symbols: values, trace, zero mode") {
  ResolventParams p{{1.0, 0.0}, 0.0, 2};
  const double xi[1] = {1.0};
  // frozen: pressure row at y = 0 is -i (q+s)/D = -i/sqrt(2) at lambda=1, s=1, alpha=0
  const auto pr = K::pressure_symbol(p, xi, 0.0);
  CHECK(rel(pr.a[0], Complex(0.0, -0.70710678118654752440)) <= 1e-14);

  const auto ud = K::u_d_symbol(p, xi, 0.9);
  CHECK(rel(ud.a[0], Complex(0.0, 1.0) * K::m0(p, {1.0, 0.9})) == 0.0);
  CHECK(std::abs(K::u_d_symbol(p, xi, 0.0).a[0]) == 0.0);  // zero normal trace

  const double zero[1] = {0.0};
  CHECK(std::abs(K::u_d_symbol(p, zero, 0.9).a[0]) == 0.0);
  CHECK(std::abs(K::pressure_symbol(p, zero, 0.9).a[0]) == 0.0);
}

TEST_CASE("dynamic boundary identity of the full tangential symbol") {
  // (lambda + alpha) S(xi, 0) - dy S(xi, 0) = Id, where dy S has -dy2 m0 on
  // the ray and -q m4 on the complement.
  for (const auto& pp : sector_samples()) {
    ResolventParams p3 = pp;
    p3.dim = 3;
    const double xi[2] = {1.1, -0.4};
    const double s = std::hypot(xi[0], xi[1]);
    const auto b = K::kernel_bundle(p3, {s, 0.0});
    const Complex la = p3.lambda + p3.alpha;
    const Complex ray = la * (-b.dy1) - (-b.dy2);
    const Complex perp = la * b.m4 - (-b.q * b.m4);
    CHECK(std::abs(ray - 1.0) <= 1e-12);
    CHECK(std::abs(perp - 1.0) <= 1e-12);
  }
}

TEST_CASE("preconditions are enforced") {
  ResolventParams bad_cut{{-2.0, 0.0}, 0.0, 2};
  CHECK_THROWS_AS((void)K::m0(bad_cut, {1.0, 1.0}), std::invalid_argument);
  ResolventParams bad_dim{{1.0, 0.0}, 0.0, 4};
  CHECK_THROWS_AS((void)K::m3(bad_dim, {1.0, 1.0}), std::invalid_argument);
  ResolventParams bad_alpha{{1.0, 0.0}, -1.0, 2};
  CHECK_THROWS_AS((void)K::m4(bad_alpha, {1.0, 1.0}), std::invalid_argument);
  ResolventParams ok{{1.0, 0.0}, 0.0, 2};
  CHECK_THROWS_AS((void)K::m0(ok, {-1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)K::m0(ok, {1.0, -1.0}), std::invalid_argument);
  const double xi2[2] = {1.0, 2.0};
  CHECK_THROWS_AS((void)K::u_d_symbol(ok, xi2, 0.5), std::invalid_argument);  // d=2 wants 1 comp

  K::SectorSpec bad_sector{-0.1, 1.0};
  CHECK_THROWS_AS(bad_sector.validate(), std::invalid_argument);
  K::SectorSpec sector{M_PI / 6.0, 1.0};
  ResolventParams outside{std::polar(10.0, M_PI - 0.01), 0.0, 2};
  CHECK_THROWS_AS(outside.validate(sector), std::invalid_argument);
  ResolventParams small{{0.5, 0.0}, 0.0, 2};
  CHECK_THROWS_AS(small.validate(sector), std::invalid_argument);  // below omega
}

TEST_CASE("decay bound on E: contour estimate with the attained decay rate") {
  // |E| <= sqrt|lambda| y e^{-min(s, Re q) y} holds on the whole sector
  // (straight contour from q to s plus sqrt|lambda| <= |q+s|). The commonly
  // quoted e^{-sy} version needs Re q >= s, so it is only asserted where
  // Re lambda >= 0; at obtuse angles the certification module counts its
  // violations instead.
  for (const auto& pp : sector_samples())
    for (double s : {0.0, 0.5, 5.0, 100.0})
      for (double y : {1e-3, 0.3, 2.0, 30.0}) {
        const Complex q = K::sqrt_shifted(pp, s);
        const double rate = std::min(s, q.real());
        const double root = std::sqrt(std::abs(pp.lambda));
        const double absE = std::abs(K::big_e(pp, {s, y}));
        CHECK(absE <= root * y * std::exp(-rate * y) * (1.0 + 1e-9) + 1e-300);
        if (pp.lambda.real() >= 0.0)
          CHECK(absE <= root * y * std::exp(-s * y) * (1.0 + 1e-9) + 1e-300);
      }
}
