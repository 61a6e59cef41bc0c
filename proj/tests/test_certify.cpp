#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hstokes/certify.hpp"
#include "hstokes/kernels.hpp"

using namespace hstokes;
using namespace hstokes::certify;
namespace K = hstokes::kernels;
using K::ResolventParams;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Coarse version of the default grids: same ranges, 40-point s and y axes,
// seven moduli. Small enough for unit tests, dense enough that the suprema
// land within a few percent of the production values.
CertifyGrids coarse_grids(double alpha) {
  K::SectorSpec sector;
  CertifyGrids g;
  g.s = logspace(1e-3, 1e3, 40);
  g.s.insert(g.s.begin(), 0.0);
  g.y = logspace(1e-3, 1e2, 40);
  g.y.insert(g.y.begin(), 0.0);
  g.lambda = SectorSampleGrid::defaults(sector, 7, 1e4);
  g.fixed_lambda = std::polar(10.0, kPi / 3.0);
  g.alpha = alpha;
  g.workers = default_workers();
  return g;
}

CertifyGrids acute_grids(double alpha) {
  CertifyGrids g = coarse_grids(alpha);
  g.lambda.angles = {-kPi / 2.0, -kPi / 3.0, 0.0, kPi / 3.0, kPi / 2.0};
  return g;
}

}  // namespace

TEST_CASE("sector sample defaults cover both extremes and the real axis") {
  K::SectorSpec sector;
  const SectorSampleGrid g = SectorSampleGrid::defaults(sector, 7, 1e4);
  CHECK(g.moduli.size() == 7);
  CHECK(g.moduli.front() == doctest::Approx(sector.omega));
  CHECK(g.moduli.back() == doctest::Approx(1e4));
  REQUIRE(g.angles.size() == 5);
  const double ext = kPi - sector.epsilon - g.margin;
  CHECK(g.angles.front() == doctest::Approx(-ext));
  CHECK(g.angles.back() == doctest::Approx(ext));
  CHECK(g.angles[2] == 0.0);
  CHECK(g.samples().size() == 35);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("sample and grid validation rejects malformed input") {
  K::SectorSpec sector;
  SectorSampleGrid sample = SectorSampleGrid::defaults(sector, 5, 100.0);

  SUBCASE("angle outside the sector") {
    sample.angles.push_back(kPi - sector.epsilon);  // inside Sigma but no margin
    CHECK_THROWS_AS(sample.validate(), std::invalid_argument);
  }
  SUBCASE("descending moduli") {
    sample.moduli = {10.0, 1.0};
    CHECK_THROWS_AS(sample.validate(), std::invalid_argument);
  }
  SUBCASE("empty angle list") {
    sample.angles.clear();
    CHECK_THROWS_AS(sample.validate(), std::invalid_argument);
  }

  CertifyGrids g = coarse_grids(1.0);
  SUBCASE("negative alpha") {
    g.alpha = -0.5;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  }
  SUBCASE("zero workers") {
    g.workers = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  }
  SUBCASE("negative frequency entry") {
    g.s.push_back(-1.0);
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  }
  SUBCASE("fixed lambda outside the sector") {
    g.fixed_lambda = std::polar(10.0, kPi - 0.01);
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  }
}

TEST_CASE("grid doubling densifies log axes and keeps endpoints") {
  const CertifyGrids g = coarse_grids(0.0);
  const CertifyGrids d = g.doubled();
  CHECK(d.s.size() == 81);  // 40 positive entries doubled, zero kept in front
  CHECK(d.s.front() == 0.0);
  CHECK(d.s[1] == doctest::Approx(1e-3));
  CHECK(d.s.back() == doctest::Approx(1e3));
  CHECK(d.y.size() == 81);
  CHECK(d.lambda.moduli.size() == 14);
  CHECK(d.lambda.angles.size() == g.lambda.angles.size());

  CertifyGrids point = g;
  point.s = {0.0};
  point.y = {5.0};
  const CertifyGrids pd = point.doubled();
  CHECK(pd.s == point.s);  // degenerate axes are left alone
  CHECK(pd.y == point.y);
}

TEST_CASE("wall symbol certificates on a coarse sector sample") {
  const CertifyGrids g = coarse_grids(1.0);

  const auto m1 = certify_mstar_orders(MstarSymbol::m1, 2, 0.05, g, 3);
  REQUIRE(m1.size() == 3);
  CHECK(m1[0].symbol == "m1");
  CHECK(m1[0].uniform_lambda);
  CHECK(m1[0].delta == 0.05);
  CHECK(m1[0].empirical_sup == doctest::Approx(1.176).epsilon(0.01));
  CHECK(m1[1].empirical_sup == doctest::Approx(3.222).epsilon(0.01));
  CHECK(m1[2].empirical_sup == doctest::Approx(18.20).epsilon(0.01));
  for (const auto& c : m1) {
    CHECK(std::isfinite(c.empirical_sup));
    CHECK(c.refinement_drift < 0.15);
    CHECK(c.derivative_breakdowns == 0);
    CHECK_FALSE(c.grid_note.empty());
  }
  // The weighted sup of m1 peaks at the widest sampled angle.
  CHECK(m1[0].argmax.lambda.real() < 0.0);

  const auto m2 = certify_mstar_orders(MstarSymbol::m2, 2, 0.05, g, 3);
  CHECK(m2[0].empirical_sup == doctest::Approx(1.865).epsilon(0.01));
  CHECK(m2[1].empirical_sup == doctest::Approx(3.262).epsilon(0.01));
  CHECK(m2[2].empirical_sup == doctest::Approx(12.06).epsilon(0.01));
  // m2's sup sits on the wall itself where |m2| = |phase| * s / |D|.
  CHECK(m2[0].argmax.y == 0.0);

  const auto m3 = certify_mstar_orders(MstarSymbol::m3, 2, 0.05, g, 3);
  CHECK(m3[0].empirical_sup == doctest::Approx(1.776).epsilon(0.01));
  CHECK(m3[2].empirical_sup == doctest::Approx(21.53).epsilon(0.01));

  // The s-scaled m0 family is certified at one lambda; sups stay order one.
  const auto s2m0 = certify_mstar(MstarSymbol::s2_m0, 0, 0.05, g, 3);
  CHECK_FALSE(s2m0.uniform_lambda);
  CHECK(s2m0.fixed_lambda == g.fixed_lambda);
  CHECK(s2m0.empirical_sup == doctest::Approx(0.1930).epsilon(0.01));
  const auto sm4 = certify_mstar(MstarSymbol::s_m4, 0, 0.05, g, 3);
  CHECK(sm4.empirical_sup == doctest::Approx(0.9940).epsilon(0.01));
  const auto sdym0 = certify_mstar(MstarSymbol::s_dy_m0, 0, 0.05, g, 3);
  CHECK(sdym0.empirical_sup == doctest::Approx(0.4985).epsilon(0.01));
}

TEST_CASE("trace grid pins the kernel magnitudes at the wall") {
  CertifyGrids g = coarse_grids(1.0);
  g.y = {0.0};
  // e^{-y q} is exactly 1 on the wall, and the weight is exactly 1 there.
  const auto m3 = certify_mstar(MstarSymbol::m3, 0, 0.05, g, 3);
  CHECK(m3.empirical_sup == 1.0);
  CHECK(m3.refinement_drift == 0.0);
  // The difference kernel vanishes on the wall, so m1 = P s E does too.
  const auto m1 = certify_mstar(MstarSymbol::m1, 0, 0.05, g, 3);
  CHECK(m1.empirical_sup == 0.0);
  CHECK(m1.refinement_drift == 0.0);
}

TEST_CASE("single-point certificates match closed-form derivatives") {
  const double s0 = 0.8, y0 = 1.3, alpha = 0.4;
  const Complex lambda = std::polar(5.0, 2.0 * kPi / 3.0);

  CertifyGrids g;
  g.s = {s0};
  g.y = {y0};
  g.lambda.sector = K::SectorSpec{};
  g.lambda.moduli = {5.0};
  g.lambda.angles = {2.0 * kPi / 3.0};
  g.fixed_lambda = lambda;
  g.alpha = alpha;
  g.workers = 1;

  const ResolventParams p{lambda, alpha, 2};
  const Complex q = K::sqrt_shifted(p, s0);
  const double weight0 = (1.0 + y0) * std::exp(0.05 * s0 * y0);

  const auto certs = certify_mstar_orders(MstarSymbol::m3, 2, 0.05, g, 3);
  REQUIRE(certs.size() == 3);

  const Complex decay = std::exp(-y0 * q);
  CHECK(certs[0].empirical_sup ==
        doctest::Approx(weight0 * std::abs(decay)).epsilon(1e-12));

  // d/ds e^{-y q} = -y s / q e^{-y q}
  const Complex d1 = -y0 * s0 / q * decay;
  CHECK(certs[1].empirical_sup ==
        doctest::Approx(weight0 * s0 * std::abs(d1)).epsilon(1e-12));

  // d^2/ds^2 e^{-y q} = e^{-y q} (s^2 y^2 / q^2 - y lambda / q^3); the k = 2
  // order is a Richardson difference of the analytic first derivative, so it
  // should land within FD accuracy of the closed form.
  const Complex d2 = decay * (s0 * s0 * y0 * y0 / (q * q) - y0 * lambda / (q * q * q));
  CHECK(certs[2].empirical_sup ==
        doctest::Approx(weight0 * s0 * s0 * std::abs(d2)).epsilon(1e-8));
  CHECK(certs[2].refinement_drift == 0.0);  // single-point grids do not refine

  CHECK(certs[1].argmax.s == s0);
  CHECK(certs[1].argmax.y == y0);
}

TEST_CASE("frequency symbol certificates and an exact hand value") {
  // Degenerate grid s = {0}, lambda = 1, alpha = 0: q = 1, so the Robin
  // denominator is lambda + alpha + q = 2 and lambda / R = 1/2 exactly.
  CertifyGrids g;
  g.s = {0.0};
  g.y = {0.0};
  g.lambda.sector = K::SectorSpec{};
  g.lambda.moduli = {1.0};
  g.lambda.angles = {0.0};
  g.alpha = 0.0;
  g.workers = 1;

  CHECK(certify_m(MSymbol::lambda_robin, 0, g).empirical_sup ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(certify_m(MSymbol::sqrt_coupling, 0, g).empirical_sup ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(certify_m(MSymbol::s_robin, 0, g).empirical_sup == 0.0);
  CHECK(certify_m(MSymbol::identity, 0, g).empirical_sup == 1.0);
  CHECK(certify_m(MSymbol::identity, 1, g).empirical_sup == 0.0);
  CHECK_THROWS_AS(certify_m(MSymbol::lambda_robin, 3, g), std::invalid_argument);

  const CertifyGrids coarse = coarse_grids(1.0);
  const auto robin = certify_m(MSymbol::lambda_robin, 0, coarse);
  CHECK(robin.empirical_sup == doctest::Approx(1.876).epsilon(0.01));
  CHECK(robin.delta == 0.0);
  const auto coupling = certify_m(MSymbol::sqrt_coupling, 2, coarse);
  CHECK(coupling.empirical_sup == doctest::Approx(519.2).epsilon(0.02));
  CHECK(coupling.refinement_drift < 0.2);
  for (MSymbol sym : {MSymbol::lambda_robin, MSymbol::lambda_full, MSymbol::s_robin})
    for (int k : {0, 1, 2}) {
      const auto c = certify_m(sym, k, coarse);
      CHECK(std::isfinite(c.empirical_sup));
      CHECK(c.refinement_drift < 0.05);
    }
}

TEST_CASE("real-part bounds for the shifted root across the sector") {
  // Over the full sector the naive bound Re q >= s fails badly at wide
  // angles, while the modulus bound sqrt|lambda| <= |q+s| never does.
  const auto wide = check_real_part(coarse_grids(1.0));
  CHECK(wide.points == 41 * 35);
  CHECK(wide.real_part_violations > 0);
  CHECK(wide.real_part_violations < wide.points / 2);
  CHECK(wide.worst_real_deficit > 30.0);
  CHECK(wide.worst_real.lambda.real() < 0.0);
  CHECK(wide.modulus_violations == 0);
  CHECK(wide.worst_modulus_deficit == 0.0);
  CHECK(wide.empirical_c == doctest::Approx(0.2125).epsilon(0.01));
  // The constant bottoms out at the smallest modulus, near s ~ 0.6.
  CHECK(std::abs(wide.argmin_c.lambda) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(wide.argmin_c.s > 0.3);
  CHECK(wide.argmin_c.s < 1.2);

  // Restricted to Re lambda >= 0 the naive bound holds everywhere.
  const auto acute = check_real_part(acute_grids(1.0));
  CHECK(acute.real_part_violations == 0);
  CHECK(acute.worst_real_deficit == 0.0);
  CHECK(acute.modulus_violations == 0);
  CHECK(acute.empirical_c == doctest::Approx(0.5276).epsilon(0.01));
}

TEST_CASE("sector opening controls the real-part constant") {
  auto c_of = [](double epsilon) {
    K::SectorSpec sector{epsilon, 1.0};
    CertifyGrids g = coarse_grids(1.0);
    g.lambda = SectorSampleGrid::defaults(sector, 7, 1e4);
    g.fixed_lambda = Complex{0.0, 0.0};  // unused here
    return check_real_part(g).empirical_c;
  };
  const double c4 = c_of(kPi / 4.0);
  const double c6 = c_of(kPi / 6.0);
  const double c12 = c_of(kPi / 12.0);
  CHECK(c4 == doctest::Approx(0.3048).epsilon(0.01));
  CHECK(c6 == doctest::Approx(0.2125).epsilon(0.01));
  CHECK(c12 == doctest::Approx(0.1147).epsilon(0.01));
  CHECK(c4 > c6);
  CHECK(c6 > c12);
}

TEST_CASE("difference kernel envelopes across the sector") {
  // At wide angles the parabolic bound |E| <= sqrt|lambda| y e^{-sy} breaks
  // down spectacularly: E only decays at the rate Re q, which can drop far
  // below s, so the ratio against the e^{-sy} envelope grows without bound.
  const auto wide = check_e_bounds(coarse_grids(1.0));
  CHECK(wide.points == 41 * 41 * 35);
  CHECK(wide.sqrt_bound_violations > 0);
  CHECK(wide.worst_excess > 0.01);
  CHECK(wide.worst_ratio > 1e50);
  CHECK(wide.exponential_rate > 0.4);
  CHECK(wide.exponential_rate < 0.7);

  // With Re lambda >= 0 both decay bounds hold on the nose.
  const auto acute = check_e_bounds(acute_grids(1.0));
  CHECK(acute.sqrt_bound_violations == 0);
  CHECK(acute.worst_excess == 0.0);
  CHECK(acute.worst_ratio <= 1.0 + 1e-9);
  CHECK(acute.exponential_rate > 0.95);
}

TEST_CASE("product certificates reduce and reweight correctly") {
  const CertifyGrids g = coarse_grids(1.0);
  const auto m3 = certify_mstar(MstarSymbol::m3, 1, 0.05, g, 3);
  const auto id = certify_m(MSymbol::identity, 1, g);

  // identity x m3 at delta_tilde = 0 must reproduce the m3 certificate.
  const auto same = check_product_lemma(id, m3, 0.0, g);
  CHECK(same.empirical_sup == m3.empirical_sup);
  CHECK(same.k == 1);
  CHECK(same.delta == 0.05);
  CHECK(same.symbol == "exp(0 sy)*identity*m3");

  // The solver's actual decomposition factor (lambda/D) m3 stays bounded.
  const auto full = certify_m(MSymbol::lambda_full, 1, g);
  const auto prod = check_product_lemma(full, m3, 0.0, g);
  CHECK(std::isfinite(prod.empirical_sup));
  CHECK(prod.refinement_drift < 0.1);
  // The product grid contains y = 0 where m3 = 1, so its weighted sup can
  // never fall below the frequency-only sup; here the wall is the argmax.
  CHECK(prod.empirical_sup >= full.empirical_sup * (1.0 - 1e-12));
  CHECK(prod.empirical_sup == doctest::Approx(full.empirical_sup).epsilon(1e-9));

  // Shifting half the weight onto the product keeps it certified at the
  // remaining rate.
  const auto shifted = check_product_lemma(id, m3, 0.025, g);
  CHECK(shifted.delta == doctest::Approx(0.025));
  CHECK(shifted.empirical_sup == doctest::Approx(3.643).epsilon(0.01));
  CHECK(shifted.refinement_drift < 0.1);

  CHECK_THROWS_AS(check_product_lemma(id, m3, 0.06, g), std::invalid_argument);
  CHECK_THROWS_AS(check_product_lemma(id, m3, -0.01, g), std::invalid_argument);
  MultiplierCertificate bogus = id;
  bogus.symbol = "rho";
  CHECK_THROWS_AS(check_product_lemma(bogus, m3, 0.0, g), std::invalid_argument);
  MultiplierCertificate bogus_wall = m3;
  bogus_wall.symbol = "m9";
  CHECK_THROWS_AS(check_product_lemma(id, bogus_wall, 0.0, g), std::invalid_argument);

  // The product order is the weaker of the two inputs.
  const auto id0 = certify_m(MSymbol::identity, 0, g);
  CHECK(check_product_lemma(id0, m3, 0.0, g).k == 0);
}

TEST_CASE("certificates are deterministic across repeated runs") {
  const CertifyGrids g = coarse_grids(0.5);
  const auto a = certify_mstar(MstarSymbol::m1, 1, 0.05, g, 3);
  const auto b = certify_mstar(MstarSymbol::m1, 1, 0.05, g, 3);
  CHECK(a.empirical_sup == b.empirical_sup);
  CHECK(a.refinement_drift == b.refinement_drift);
  CHECK(a.argmax.s == b.argmax.s);
  CHECK(a.argmax.y == b.argmax.y);
  CHECK(a.argmax.lambda == b.argmax.lambda);
}

TEST_CASE("derivative breakdowns are counted near s = 0") {
  // The Richardson step is max(s, 1) * 1e-4; an s below that cannot host a
  // centered difference and is counted instead of evaluated.
  CertifyGrids g;
  g.s = {5e-5, 1e-2};
  g.y = {0.0, 1.0};
  g.lambda.sector = K::SectorSpec{};
  g.lambda.moduli = {1.0, 10.0};
  g.lambda.angles = {0.0};
  g.fixed_lambda = Complex{10.0, 0.0};
  g.alpha = 0.0;
  g.workers = 1;
  const auto cert = certify_mstar(MstarSymbol::m3, 2, 0.05, g, 3);
  CHECK(cert.derivative_breakdowns == 4);  // one bad s x two y x two lambda
  CHECK(std::isfinite(cert.empirical_sup));
}

TEST_CASE("dimension caps the certified derivative order") {
  const CertifyGrids g = coarse_grids(0.0);
  CHECK_THROWS_AS(certify_mstar(MstarSymbol::m1, 2, 0.05, g, 2),
                  std::invalid_argument);
  CHECK_NOTHROW(certify_mstar(MstarSymbol::s_m4, 1, 0.05, g, 2));
  CHECK_THROWS_AS(certify_mstar(MstarSymbol::m1, -1, 0.05, g, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(certify_mstar(MstarSymbol::m1, 1, -0.1, g, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(certify_mstar(MstarSymbol::m1, 1, 0.05, g, 4),
                  std::invalid_argument);

  CertifyGrids unset = g;
  unset.fixed_lambda = Complex{0.0, 0.0};
  CHECK_THROWS_AS(certify_mstar(MstarSymbol::s_m4, 1, 0.05, unset, 3),
                  std::invalid_argument);
}
