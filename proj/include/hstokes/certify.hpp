#pragma once

#include <string>
#include <vector>

#include "hstokes/kernels.hpp"
#include "hstokes/util.hpp"

// Empirical certification of the Mikhlin-type multiplier bounds behind the
// solver: radial derivative sups with and without the exponential wall
// weight, the hard pointwise inequalities for q and E, and the stability of
// all reported suprema under grid refinement. Certificates are measurements,
// not proofs: the assertable properties are zero violations for the hard
// inequalities and bounded drift for the sups.
namespace hstokes::certify {

// Wall-weighted symbols, certified as (1+y) s^k |d^k m/ds^k| e^{delta s y}.
// The first three are swept uniformly over a sector sample; the s-scaled
// m0 family is certified per fixed lambda.
enum class MstarSymbol { m1, m2, m3, s2_m0, s_m4, s_dy_m0 };

// Frequency-only symbols, certified as s^k |d^k m/ds^k| (no wall weight).
// identity exists so product certificates can degenerate to their input.
enum class MSymbol { identity, lambda_robin, lambda_full, s_robin, sqrt_coupling };

const char* name(MstarSymbol sym);
const char* name(MSymbol sym);
bool uniform_in_lambda(MstarSymbol sym);  // true for m1, m2, m3

// Polar sector sample: every modulus/angle pair lies strictly inside the
// sector with the given angular margin.
struct SectorSampleGrid {
  std::vector<double> moduli;  // log-spaced, >= omega
  std::vector<double> angles;  // |theta| <= pi - epsilon - margin
  double margin = 3.14159265358979323846 / 90.0;
  kernels::SectorSpec sector;

  void validate() const;  // throws std::invalid_argument
  std::vector<Complex> samples() const;

  // moduli_count log-spaced moduli on [omega, max_modulus]; five angles:
  // both extremes, both half-extremes, and the positive real axis.
  static SectorSampleGrid defaults(const kernels::SectorSpec& sector,
                                   int moduli_count, double max_modulus);
};

// Evaluation grids shared by all certification sweeps. s and y carry a 0
// entry in addition to the log-spaced bulk.
struct CertifyGrids {
  std::vector<double> s;
  std::vector<double> y;
  SectorSampleGrid lambda;            // uniform sweeps
  Complex fixed_lambda{0.0, 0.0};     // per-lambda certificates
  double alpha = 0.0;
  int workers = 1;

  void validate() const;  // throws std::invalid_argument

  // s in logspace(1e-3, 1e3, 200) + {0}, y in logspace(1e-3, 1e2, 200) + {0},
  // 25 moduli on [omega, 1e4], fixed lambda 10 e^{i pi/3}.
  static CertifyGrids defaults(const kernels::SectorSpec& sector, double alpha);

  // Same ranges with twice the s, y, and moduli densities (drift probe).
  // Angles and the fixed lambda are kept.
  CertifyGrids doubled() const;
};

struct GridArgmax {
  double s = 0.0;
  double y = 0.0;
  Complex lambda{0.0, 0.0};
};

struct MultiplierCertificate {
  std::string symbol;
  int k = 0;
  double delta = 0.0;           // weight rate (0 for frequency-only symbols)
  bool uniform_lambda = false;  // swept over the sector sample vs fixed
  Complex fixed_lambda{0.0, 0.0};
  double alpha = 0.0;
  double empirical_sup = 0.0;
  GridArgmax argmax;
  double refinement_drift = 0.0;  // |sup(doubled) - sup| / sup
  long derivative_breakdowns = 0;
  std::string grid_note;
};

// Weighted sup of one wall symbol at one derivative order; k is capped at
// (dim+1)/2 (so 1 in two dimensions, 2 in three). First derivatives are
// analytic; the second is a Richardson difference of the analytic first
// with step max(s, 1)*1e-4. Runs the base and the doubled grid.
MultiplierCertificate certify_mstar(MstarSymbol sym, int k, double delta,
                                    const CertifyGrids& grids, int dim);

// All orders 0..k_max of one symbol in a single sweep (shared evaluations).
std::vector<MultiplierCertificate> certify_mstar_orders(MstarSymbol sym, int k_max,
                                                        double delta,
                                                        const CertifyGrids& grids,
                                                        int dim);

// Sup of s^k |d^k m/ds^k| over the s grid and the sector sample.
MultiplierCertificate certify_m(MSymbol sym, int k, const CertifyGrids& grids);

// Pointwise lower bounds for q = sqrt(lambda + s^2) over the s and lambda
// grids: violations of Re q >= s - 1e-12, violations of the modulus bound
// sqrt|lambda| <= |q+s| (relative slack 1e-12), and the empirical constant
// min Re q / (s + sqrt(omega)).
struct RealPartReport {
  long points = 0;
  long real_part_violations = 0;
  double worst_real_deficit = 0.0;  // max of s - Re q
  GridArgmax worst_real;
  long modulus_violations = 0;
  double worst_modulus_deficit = 0.0;  // max of sqrt|lambda| - |q+s|
  GridArgmax worst_modulus;
  double empirical_c = 0.0;
  GridArgmax argmin_c;
};
RealPartReport check_real_part(const CertifyGrids& grids);

// Pointwise bounds for E = e^{-yq} - e^{-ys} over the full s x y x lambda
// grid: violations of |E| <= sqrt|lambda| y e^{-sy} (slack 1e-9), and the
// largest rate c such that |E| <= 2 e^{-c s y} holds everywhere.
struct EBoundReport {
  long points = 0;
  long sqrt_bound_violations = 0;
  double worst_excess = 0.0;  // max of |E| - bound
  double worst_ratio = 0.0;   // max of |E| / bound where the bound is positive
  GridArgmax worst;
  double exponential_rate = 0.0;
  GridArgmax argmin_rate;
};
EBoundReport check_e_bounds(const CertifyGrids& grids);

// Certificate for the reweighted product e^{delta_tilde s y} m(s) m*(s, y)
// at rate delta - delta_tilde, where m and m* are looked up from the input
// certificates and k = min of the input orders. With the identity m and
// delta_tilde = 0 this reproduces the m* certificate.
MultiplierCertificate check_product_lemma(const MultiplierCertificate& cert_m,
                                          const MultiplierCertificate& cert_mstar,
                                          double delta_tilde,
                                          const CertifyGrids& grids);

}  // namespace hstokes::certify
