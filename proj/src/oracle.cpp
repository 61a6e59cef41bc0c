#include "hstokes/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace hstokes::oracle {

namespace {

// Banded complex system assembled as triplets, solved by LAPACK's banded LU
// (zgbsv). The triplets survive the factorization, so row residuals can be
// evaluated against the original matrix.
struct BandSystem {
  int n = 0, kl = 0, ku = 0;
  struct Entry {
    int row, col;
    Complex val;
  };
  std::vector<Entry> entries;
  std::vector<Complex> rhs;  // column-major, n x nrhs

  BandSystem(int n_, int kl_, int ku_, int nrhs)
      : n(n_), kl(kl_), ku(ku_), rhs(static_cast<std::size_t>(n_) * nrhs) {}

  void add(int row, int col, Complex val) {
    if (col - row > ku || row - col > kl)
      throw std::logic_error("oracle: entry outside declared band");
    entries.push_back({row, col, val});
  }

  // Solves in place (rhs becomes the solution) and returns the normalized
  // max row residual of the original system.
  double solve() {
    const int nrhs = static_cast<int>(rhs.size()) / n;
    const int ldab = 2 * kl + ku + 1;
    std::vector<Complex> ab(static_cast<std::size_t>(ldab) * n);
    for (const auto& e : entries)
      ab[static_cast<std::size_t>(e.col) * ldab + (kl + ku + e.row - e.col)] += e.val;
    std::vector<Complex> b = rhs;
    std::vector<lapack_int> ipiv(n);
    const lapack_int info =
        LAPACKE_zgbsv(LAPACK_COL_MAJOR, n, kl, ku, nrhs, ab.data(), ldab,
                      ipiv.data(), rhs.data(), n);
    if (info != 0)
      throw std::runtime_error("oracle: banded solve failed (zgbsv info=" +
                               std::to_string(info) + ")");

    std::vector<double> row_abs(n, 0.0);
    std::vector<Complex> residual = b;
    for (int r = 0; r < nrhs; ++r)
      for (const auto& e : entries)
        residual[static_cast<std::size_t>(r) * n + e.row] -=
            e.val * rhs[static_cast<std::size_t>(r) * n + e.col];
    for (const auto& e : entries) row_abs[e.row] += std::abs(e.val);

    double norm_a = 0.0, norm_z = 0.0, norm_b = 0.0, worst = 0.0;
    for (double v : row_abs) norm_a = std::max(norm_a, v);
    for (const auto& z : rhs) norm_z = std::max(norm_z, std::abs(z));
    for (const auto& z : b) norm_b = std::max(norm_b, std::abs(z));
    for (const auto& z : residual) worst = std::max(worst, std::abs(z));
    const double scale = norm_a * norm_z + norm_b;
    return scale > 0.0 ? worst / scale : worst;
  }
};

double tangential_modulus(const kernels::ResolventParams& params,
                          std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != params.dim - 1)
    throw std::invalid_argument("oracle: xi must have dim-1 components");
  double s2 = 0.0;
  for (double x : xi) s2 += x * x;
  return std::sqrt(s2);
}

// Characteristic root sqrt(lambda + s^2), principal branch. Computed locally:
// the solve path stays independent of the kernel module's closed forms.
Complex char_root(Complex lambda, double s) { return std::sqrt(lambda + s * s); }

void check_truncation(double rate, const OdeOracleConfig& cfg, const char* who) {
  if (cfg.decay_bc == DecayBc::dirichlet_pair &&
      std::exp(-rate * cfg.truncation_length) >= 1e-10)
    throw std::invalid_argument(std::string(who) +
                                ": interval too short for Dirichlet decay rows; "
                                "enlarge Y or use the asymptotic condition");
}

}  // namespace

void OdeOracleConfig::validate() const {
  if (!(truncation_length > 0.0) || !std::isfinite(truncation_length))
    throw std::invalid_argument("OdeOracleConfig: truncation_length must be positive");
  if (steps < 64) throw std::invalid_argument("OdeOracleConfig: steps must be >= 64");
}

OdeOracleConfig adequate_config(const kernels::ResolventParams& params, double s,
                                int steps) {
  params.validate();
  if (s < 0.0) throw std::invalid_argument("adequate_config: s must be >= 0");
  const double re_q = char_root(params.lambda, s).real();
  const double rate_dir = s > 0.0 ? std::min(s, re_q) : re_q;
  const double y_dir = 26.0 / rate_dir;
  const double y_asym = 18.0 / re_q;
  OdeOracleConfig cfg;
  cfg.steps = steps;
  if (y_dir <= 1.25 * y_asym) {
    cfg.truncation_length = y_dir;
    cfg.decay_bc = DecayBc::dirichlet_pair;
  } else {
    cfg.truncation_length = y_asym;
    cfg.decay_bc = DecayBc::asymptotic;
  }
  cfg.validate();
  return cfg;
}

ModeSolution solve_mode_fd(const kernels::ResolventParams& params,
                           std::span<const double> xi,
                           std::span<const Complex> rhs_phi_hat,
                           const OdeOracleConfig& cfg) {
  params.validate();
  cfg.validate();
  const double s = tangential_modulus(params, xi);
  if (!(s > 0.0))
    throw std::invalid_argument("solve_mode_fd: requires |xi| > 0 (the zero mode "
                                "of the normal velocity vanishes identically)");
  if (rhs_phi_hat.size() != xi.size())
    throw std::invalid_argument("solve_mode_fd: phi_hat must have dim-1 components");
  const Complex q = char_root(params.lambda, s);
  check_truncation(std::min(s, q.real()), cfg, "solve_mode_fd");

  const int n_nodes = cfg.steps + 1;
  const double h = cfg.truncation_length / cfg.steps;
  const double h2 = h * h;
  const Complex lam = params.lambda;
  const double mu = params.alpha;  // boundary coefficient alpha

  Complex dot{};
  for (std::size_t j = 0; j < xi.size(); ++j) dot += xi[j] * rhs_phi_hat[j];

  // Unknowns interleaved (u_0, w_0, u_1, w_1, ...); bandwidths set by the
  // one-sided boundary stencil (ku = 5) and the backward decay row (kl = 4).
  BandSystem sys(2 * n_nodes, 4, 5, 1);
  auto ucol = [](int i) { return 2 * i; };
  auto wcol = [](int i) { return 2 * i + 1; };

  // Wall rows: u_0 = 0 and (lambda+alpha) u'(0) - u''(0) = -i xi.phi_hat with
  // one-sided second-order stencils.
  sys.add(0, ucol(0), 1.0);
  sys.add(1, ucol(0), (mu + lam) * (-3.0 / (2.0 * h)) - 2.0 / h2);
  sys.add(1, ucol(1), (mu + lam) * (4.0 / (2.0 * h)) + 5.0 / h2);
  sys.add(1, ucol(2), (mu + lam) * (-1.0 / (2.0 * h)) - 4.0 / h2);
  sys.add(1, ucol(3), 1.0 / h2);
  sys.rhs[1] = Complex(0.0, -1.0) * dot;

  for (int i = 1; i < n_nodes - 1; ++i) {
    // Definition row: (s^2 - d^2/dy^2) u_i - w_i = 0.
    sys.add(ucol(i), ucol(i - 1), -1.0 / h2);
    sys.add(ucol(i), ucol(i), s * s + 2.0 / h2);
    sys.add(ucol(i), ucol(i + 1), -1.0 / h2);
    sys.add(ucol(i), wcol(i), -1.0);
    // Resolvent row: (lambda + s^2 - d^2/dy^2) w_i = 0.
    sys.add(wcol(i), wcol(i - 1), -1.0 / h2);
    sys.add(wcol(i), wcol(i), lam + s * s + 2.0 / h2);
    sys.add(wcol(i), wcol(i + 1), -1.0 / h2);
  }

  const int top = n_nodes - 1;
  if (cfg.decay_bc == DecayBc::dirichlet_pair) {
    sys.add(ucol(top), ucol(top), 1.0);
  } else {
    // (d/dy + s) u(Y) = 0, backward second-order stencil; kills the e^{-sy}
    // branch exactly so only the e^{-qy} remainder leaks through.
    sys.add(ucol(top), ucol(top), 3.0 / (2.0 * h) + s);
    sys.add(ucol(top), ucol(top - 1), -4.0 / (2.0 * h));
    sys.add(ucol(top), ucol(top - 2), 1.0 / (2.0 * h));
  }
  sys.add(wcol(top), wcol(top), 1.0);

  ModeSolution out;
  out.row_residual = sys.solve();
  out.y.resize(n_nodes);
  out.u.resize(n_nodes);
  out.w.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    out.y[i] = h * i;
    out.u[i] = sys.rhs[ucol(i)];
    out.w[i] = sys.rhs[wcol(i)];
  }
  return out;
}

VPrimeSolution solve_vprime_mode_fd(const kernels::ResolventParams& params,
                                    std::span<const double> xi,
                                    std::span<const Complex> h_hat,
                                    const OdeOracleConfig& cfg) {
  params.validate();
  cfg.validate();
  const double s = tangential_modulus(params, xi);
  if (h_hat.empty())
    throw std::invalid_argument("solve_vprime_mode_fd: empty boundary data");
  const Complex q = char_root(params.lambda, s);
  check_truncation(q.real(), cfg, "solve_vprime_mode_fd");

  const int n_nodes = cfg.steps + 1;
  const int nrhs = static_cast<int>(h_hat.size());
  const double h = cfg.truncation_length / cfg.steps;
  const double h2 = h * h;
  const Complex lam = params.lambda;
  const double mu = params.alpha;

  BandSystem sys(n_nodes, 2, 2, nrhs);
  // Dynamic row: (lambda + alpha) v_0 - v'(0) = h_hat_c.
  sys.add(0, 0, (mu + lam) + 3.0 / (2.0 * h));
  sys.add(0, 1, -4.0 / (2.0 * h));
  sys.add(0, 2, 1.0 / (2.0 * h));
  for (int c = 0; c < nrhs; ++c) sys.rhs[static_cast<std::size_t>(c) * n_nodes] = h_hat[c];

  for (int i = 1; i < n_nodes - 1; ++i) {
    sys.add(i, i - 1, -1.0 / h2);
    sys.add(i, i, lam + s * s + 2.0 / h2);
    sys.add(i, i + 1, -1.0 / h2);
  }

  const int top = n_nodes - 1;
  if (cfg.decay_bc == DecayBc::dirichlet_pair) {
    sys.add(top, top, 1.0);
  } else {
    sys.add(top, top, 3.0 / (2.0 * h) + s);
    sys.add(top, top - 1, -4.0 / (2.0 * h));
    sys.add(top, top - 2, 1.0 / (2.0 * h));
  }

  VPrimeSolution out;
  out.row_residual = sys.solve();
  out.y.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) out.y[i] = h * i;
  out.v.assign(nrhs, std::vector<Complex>(n_nodes));
  for (int c = 0; c < nrhs; ++c)
    for (int i = 0; i < n_nodes; ++i)
      out.v[c][i] = sys.rhs[static_cast<std::size_t>(c) * n_nodes + i];
  return out;
}

double compare_mode(const kernels::ResolventParams& params,
                    std::span<const double> xi, const OdeOracleConfig& cfg) {
  const double s = tangential_modulus(params, xi);
  if (!(s > 0.0)) throw std::invalid_argument("compare_mode: requires |xi| > 0");
  std::vector<Complex> phi(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) phi[j] = xi[j] / s;
  const ModeSolution sol = solve_mode_fd(params, xi, phi, cfg);

  // Closed form for phi_hat = xi/s: u_d(y) = i s m0(s, y).
  double sup_ref = 0.0, sup_dev = 0.0;
  for (std::size_t i = 0; i < sol.y.size(); ++i) {
    const Complex ref =
        Complex(0.0, s) * kernels::m0(params, {s, sol.y[i]});
    sup_ref = std::max(sup_ref, std::abs(ref));
    sup_dev = std::max(sup_dev, std::abs(sol.u[i] - ref));
  }
  return sup_dev / sup_ref;
}

}  // namespace hstokes::oracle
