// Command-line driver: binds flat key=value configuration to the solver,
// oracle, certification, and sweep runs and emits machine-readable reports.
//
// Exit codes: 0 all checks passed, 1 a tolerance or inequality was violated
// (the report and stdout name the violator), 2 invalid configuration.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hstokes/config.hpp"
#include "hstokes/oracle.hpp"
#include "hstokes/report.hpp"
#include "hstokes/util.hpp"

namespace fs = std::filesystem;

using hstokes::Complex;
using hstokes::config::RunConfig;
using hstokes::report::JsonValue;
using hstokes::report::to_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  long long workers = -1;  // -1: not given on the command line
  long long seed = -1;
  std::string check = "all";
};

class Runner {
 public:
  Runner(RunConfig cfg, std::string command, std::string out_dir)
      : cfg_(std::move(cfg)), command_(std::move(command)), out_(out_dir) {
    cfg_.note("command", JsonValue(command_));
    cfg_.note("out", JsonValue(out_dir));
    seed_ = static_cast<std::uint64_t>(cfg_.integer("run.seed", 1));
    workers_ = static_cast<int>(cfg_.integer("run.workers", 0));
    if (workers_ <= 0) workers_ = hstokes::default_workers();
  }

  int run(const std::string& check) {
    if (command_ == "solve") return run_solve();
    if (command_ == "verify") return run_verify();
    if (command_ == "oracle") return run_oracle();
    if (command_ == "certify") return run_certify(check);
    return run_sweep();
  }

 private:
  // --- configuration readers -------------------------------------------

  hstokes::kernels::SectorSpec sector() {
    hstokes::kernels::SectorSpec sec;
    sec.epsilon = cfg_.number("problem.epsilon", kPi / 6.0);
    sec.omega = cfg_.number("problem.omega", 1.0);
    sec.validate();
    return sec;
  }

  hstokes::kernels::ResolventParams params(const hstokes::kernels::SectorSpec& sec) {
    hstokes::kernels::ResolventParams p;
    p.lambda = std::polar(cfg_.number("problem.lambda_modulus", 10.0),
                          cfg_.number("problem.lambda_angle", kPi / 3.0));
    p.alpha = cfg_.number("problem.alpha", 0.0);
    p.dim = static_cast<int>(cfg_.integer("problem.dim", 2));
    p.validate(sec);
    return p;
  }

  struct GridKeys {
    int n = 64;
    double box_length = 2.0 * kPi;
    int wall_levels = 128;
    double wall_top = 0.0;  // 0: adapt the height to lambda
    double wall_y1 = 0.0;   // 0: default grading
  };

  GridKeys grid_keys() {
    GridKeys g;
    g.n = static_cast<int>(cfg_.integer("grid.n", g.n));
    g.box_length = cfg_.number("grid.box_length", g.box_length);
    g.wall_levels = static_cast<int>(cfg_.integer("grid.wall_levels", g.wall_levels));
    g.wall_top = cfg_.number("grid.wall_top", g.wall_top);
    g.wall_y1 = cfg_.number("grid.wall_y1", g.wall_y1);
    return g;
  }

  hstokes::sweep::SweepConfig sweep_config(const hstokes::kernels::ResolventParams& p,
                                           const GridKeys& g, double lebesgue_p) {
    hstokes::sweep::SweepConfig scfg;
    scfg.dim = p.dim;
    scfg.n = g.n;
    scfg.box_length = g.box_length;
    scfg.wall_levels = g.wall_levels;
    scfg.alpha = p.alpha;
    scfg.p = lebesgue_p;
    scfg.seed = seed_;
    scfg.workers = workers_;
    scfg.validate();
    return scfg;
  }

  hstokes::fields::TangentialGrid tangential(const hstokes::kernels::ResolventParams& p,
                                             const GridKeys& g) {
    hstokes::fields::TangentialGrid grid{p.dim - 1, g.n, g.box_length};
    grid.validate();
    return grid;
  }

  // quadrature_grade packs the first level down to top/M^2, which the
  // trapezoid rule of the weak-form check favors over the boundary-layer
  // grading of the plain solve.
  hstokes::fields::WallGrid wall(const hstokes::kernels::ResolventParams& p,
                                 const GridKeys& g, bool quadrature_grade = false) {
    if (g.wall_top > 0.0)
      return g.wall_y1 > 0.0
                 ? hstokes::fields::WallGrid::graded(g.wall_top, g.wall_levels, g.wall_y1)
                 : hstokes::fields::WallGrid::graded(g.wall_top, g.wall_levels);
    hstokes::sweep::SweepConfig scfg;
    scfg.wall_levels = g.wall_levels;
    auto adapted = hstokes::sweep::adapted_wall(scfg, p.lambda);
    if (!quadrature_grade) return adapted;
    const double top = adapted.top();
    const double m = static_cast<double>(g.wall_levels);
    const double y1 = std::min(adapted.levels[1], top / (m * m));
    return hstokes::fields::WallGrid::graded(top, g.wall_levels, y1);
  }

  // --- bookkeeping ------------------------------------------------------

  void check_tolerance(const std::string& what, double value, const std::string& tol_key,
                       double tol) {
    if (std::isfinite(value) && value <= tol) return;
    violations_.push_back(what + " = " + hstokes::report::format_double(value) +
                          " exceeds " + tol_key + " = " +
                          hstokes::report::format_double(tol));
  }

  void check_certificate(const hstokes::certify::MultiplierCertificate& cert,
                         double drift_tol) {
    const std::string label = "certificate " + cert.symbol + " (k=" +
                              std::to_string(cert.k) + ")";
    if (!std::isfinite(cert.empirical_sup))
      violations_.push_back(label + " has a non-finite sup");
    else if (cert.refinement_drift > drift_tol)
      violations_.push_back(label + " refinement drift " +
                            hstokes::report::format_double(cert.refinement_drift) +
                            " exceeds tol.drift = " +
                            hstokes::report::format_double(drift_tol));
  }

  int finish(JsonValue results) {
    JsonValue root = JsonValue::object();
    root["config"] = cfg_.resolved();
    root["results"] = std::move(results);
    JsonValue report_violations = JsonValue::array();
    for (const auto& v : violations_) report_violations.push_back(JsonValue(v));
    root["violations"] = std::move(report_violations);
    root["status"] = violations_.empty() ? "pass" : "fail";

    fs::create_directories(out_);
    const fs::path path = out_ / "report.json";
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw std::runtime_error("cannot open for writing: " + path.string());
    const std::string body = root.dump(2) + "\n";
    stream.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!stream) throw std::runtime_error("write failed: " + path.string());

    std::cout << "report: " << path.string() << "\n";
    for (const auto& v : violations_) std::cout << "violation: " << v << "\n";
    std::cout << command_ << ": " << (violations_.empty() ? "pass" : "fail") << "\n";
    return violations_.empty() ? 0 : 1;
  }

  // Paths in reports are relative to the output directory so a moved
  // directory stays self-consistent (and reruns into any directory produce
  // byte-identical reports).
  void write_table(const hstokes::report::CsvWriter& csv, const std::string& stem,
                   JsonValue& tables) {
    fs::create_directories(out_ / "tables");
    const std::string relative = "tables/" + stem + ".csv";
    csv.write((out_ / relative).string());
    tables.push_back(JsonValue(relative));
  }

  // --- subcommands ------------------------------------------------------

  int run_solve() {
    const auto sec = sector();
    const auto prm = params(sec);
    const auto g = grid_keys();
    const auto tg = tangential(prm, g);
    const auto wg = wall(prm, g);
    const auto scfg = sweep_config(prm, g, 2.0);
    cfg_.reject_unknown();

    const auto phi = hstokes::sweep::sample_boundary_data(scfg, seed_);
    const auto bundle = hstokes::solver::solve_boundary_driven(prm, tg, wg, phi);

    fs::create_directories(out_ / "fields");
    JsonValue field_index = JsonValue::array();
    const auto dump = [&](const hstokes::fields::PhysicalField& field,
                          const std::string& stem) {
      const std::string relative = "fields/" + stem;
      hstokes::fields::dump_field(field, (out_ / relative).string());
      field_index.push_back(JsonValue(relative));
    };
    dump(bundle.u_prime, "u_prime");
    dump(bundle.u_d, "u_d");
    dump(bundle.pressure, "pressure");
    dump(bundle.dy_u_prime, "dy_u_prime");
    dump(bundle.dy_u_d, "dy_u_d");
    dump(bundle.dy_pressure, "dy_pressure");

    JsonValue results = JsonValue::object();
    results["fields"] = std::move(field_index);
    results["interior_residual"] = to_json(hstokes::solver::residual_interior(bundle));
    results["boundary_residual"] =
        to_json(hstokes::solver::residual_boundary(bundle, phi));
    JsonValue norms = JsonValue::object();
    norms["u_prime_l2"] = hstokes::fields::lp_norm_omega(bundle.u_prime, 2.0);
    norms["u_d_l2"] = hstokes::fields::lp_norm_omega(bundle.u_d, 2.0);
    norms["pressure_l2"] = hstokes::fields::lp_norm_omega(bundle.pressure, 2.0);
    norms["phi_l2"] = hstokes::fields::lp_norm_gamma(phi, 2.0);
    results["norms"] = std::move(norms);
    return finish(std::move(results));
  }

  int run_verify() {
    const auto sec = sector();
    const auto prm = params(sec);
    const auto g = grid_keys();
    const auto tg = tangential(prm, g);
    const auto wg = wall(prm, g, /*quadrature_grade=*/true);
    const auto scfg = sweep_config(prm, g, 2.0);

    const double tol_interior = cfg_.number("tol.interior", 1e-10);
    const double tol_boundary = cfg_.number("tol.boundary", 1e-10);
    const double tol_biharmonic = cfg_.number("tol.biharmonic", 1e-9);
    const double tol_biharmonic_row = cfg_.number("tol.biharmonic_row", 1e-8);
    const double tol_weak_form = cfg_.number("tol.weak_form", 2e-3);
    const double kappa = cfg_.number("verify.kappa", 1.0);
    cfg_.reject_unknown();

    const auto phi = hstokes::sweep::sample_boundary_data(scfg, seed_);
    const auto bundle = hstokes::solver::solve_boundary_driven(prm, tg, wg, phi);

    const auto interior = hstokes::solver::residual_interior(bundle);
    const auto boundary = hstokes::solver::residual_boundary(bundle, phi);
    const auto biharmonic = hstokes::solver::biharmonic_check(bundle);
    std::vector<double> direction(static_cast<std::size_t>(tg.tdim), 1.0);
    const auto test =
        hstokes::solver::solenoidal_test_field(tg, wg, direction, kappa, seed_ + 1);
    const auto weak = hstokes::solver::weak_form_check(bundle, test);

    check_tolerance("interior momentum max_rel", interior.momentum.max_rel,
                    "tol.interior", tol_interior);
    check_tolerance("interior divergence max_rel", interior.divergence.max_rel,
                    "tol.interior", tol_interior);
    check_tolerance("dynamic boundary max_rel", boundary.dynamic.max_rel,
                    "tol.boundary", tol_boundary);
    check_tolerance("normal trace max_rel", boundary.normal_trace.max_rel,
                    "tol.boundary", tol_boundary);
    check_tolerance("biharmonic interior max_rel", biharmonic.interior.max_rel,
                    "tol.biharmonic", tol_biharmonic);
    check_tolerance("biharmonic boundary row max_rel", biharmonic.boundary_row.max_rel,
                    "tol.biharmonic_row", tol_biharmonic_row);
    check_tolerance("weak form rel defect", weak.rel(), "tol.weak_form", tol_weak_form);

    JsonValue results = JsonValue::object();
    results["interior_residual"] = to_json(interior);
    results["boundary_residual"] = to_json(boundary);
    results["biharmonic"] = to_json(biharmonic);
    results["weak_form"] = to_json(weak);
    return finish(std::move(results));
  }

  int run_oracle() {
    const auto sec = sector();
    const auto prm = params(sec);
    const int steps = static_cast<int>(cfg_.integer("oracle.steps", 4096));
    const double fallback_s[] = {0.25, 1.0, 4.0};
    const auto s_values = cfg_.numbers("oracle.s_values", fallback_s);
    const double tol = cfg_.number("tol.oracle", 1e-4);
    cfg_.reject_unknown();
    for (double s : s_values)
      if (!(s > 0.0))
        throw std::invalid_argument("config: oracle.s_values must be positive");

    JsonValue modes = JsonValue::array();
    for (double s : s_values) {
      std::vector<double> xi{s};
      if (prm.dim == 3) xi.push_back(0.0);
      const auto ocfg = hstokes::oracle::adequate_config(prm, s, steps);
      const double deviation = hstokes::oracle::compare_mode(prm, xi, ocfg);
      check_tolerance("oracle deviation at s = " + hstokes::report::format_double(s),
                      deviation, "tol.oracle", tol);
      JsonValue mode = JsonValue::object();
      mode["s"] = s;
      mode["steps"] = ocfg.steps;
      mode["truncation_length"] = ocfg.truncation_length;
      mode["decay_bc"] = ocfg.decay_bc == hstokes::oracle::DecayBc::dirichlet_pair
                             ? "dirichlet_pair"
                             : "asymptotic";
      mode["deviation"] = deviation;
      modes.push_back(std::move(mode));
    }
    JsonValue results = JsonValue::object();
    results["modes"] = std::move(modes);
    return finish(std::move(results));
  }

  int run_certify(const std::string& check) {
    const auto sec = sector();
    const auto prm = params(sec);

    auto grids = hstokes::certify::CertifyGrids::defaults(sec, prm.alpha);
    grids.fixed_lambda = prm.lambda;
    grids.workers = workers_;
    const int s_points = static_cast<int>(cfg_.integer("certify.s_points", 200));
    const int y_points = static_cast<int>(cfg_.integer("certify.y_points", 200));
    const int moduli_count = static_cast<int>(cfg_.integer("certify.moduli_count", 25));
    const double max_modulus = cfg_.number("certify.max_modulus", 1e4);
    grids.s = hstokes::logspace(1e-3, 1e3, s_points);
    grids.s.insert(grids.s.begin(), 0.0);
    grids.y = hstokes::logspace(1e-3, 1e2, y_points);
    grids.y.insert(grids.y.begin(), 0.0);
    grids.lambda =
        hstokes::certify::SectorSampleGrid::defaults(sec, moduli_count, max_modulus);
    grids.validate();

    const double delta = cfg_.number("certify.delta", 0.05);
    const double delta_tilde = cfg_.number("certify.delta_tilde", delta / 2.0);
    const int k_max =
        static_cast<int>(cfg_.integer("certify.k_max", (prm.dim + 1) / 2));
    const double drift_tol = cfg_.number("tol.drift", 0.05);
    cfg_.reject_unknown();

    const bool all = check == "all";
    JsonValue results = JsonValue::object();
    std::vector<hstokes::certify::MultiplierCertificate> certificates;

    if (all || check == "mstar") {
      JsonValue certs = JsonValue::array();
      const hstokes::certify::MstarSymbol symbols[] = {
          hstokes::certify::MstarSymbol::m1,    hstokes::certify::MstarSymbol::m2,
          hstokes::certify::MstarSymbol::m3,    hstokes::certify::MstarSymbol::s_m4,
          hstokes::certify::MstarSymbol::s2_m0, hstokes::certify::MstarSymbol::s_dy_m0};
      for (auto sym : symbols) {
        for (auto& cert :
             hstokes::certify::certify_mstar_orders(sym, k_max, delta, grids, prm.dim)) {
          check_certificate(cert, drift_tol);
          certs.push_back(to_json(cert));
          certificates.push_back(std::move(cert));
        }
      }
      results["mstar"] = std::move(certs);
    }
    if (all || check == "m") {
      JsonValue certs = JsonValue::array();
      const hstokes::certify::MSymbol symbols[] = {
          hstokes::certify::MSymbol::lambda_robin, hstokes::certify::MSymbol::lambda_full,
          hstokes::certify::MSymbol::s_robin, hstokes::certify::MSymbol::sqrt_coupling};
      for (auto sym : symbols) {
        for (int k = 0; k <= std::min(k_max, 2); ++k) {
          auto cert = hstokes::certify::certify_m(sym, k, grids);
          check_certificate(cert, drift_tol);
          certs.push_back(to_json(cert));
          certificates.push_back(std::move(cert));
        }
      }
      results["m"] = std::move(certs);
    }
    if (all || check == "real-part") {
      const auto report = hstokes::certify::check_real_part(grids);
      if (report.real_part_violations > 0)
        violations_.push_back(
            "real-part: Re q >= s violated at " +
            std::to_string(report.real_part_violations) + " of " +
            std::to_string(report.points) + " points (worst deficit " +
            hstokes::report::format_double(report.worst_real_deficit) + ")");
      if (report.modulus_violations > 0)
        violations_.push_back("real-part: sqrt|lambda| <= |q+s| violated at " +
                              std::to_string(report.modulus_violations) + " points");
      results["real_part"] = to_json(report);
    }
    if (all || check == "e-bounds") {
      const auto report = hstokes::certify::check_e_bounds(grids);
      if (report.sqrt_bound_violations > 0)
        violations_.push_back(
            "e-bounds: |E| <= sqrt|lambda| y e^{-sy} violated at " +
            std::to_string(report.sqrt_bound_violations) + " of " +
            std::to_string(report.points) + " points (worst excess " +
            hstokes::report::format_double(report.worst_excess) + ")");
      results["e_bounds"] = to_json(report);
    }
    if (all || check == "product") {
      const int k = std::min(k_max, 1);
      const auto robin = hstokes::certify::certify_m(
          hstokes::certify::MSymbol::lambda_full, k, grids);
      const auto wall_factor =
          hstokes::certify::certify_mstar(hstokes::certify::MstarSymbol::m3, k, delta,
                                          grids, prm.dim);
      auto product =
          hstokes::certify::check_product_lemma(robin, wall_factor, delta_tilde, grids);
      check_certificate(product, drift_tol);
      JsonValue certs = JsonValue::array();
      certs.push_back(to_json(product));
      results["product"] = std::move(certs);
      certificates.push_back(std::move(product));
    }

    JsonValue tables = JsonValue::array();
    if (!certificates.empty())
      write_table(hstokes::report::certificate_table(certificates), "certificates",
                  tables);
    results["tables"] = std::move(tables);
    return finish(std::move(results));
  }

  int run_sweep() {
    const auto sec = sector();
    const auto prm = params(sec);
    const auto g = grid_keys();

    const double fallback_p[] = {2.0};
    const auto p_values = cfg_.numbers("sweep.p_values", fallback_p);
    const int modulus_count = static_cast<int>(cfg_.integer("sweep.modulus_count", 13));
    const auto moduli = hstokes::logspace(
        cfg_.number("sweep.modulus_min", 1e2), cfg_.number("sweep.modulus_max", 1e6),
        modulus_count);
    const double widest = kPi - sec.epsilon - kPi / 90.0;
    const double fallback_angles[] = {-widest, 0.0, widest};
    const auto angles = cfg_.numbers("sweep.angles", fallback_angles);
    const double fallback_alphas[] = {0.0, 1.0, 10.0, 100.0};
    const auto alphas = cfg_.numbers("sweep.alphas", fallback_alphas);
    const int phi_count = static_cast<int>(cfg_.integer("sweep.phi_count", 6));
    const bool run_alpha = cfg_.flag("sweep.alpha_uniformity", true);
    const bool run_ratios = cfg_.flag("sweep.ratios", true);

    const double slope_min = cfg_.number("tol.slope_min", -1.05);
    const double slope_max = cfg_.number("tol.slope_max", -0.95);
    const double alpha_spread_tol = cfg_.number("tol.alpha_spread", 2.0);
    const double shift_tol = cfg_.number("tol.refinement_shift", 0.05);
    const auto scfg0 = sweep_config(prm, g, p_values.front());
    cfg_.reject_unknown();

    const auto check_decay = [&](const hstokes::sweep::DecayReport& report,
                                 const std::string& label) {
      if (report.degenerate) {
        violations_.push_back(label + ": boundary data vanishes, no fit performed");
        return;
      }
      if (!(report.fitted_slope >= slope_min && report.fitted_slope <= slope_max))
        violations_.push_back(
            label + ": fitted slope " +
            hstokes::report::format_double(report.fitted_slope) + " outside [" +
            hstokes::report::format_double(slope_min) + ", " +
            hstokes::report::format_double(slope_max) + "]");
      if (report.under_resolved)
        violations_.push_back(label + ": wall refinement shifts norms by " +
                              hstokes::report::format_double(
                                  report.wall_refinement_shift) +
                              " (> 1%), resolution is inadequate");
    };

    JsonValue results = JsonValue::object();
    JsonValue tables = JsonValue::array();

    std::vector<hstokes::sweep::DecayReport> decay_reports;
    JsonValue decay_json = JsonValue::array();
    for (double p : p_values) {
      const auto scfg = sweep_config(prm, g, p);
      auto report = hstokes::sweep::resolvent_decay(scfg, moduli, angles);
      check_decay(report, "decay p = " + hstokes::report::format_double(p));
      decay_json.push_back(to_json(report));
      decay_reports.push_back(std::move(report));
    }
    results["decay"] = std::move(decay_json);
    write_table(hstokes::report::decay_table(decay_reports), "decay", tables);

    if (run_alpha) {
      const auto report =
          hstokes::sweep::alpha_uniformity(scfg0, moduli, angles, alphas);
      for (std::size_t i = 0; i < report.per_alpha.size(); ++i)
        check_decay(report.per_alpha[i],
                    "alpha = " + hstokes::report::format_double(report.alphas[i]));
      if (!(report.spread <= alpha_spread_tol))
        violations_.push_back(
            "alpha uniformity: constant spread " +
            hstokes::report::format_double(report.spread) + " exceeds tol.alpha_spread = " +
            hstokes::report::format_double(alpha_spread_tol));
      results["alpha_uniformity"] = to_json(report);
      write_table(hstokes::report::decay_table(report.per_alpha), "alpha_uniformity",
                  tables);
    }

    if (run_ratios) {
      auto gradient = hstokes::sweep::gradient_estimate(scfg0, prm.lambda, phi_count);
      if (gradient.degenerate)
        violations_.push_back("gradient estimate: degenerate boundary data");
      else if (gradient.refinement_shift > shift_tol)
        violations_.push_back("gradient estimate: refinement shift " +
                              hstokes::report::format_double(gradient.refinement_shift) +
                              " exceeds tol.refinement_shift");
      auto proxy = hstokes::sweep::second_order_proxy(scfg0, prm.lambda, phi_count);
      if (proxy.degenerate)
        violations_.push_back("second-order proxy: degenerate boundary data");
      else if (proxy.refinement_shift > shift_tol)
        violations_.push_back("second-order proxy: refinement shift " +
                              hstokes::report::format_double(proxy.refinement_shift) +
                              " exceeds tol.refinement_shift");
      results["gradient_estimate"] = to_json(gradient);
      results["second_order_proxy"] = to_json(proxy);
      write_table(hstokes::report::ratio_table({&gradient, 1}), "gradient_ratios",
                  tables);
      write_table(hstokes::report::ratio_table({&proxy, 1}), "proxy_ratios", tables);
    }

    results["tables"] = std::move(tables);
    return finish(std::move(results));
  }

  RunConfig cfg_;
  std::string command_;
  fs::path out_;
  std::uint64_t seed_ = 1;
  int workers_ = 1;
  std::vector<std::string> violations_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-driven Stokes resolvent on the half-space: solve, verify,"
               " cross-check against a finite-difference oracle, certify multiplier"
               " bounds, and sweep scaling laws."};
  app.require_subcommand(1);

  CliOptions opts;
  const auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "key = value configuration file");
    sub->add_option("--out", opts.out_dir, "output directory (default: out)");
    sub->add_option("--set", opts.overrides, "KEY=VALUE override, repeatable")
        ->take_all();
    sub->add_option("--workers", opts.workers, "cap on worker threads");
    sub->add_option("--seed", opts.seed, "boundary-data sampler seed");
  };

  add_common(app.add_subcommand(
      "solve", "solve one problem and dump the resulting fields"));
  add_common(app.add_subcommand(
      "verify", "solve and check interior/boundary/biharmonic/weak-form residuals"));
  add_common(app.add_subcommand(
      "oracle", "compare closed-form modes against the finite-difference solve"));
  auto* certify = app.add_subcommand(
      "certify", "empirical multiplier certificates and kernel inequalities");
  add_common(certify);
  certify->add_option("--check", opts.check, "which certification family to run")
      ->check(CLI::IsMember({"all", "mstar", "m", "real-part", "e-bounds", "product"}));
  add_common(app.add_subcommand(
      "sweep", "resolvent decay, alpha uniformity, and norm-ratio sweeps"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg = opts.config_path.empty() ? RunConfig()
                                             : RunConfig::from_file(opts.config_path);
    for (const auto& assignment : opts.overrides) cfg.apply_override(assignment);
    if (opts.workers >= 0)
      cfg.apply_override("run.workers=" + std::to_string(opts.workers));
    if (opts.seed >= 0) cfg.apply_override("run.seed=" + std::to_string(opts.seed));

    Runner runner(std::move(cfg), app.get_subcommands().front()->get_name(),
                  opts.out_dir);
    return runner.run(opts.check);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
