#include "hstokes/certify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

namespace hstokes::certify {

namespace K = hstokes::kernels;
using K::ResolventParams;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// ---- symbol evaluators ----------------------------------------------------

Complex mstar_value(MstarSymbol sym, const ResolventParams& p, double s, double y) {
  const K::KernelPoint pt{s, y};
  switch (sym) {
    case MstarSymbol::m1: return K::m1(p, pt);
    case MstarSymbol::m2: return K::m2(p, pt);
    case MstarSymbol::m3: return K::m3(p, pt);
    case MstarSymbol::s2_m0: return s * K::m1(p, pt) / p.lambda;
    case MstarSymbol::s_m4: return s * K::m4(p, pt);
    case MstarSymbol::s_dy_m0: return s * K::m2(p, pt) / p.lambda;
  }
  throw std::logic_error("mstar_value: bad symbol");
}

Complex mstar_ds(MstarSymbol sym, const ResolventParams& p, double s, double y) {
  const K::KernelPoint pt{s, y};
  switch (sym) {
    case MstarSymbol::m1: return K::ds_m1(p, pt);
    case MstarSymbol::m2: return K::ds_m2(p, pt);
    case MstarSymbol::m3: return K::ds_m3(p, pt);
    case MstarSymbol::s2_m0:
      return (K::m1(p, pt) + s * K::ds_m1(p, pt)) / p.lambda;
    case MstarSymbol::s_m4: return K::m4(p, pt) + s * K::ds_m4(p, pt);
    case MstarSymbol::s_dy_m0:
      return (K::m2(p, pt) + s * K::ds_m2(p, pt)) / p.lambda;
  }
  throw std::logic_error("mstar_ds: bad symbol");
}

Complex m_value(MSymbol sym, const ResolventParams& p, double s) {
  if (sym == MSymbol::identity) return Complex{1.0, 0.0};
  const Complex q = K::sqrt_shifted(p, s);
  const Complex robin = p.lambda + p.alpha + q;
  const Complex full = robin + s;
  switch (sym) {
    case MSymbol::lambda_robin: return p.lambda / robin;
    case MSymbol::lambda_full: return p.lambda / full;
    case MSymbol::s_robin: return s / robin;
    case MSymbol::sqrt_coupling: return K::sqrt_shifted(p, 0.0) * (q + s) / full;
    case MSymbol::identity: break;
  }
  throw std::logic_error("m_value: bad symbol");
}

Complex m_ds(MSymbol sym, const ResolventParams& p, double s) {
  if (sym == MSymbol::identity) return Complex{0.0, 0.0};
  const Complex q = K::sqrt_shifted(p, s);
  const Complex dq = s / q;  // d/ds of sqrt(lambda + s^2)
  const Complex robin = p.lambda + p.alpha + q;
  const Complex full = robin + s;
  switch (sym) {
    case MSymbol::lambda_robin: return -p.lambda * dq / (robin * robin);
    case MSymbol::lambda_full: return -p.lambda * (1.0 + dq) / (full * full);
    case MSymbol::s_robin: return 1.0 / robin - s * dq / (robin * robin);
    case MSymbol::sqrt_coupling:
      return K::sqrt_shifted(p, 0.0) * (1.0 + dq) * (p.alpha + p.lambda) /
             (full * full);
    case MSymbol::identity: break;
  }
  throw std::logic_error("m_ds: bad symbol");
}

// One Richardson extrapolation of the centered difference of g at s.
Complex richardson_ds(const std::function<Complex(double)>& g, double s,
                      bool& breakdown) {
  const double h = std::max(s, 1.0) * 1e-4;
  if (s - h <= 0.0) {
    breakdown = true;
    return Complex{0.0, 0.0};
  }
  const Complex dh = (g(s + h) - g(s - h)) / (2.0 * h);
  const Complex dh2 = (g(s + h / 2) - g(s - h / 2)) / h;
  return (4.0 * dh2 - dh) / 3.0;
}

// (1+y) s^k a e^{delta s y}, switching to log arithmetic when the bare
// exponential would overflow (the decay inside `a` keeps the product sane).
double weighted(int k, double s, double y, double a, double delta) {
  if (std::isnan(a)) return a;
  if (a == 0.0 || (k > 0 && s == 0.0)) return 0.0;
  const double e = delta * s * y;
  if (e <= 600.0) {
    double sk = 1.0;
    for (int i = 0; i < k; ++i) sk *= s;
    return (1.0 + y) * sk * a * std::exp(e);
  }
  return std::exp(std::log1p(y) + k * std::log(s) + std::log(a) + e);
}

// Three derivative magnitudes |h_0|, |h_1|, |h_2| of one symbol at a point;
// orders above k_max are left untouched.
using PointEval = std::function<void(const ResolventParams&, double s, double y,
                                     int k_max, std::array<double, 3>& mags,
                                     long& breakdowns)>;

struct SupSlot {
  double sup = 0.0;
  GridArgmax arg;
  long breakdowns = 0;
};

std::vector<SupSlot> sweep_weighted(const PointEval& eval, int k_max, double delta,
                                    const CertifyGrids& grids,
                                    const std::vector<Complex>& lambdas) {
  const long nl = static_cast<long>(lambdas.size());
  std::vector<std::vector<SupSlot>> per_lambda(nl,
                                               std::vector<SupSlot>(k_max + 1));
  parallel_for(nl, grids.workers, [&](long li) {
    const ResolventParams p{lambdas[li], grids.alpha, 2};
    auto& slots = per_lambda[li];
    std::array<double, 3> mags{};
    for (double s : grids.s)
      for (double y : grids.y) {
        mags = {0.0, 0.0, 0.0};
        eval(p, s, y, k_max, mags, slots[0].breakdowns);
        for (int k = 0; k <= k_max; ++k) {
          const double w = weighted(k, s, y, mags[k], delta);
          if (w > slots[k].sup) {
            slots[k].sup = w;
            slots[k].arg = GridArgmax{s, y, lambdas[li]};
          }
        }
      }
  });
  // Deterministic reduction in lambda order.
  std::vector<SupSlot> out(k_max + 1);
  for (long li = 0; li < nl; ++li) {
    out[0].breakdowns += per_lambda[li][0].breakdowns;
    for (int k = 0; k <= k_max; ++k)
      if (per_lambda[li][k].sup > out[k].sup) {
        out[k].sup = per_lambda[li][k].sup;
        out[k].arg = per_lambda[li][k].arg;
      }
  }
  return out;
}

double drift_of(double base, double doubled) {
  if (base == 0.0 && doubled == 0.0) return 0.0;
  if (base == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(doubled - base) / base;
}

std::string grid_note_of(const CertifyGrids& g, bool uniform) {
  char buf[160];
  if (uniform)
    std::snprintf(buf, sizeof buf, "s x%zu, y x%zu, |lambda| x%zu, angles x%zu",
                  g.s.size(), g.y.size(), g.lambda.moduli.size(),
                  g.lambda.angles.size());
  else
    std::snprintf(buf, sizeof buf, "s x%zu, y x%zu, lambda fixed", g.s.size(),
                  g.y.size());
  return buf;
}

PointEval mstar_eval(MstarSymbol sym) {
  return [sym](const ResolventParams& p, double s, double y, int k_max,
               std::array<double, 3>& mags, long& breakdowns) {
    mags[0] = std::abs(mstar_value(sym, p, s, y));
    if (k_max >= 1) mags[1] = std::abs(mstar_ds(sym, p, s, y));
    if (k_max >= 2 && s > 0.0) {
      bool broke = false;
      const Complex d2 = richardson_ds(
          [&](double ss) { return mstar_ds(sym, p, ss, y); }, s, broke);
      if (broke)
        ++breakdowns;
      else
        mags[2] = std::abs(d2);
    }
  };
}

std::vector<Complex> lambda_span(const CertifyGrids& grids, bool uniform) {
  if (uniform) return grids.lambda.samples();
  return {grids.fixed_lambda};
}

MstarSymbol mstar_by_name(const std::string& id) {
  for (MstarSymbol sym :
       {MstarSymbol::m1, MstarSymbol::m2, MstarSymbol::m3, MstarSymbol::s2_m0,
        MstarSymbol::s_m4, MstarSymbol::s_dy_m0})
    if (id == name(sym)) return sym;
  throw std::invalid_argument("check_product_lemma: unknown wall symbol " + id);
}

MSymbol m_by_name(const std::string& id) {
  for (MSymbol sym : {MSymbol::identity, MSymbol::lambda_robin,
                      MSymbol::lambda_full, MSymbol::s_robin,
                      MSymbol::sqrt_coupling})
    if (id == name(sym)) return sym;
  throw std::invalid_argument("check_product_lemma: unknown frequency symbol " + id);
}

}  // namespace

const char* name(MstarSymbol sym) {
  switch (sym) {
    case MstarSymbol::m1: return "m1";
    case MstarSymbol::m2: return "m2";
    case MstarSymbol::m3: return "m3";
    case MstarSymbol::s2_m0: return "s2_m0";
    case MstarSymbol::s_m4: return "s_m4";
    case MstarSymbol::s_dy_m0: return "s_dy_m0";
  }
  return "?";
}

const char* name(MSymbol sym) {
  switch (sym) {
    case MSymbol::identity: return "identity";
    case MSymbol::lambda_robin: return "lambda_robin";
    case MSymbol::lambda_full: return "lambda_full";
    case MSymbol::s_robin: return "s_robin";
    case MSymbol::sqrt_coupling: return "sqrt_coupling";
  }
  return "?";
}

bool uniform_in_lambda(MstarSymbol sym) {
  return sym == MstarSymbol::m1 || sym == MstarSymbol::m2 ||
         sym == MstarSymbol::m3;
}

void SectorSampleGrid::validate() const {
  sector.validate();
  require(!moduli.empty() && !angles.empty(), "sector sample: empty grid");
  require(margin > 0.0, "sector sample: margin must be positive");
  double prev = 0.0;
  for (double r : moduli) {
    require(r > 0.0 && r >= prev, "sector sample: moduli must be positive ascending");
    prev = r;
  }
  const double max_angle = kPi - sector.epsilon - margin;
  for (double a : angles)
    require(std::abs(a) <= max_angle + 1e-12, "sector sample: angle outside sector");
}

std::vector<Complex> SectorSampleGrid::samples() const {
  std::vector<Complex> out;
  out.reserve(moduli.size() * angles.size());
  for (double r : moduli)
    for (double a : angles) out.push_back(std::polar(r, a));
  return out;
}

SectorSampleGrid SectorSampleGrid::defaults(const kernels::SectorSpec& sector,
                                            int moduli_count, double max_modulus) {
  SectorSampleGrid g;
  g.sector = sector;
  g.margin = kPi / 90.0;
  g.moduli = logspace(sector.omega, max_modulus, moduli_count);
  const double ext = kPi - sector.epsilon - g.margin;
  g.angles = {-ext, -ext / 2.0, 0.0, ext / 2.0, ext};
  return g;
}

void CertifyGrids::validate() const {
  lambda.validate();
  require(!s.empty() && !y.empty(), "certify grids: empty s or y grid");
  for (double v : s) require(v >= 0.0 && std::isfinite(v), "certify grids: bad s");
  for (double v : y) require(v >= 0.0 && std::isfinite(v), "certify grids: bad y");
  require(alpha >= 0.0, "certify grids: alpha must be nonnegative");
  require(workers >= 1, "certify grids: workers must be >= 1");
  if (fixed_lambda != Complex{0.0, 0.0}) {
    const ResolventParams p{fixed_lambda, alpha, 2};
    p.validate(lambda.sector);
  }
}

CertifyGrids CertifyGrids::defaults(const kernels::SectorSpec& sector, double alpha) {
  CertifyGrids g;
  g.s = logspace(1e-3, 1e3, 200);
  g.s.insert(g.s.begin(), 0.0);
  g.y = logspace(1e-3, 1e2, 200);
  g.y.insert(g.y.begin(), 0.0);
  g.lambda = SectorSampleGrid::defaults(sector, 25, 1e4);
  g.fixed_lambda = std::polar(10.0, kPi / 3.0);
  g.alpha = alpha;
  g.workers = default_workers();
  return g;
}

CertifyGrids CertifyGrids::doubled() const {
  auto densify = [](const std::vector<double>& grid) {
    std::vector<double> positive;
    bool has_zero = false;
    for (double v : grid) {
      if (v == 0.0)
        has_zero = true;
      else
        positive.push_back(v);
    }
    if (positive.size() < 2) return grid;  // degenerate grids stay as-is
    std::vector<double> out =
        logspace(positive.front(), positive.back(),
                 static_cast<int>(positive.size()) * 2);
    if (has_zero) out.insert(out.begin(), 0.0);
    return out;
  };
  CertifyGrids g = *this;
  g.s = densify(s);
  g.y = densify(y);
  g.lambda.moduli = logspace(lambda.moduli.front(), lambda.moduli.back(),
                             static_cast<int>(lambda.moduli.size()) * 2);
  return g;
}

std::vector<MultiplierCertificate> certify_mstar_orders(MstarSymbol sym, int k_max,
                                                        double delta,
                                                        const CertifyGrids& grids,
                                                        int dim) {
  grids.validate();
  require(dim == 2 || dim == 3, "certify_mstar: dim must be 2 or 3");
  require(k_max >= 0 && k_max <= (dim + 1) / 2,
          "certify_mstar: k exceeds (dim+1)/2");
  require(delta >= 0.0, "certify_mstar: delta must be nonnegative");
  const bool uniform = uniform_in_lambda(sym);
  if (!uniform)
    require(grids.fixed_lambda != Complex{0.0, 0.0},
            "certify_mstar: fixed lambda required for this symbol");

  const auto lambdas = lambda_span(grids, uniform);
  const PointEval eval = mstar_eval(sym);
  const auto base = sweep_weighted(eval, k_max, delta, grids, lambdas);
  const CertifyGrids fine = grids.doubled();
  const auto dbl = sweep_weighted(eval, k_max, delta, fine, lambda_span(fine, uniform));

  std::vector<MultiplierCertificate> out;
  for (int k = 0; k <= k_max; ++k) {
    MultiplierCertificate c;
    c.symbol = name(sym);
    c.k = k;
    c.delta = delta;
    c.uniform_lambda = uniform;
    c.fixed_lambda = uniform ? Complex{0.0, 0.0} : grids.fixed_lambda;
    c.alpha = grids.alpha;
    c.empirical_sup = base[k].sup;
    c.argmax = base[k].arg;
    c.refinement_drift = drift_of(base[k].sup, dbl[k].sup);
    c.derivative_breakdowns = base[0].breakdowns;
    c.grid_note = grid_note_of(grids, uniform);
    out.push_back(std::move(c));
  }
  return out;
}

MultiplierCertificate certify_mstar(MstarSymbol sym, int k, double delta,
                                    const CertifyGrids& grids, int dim) {
  return certify_mstar_orders(sym, k, delta, grids, dim).back();
}

MultiplierCertificate certify_m(MSymbol sym, int k, const CertifyGrids& grids) {
  grids.validate();
  require(k >= 0 && k <= 2, "certify_m: k must be 0..2");
  // Frequency-only weight: run the wall-weight engine with y = {0} and
  // delta = 0, which reduces the weight to s^k |d^k m|.
  CertifyGrids flat = grids;
  flat.y = {0.0};
  const PointEval eval = [sym](const ResolventParams& p, double s, double /*y*/,
                               int k_max, std::array<double, 3>& mags,
                               long& breakdowns) {
    mags[0] = std::abs(m_value(sym, p, s));
    if (k_max >= 1) mags[1] = std::abs(m_ds(sym, p, s));
    if (k_max >= 2 && s > 0.0) {
      bool broke = false;
      const Complex d2 =
          richardson_ds([&](double ss) { return m_ds(sym, p, ss); }, s, broke);
      if (broke)
        ++breakdowns;
      else
        mags[2] = std::abs(d2);
    }
  };
  const auto lambdas = lambda_span(flat, true);
  const auto base = sweep_weighted(eval, k, 0.0, flat, lambdas);
  CertifyGrids fine = flat.doubled();
  fine.y = {0.0};
  const auto dbl = sweep_weighted(eval, k, 0.0, fine, lambda_span(fine, true));

  MultiplierCertificate c;
  c.symbol = name(sym);
  c.k = k;
  c.delta = 0.0;
  c.uniform_lambda = true;
  c.alpha = grids.alpha;
  c.empirical_sup = base[k].sup;
  c.argmax = base[k].arg;
  c.refinement_drift = drift_of(base[k].sup, dbl[k].sup);
  c.derivative_breakdowns = base[0].breakdowns;
  c.grid_note = grid_note_of(flat, true);
  return c;
}

RealPartReport check_real_part(const CertifyGrids& grids) {
  grids.validate();
  RealPartReport r;
  r.empirical_c = std::numeric_limits<double>::infinity();
  const double root_omega = std::sqrt(grids.lambda.sector.omega);
  for (const Complex lam : grids.lambda.samples()) {
    const ResolventParams p{lam, grids.alpha, 2};
    for (double s : grids.s) {
      ++r.points;
      const Complex q = K::sqrt_shifted(p, s);
      const double deficit = s - q.real();
      if (deficit > 1e-12) {
        ++r.real_part_violations;
        if (deficit > r.worst_real_deficit) {
          r.worst_real_deficit = deficit;
          r.worst_real = GridArgmax{s, 0.0, lam};
        }
      }
      const double c = q.real() / (s + root_omega);
      if (c < r.empirical_c) {
        r.empirical_c = c;
        r.argmin_c = GridArgmax{s, 0.0, lam};
      }
      const double root_mod = std::sqrt(std::abs(lam));
      const double mod_deficit = root_mod - std::abs(q + s);
      if (mod_deficit > 1e-12 * root_mod) {
        ++r.modulus_violations;
        if (mod_deficit > r.worst_modulus_deficit) {
          r.worst_modulus_deficit = mod_deficit;
          r.worst_modulus = GridArgmax{s, 0.0, lam};
        }
      }
    }
  }
  return r;
}

EBoundReport check_e_bounds(const CertifyGrids& grids) {
  grids.validate();
  const auto lambdas = grids.lambda.samples();
  const long nl = static_cast<long>(lambdas.size());
  std::vector<EBoundReport> partial(nl);
  parallel_for(nl, grids.workers, [&](long li) {
    EBoundReport& r = partial[li];
    r.exponential_rate = std::numeric_limits<double>::infinity();
    const Complex lam = lambdas[li];
    const ResolventParams p{lam, grids.alpha, 2};
    const double root_mod = std::sqrt(std::abs(lam));
    for (double s : grids.s)
      for (double y : grids.y) {
        ++r.points;
        const double ae = std::abs(K::big_e(p, {s, y}));
        const double bound = root_mod * y * std::exp(-s * y);
        const double excess = ae - bound;
        if (excess > 1e-9) {
          ++r.sqrt_bound_violations;
          if (excess > r.worst_excess) {
            r.worst_excess = excess;
            r.worst = GridArgmax{s, y, lam};
          }
        }
        if (bound > 0.0 && ae / bound > r.worst_ratio) r.worst_ratio = ae / bound;
        if (s > 0.0 && y > 0.0 && ae > 0.0) {
          const double rate = -std::log(ae / 2.0) / (s * y);
          if (rate < r.exponential_rate) {
            r.exponential_rate = rate;
            r.argmin_rate = GridArgmax{s, y, lam};
          }
        }
      }
  });
  EBoundReport out;
  out.exponential_rate = std::numeric_limits<double>::infinity();
  for (const EBoundReport& r : partial) {
    out.points += r.points;
    out.sqrt_bound_violations += r.sqrt_bound_violations;
    if (r.worst_excess > out.worst_excess) {
      out.worst_excess = r.worst_excess;
      out.worst = r.worst;
    }
    out.worst_ratio = std::max(out.worst_ratio, r.worst_ratio);
    if (r.exponential_rate < out.exponential_rate) {
      out.exponential_rate = r.exponential_rate;
      out.argmin_rate = r.argmin_rate;
    }
  }
  return out;
}

MultiplierCertificate check_product_lemma(const MultiplierCertificate& cert_m,
                                          const MultiplierCertificate& cert_mstar,
                                          double delta_tilde,
                                          const CertifyGrids& grids) {
  grids.validate();
  require(delta_tilde >= 0.0 && delta_tilde <= cert_mstar.delta,
          "check_product_lemma: delta_tilde must lie in [0, delta]");
  const MSymbol msym = m_by_name(cert_m.symbol);
  const MstarSymbol ssym = mstar_by_name(cert_mstar.symbol);
  const int k_max = std::min(cert_m.k, cert_mstar.k);
  const bool uniform = cert_mstar.uniform_lambda;
  if (!uniform)
    require(grids.fixed_lambda != Complex{0.0, 0.0},
            "check_product_lemma: fixed lambda required");

  // g = e^{dt s y} m m*; h_k = e^{-dt s y} d^k g so the engine's e^{delta s y}
  // factor (delta = the input wall rate) absorbs the reweighting exactly:
  // (1+y) s^k |d^k g| e^{(delta - dt) s y} = (1+y) s^k |h_k| e^{delta s y}.
  const double dt = delta_tilde;
  const PointEval eval = [msym, ssym, dt](const ResolventParams& p, double s,
                                          double y, int k_max_pt,
                                          std::array<double, 3>& mags,
                                          long& breakdowns) {
    const Complex mv = m_value(msym, p, s);
    const Complex sv = mstar_value(ssym, p, s, y);
    const Complex prod = mv * sv;
    mags[0] = std::abs(prod);
    if (k_max_pt < 1) return;
    const auto dprod = [&](double ss) {
      return m_ds(msym, p, ss) * mstar_value(ssym, p, ss, y) +
             m_value(msym, p, ss) * mstar_ds(ssym, p, ss, y);
    };
    const Complex d1 = dprod(s);
    const Complex h1 = dt * y * prod + d1;
    mags[1] = std::abs(h1);
    if (k_max_pt < 2 || s == 0.0) return;
    bool broke = false;
    const Complex d2 = richardson_ds(dprod, s, broke);
    if (broke) {
      ++breakdowns;
      return;
    }
    mags[2] = std::abs(dt * y * h1 + dt * y * d1 + d2);
  };

  const auto base =
      sweep_weighted(eval, k_max, cert_mstar.delta, grids, lambda_span(grids, uniform));
  const CertifyGrids fine = grids.doubled();
  const auto dbl =
      sweep_weighted(eval, k_max, cert_mstar.delta, fine, lambda_span(fine, uniform));

  MultiplierCertificate c;
  char label[128];
  std::snprintf(label, sizeof label, "exp(%g sy)*%s*%s", dt, cert_m.symbol.c_str(),
                cert_mstar.symbol.c_str());
  c.symbol = label;
  c.k = k_max;
  c.delta = cert_mstar.delta - delta_tilde;
  c.uniform_lambda = uniform;
  c.fixed_lambda = uniform ? Complex{0.0, 0.0} : grids.fixed_lambda;
  c.alpha = grids.alpha;
  c.empirical_sup = base[k_max].sup;
  c.argmax = base[k_max].arg;
  c.refinement_drift = drift_of(base[k_max].sup, dbl[k_max].sup);
  c.derivative_breakdowns = base[0].breakdowns;
  c.grid_note = grid_note_of(grids, uniform);
  return c;
}

}  // namespace hstokes::certify
