#include "hstokes/fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace hstokes::fields {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// One FFTW plan per (tdim, n, sign), created lazily under a mutex and reused
// via the new-array execute interface (thread-safe on distinct buffers).
// FFTW_UNALIGNED keeps the plan valid for arbitrarily aligned scratch.
class PlanCache {
 public:
  fftw_plan get(int tdim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const std::tuple<int, int, int> key{tdim, n, sign};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = tdim == 1 ? n : static_cast<std::size_t>(n) * n;
    std::vector<Complex> a(total), b(total);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = tdim == 1 ? fftw_plan_dft_1d(n, in, out, sign, flags)
                            : fftw_plan_dft_2d(n, n, in, out, sign, flags);
    if (!p) throw std::runtime_error("fields: fftw planning failed");
    plans_.emplace(key, p);
    return p;
  }
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// Transforms each of `slabs` interleaved series (stride = slabs, one series
// per (level, component) pair) across the tangential modes.
void transform_slabs(const TangentialGrid& grid, int slabs,
                     const std::vector<Complex>& in, std::vector<Complex>& out,
                     int sign, double scale) {
  const int modes = grid.modes();
  const fftw_plan plan = plan_cache().get(grid.tdim, grid.n, sign);
  parallel_for(slabs, default_workers(), [&](long slice) {
    std::vector<Complex> a(modes), b(modes);
    for (int m = 0; m < modes; ++m)
      a[m] = in[static_cast<std::size_t>(m) * slabs + slice];
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(a.data()),
                     reinterpret_cast<fftw_complex*>(b.data()));
    for (int m = 0; m < modes; ++m)
      out[static_cast<std::size_t>(m) * slabs + slice] = b[m] * scale;
  });
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void TangentialGrid::validate() const {
  require(tdim == 1 || tdim == 2, "TangentialGrid: tdim must be 1 or 2");
  require(n >= 8 && power_of_two(n), "TangentialGrid: n must be a power of two >= 8");
  require(box_length > 0.0 && std::isfinite(box_length),
          "TangentialGrid: box_length must be positive");
}

double TangentialGrid::frequency(int axis_index) const {
  return 2.0 * kPi * wavenumber(axis_index) / box_length;
}

std::array<int, 2> TangentialGrid::axis_indices(int mode) const {
  if (tdim == 1) return {mode, 0};
  return {mode / n, mode % n};
}

std::array<int, 2> TangentialGrid::wavenumbers(int mode) const {
  const auto a = axis_indices(mode);
  return {wavenumber(a[0]), tdim == 2 ? wavenumber(a[1]) : 0};
}

std::array<double, 2> TangentialGrid::frequencies(int mode) const {
  const auto k = wavenumbers(mode);
  const double f = 2.0 * kPi / box_length;
  return {f * k[0], f * k[1]};
}

int TangentialGrid::reflected_mode(int mode) const {
  const auto a = axis_indices(mode);
  const int r0 = (n - a[0]) % n;
  if (tdim == 1) return r0;
  const int r1 = (n - a[1]) % n;
  return r0 * n + r1;
}

std::array<double, 2> TangentialGrid::point(int index) const {
  const auto a = axis_indices(index);
  const double h = box_length / n;
  return {h * a[0], tdim == 2 ? h * a[1] : 0.0};
}

void WallGrid::validate() const {
  require(!levels.empty(), "WallGrid: no levels");
  require(levels.front() == 0.0, "WallGrid: first level must be y = 0");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    require(std::isfinite(levels[i]), "WallGrid: levels must be finite");
    if (i > 0) require(levels[i] > levels[i - 1], "WallGrid: levels must increase");
  }
}

std::vector<double> WallGrid::trapezoid_weights() const {
  validate();
  require(levels.size() >= 2, "WallGrid: trapezoid needs >= 2 levels");
  const int m = count();
  std::vector<double> w(m);
  w[0] = 0.5 * (levels[1] - levels[0]);
  for (int j = 1; j + 1 < m; ++j) w[j] = 0.5 * (levels[j + 1] - levels[j - 1]);
  w[m - 1] = 0.5 * (levels[m - 1] - levels[m - 2]);
  return w;
}

WallGrid WallGrid::graded(double y_top, int m_intervals, double y1) {
  require(y_top > 0.0 && std::isfinite(y_top), "WallGrid: y_top must be positive");
  require(m_intervals >= 1, "WallGrid: need at least one interval");
  require(y1 > 0.0 && y1 <= y_top, "WallGrid: y1 must lie in (0, y_top]");
  const int m = m_intervals;
  if (m == 1) return WallGrid{{0.0, y_top}};

  // y1 = Y / sum_{j<M} r^j, so solve sum_{j<M} r^j = Y/y1 (increasing in r).
  const double target = y_top / y1;
  auto geom_sum = [m](double r) {
    double acc = 0.0, pw = 1.0;
    for (int j = 0; j < m; ++j, pw *= r) acc += pw;
    return acc;
  };
  double lo = 1e-6, hi = 1.0;
  while (geom_sum(hi) < target) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (geom_sum(mid) < target ? lo : hi) = mid;
  }
  const double r = 0.5 * (lo + hi);

  WallGrid g;
  g.levels.resize(m + 1);
  double acc = 0.0, pw = 1.0, total = geom_sum(r);
  g.levels[0] = 0.0;
  for (int j = 1; j < m; ++j) {
    acc += pw;
    pw *= r;
    g.levels[j] = y_top * (acc / total);
  }
  g.levels[m] = y_top;
  g.validate();
  return g;
}

WallGrid WallGrid::graded(double y_top, int m_intervals) {
  return graded(y_top, m_intervals, 0.01 * y_top);
}

template <Space S>
Field<S>::Field(const TangentialGrid& g, const WallGrid& w, int c)
    : grid(g), wall(w), components(c) {
  grid.validate();
  wall.validate();
  require(c >= 1, "Field: components must be >= 1");
  values.assign(static_cast<std::size_t>(grid.modes()) * wall.count() * c, Complex{});
}

template <Space S>
void Field<S>::validate_shape() const {
  grid.validate();
  wall.validate();
  require(components >= 1, "Field: components must be >= 1");
  require(values.size() == static_cast<std::size_t>(grid.modes()) * wall.count() * components,
          "Field: value array does not match its grids");
}

template <Space S>
BoundaryField<S>::BoundaryField(const TangentialGrid& g, int c)
    : grid(g), components(c) {
  grid.validate();
  require(c >= 1, "BoundaryField: components must be >= 1");
  values.assign(static_cast<std::size_t>(grid.modes()) * c, Complex{});
}

template <Space S>
void BoundaryField<S>::validate_shape() const {
  grid.validate();
  require(components >= 1, "BoundaryField: components must be >= 1");
  require(values.size() == static_cast<std::size_t>(grid.modes()) * components,
          "BoundaryField: value array does not match its grid");
}

template struct Field<Space::spectral>;
template struct Field<Space::physical>;
template struct BoundaryField<Space::spectral>;
template struct BoundaryField<Space::physical>;

SpectralField forward_dft(const PhysicalField& field) {
  field.validate_shape();
  SpectralField out(field.grid, field.wall, field.components);
  transform_slabs(field.grid, field.wall.count() * field.components, field.values,
                  out.values, FFTW_FORWARD, 1.0);
  return out;
}

PhysicalField inverse_dft(const SpectralField& field) {
  field.validate_shape();
  PhysicalField out(field.grid, field.wall, field.components);
  transform_slabs(field.grid, field.wall.count() * field.components, field.values,
                  out.values, FFTW_BACKWARD, 1.0 / field.grid.modes());
  return out;
}

SpectralBoundary forward_dft(const PhysicalBoundary& field) {
  field.validate_shape();
  SpectralBoundary out(field.grid, field.components);
  transform_slabs(field.grid, field.components, field.values, out.values,
                  FFTW_FORWARD, 1.0);
  return out;
}

PhysicalBoundary inverse_dft(const SpectralBoundary& field) {
  field.validate_shape();
  PhysicalBoundary out(field.grid, field.components);
  transform_slabs(field.grid, field.components, field.values, out.values,
                  FFTW_BACKWARD, 1.0 / field.grid.modes());
  return out;
}

SpectralField tangential_derivative(const SpectralField& field, int axis) {
  field.validate_shape();
  require(axis >= 0 && axis < field.grid.tdim, "tangential_derivative: bad axis");
  SpectralField out = field;
  const int modes = field.grid.modes();
  const std::size_t per_mode =
      static_cast<std::size_t>(field.wall.count()) * field.components;
  for (int m = 0; m < modes; ++m) {
    const Complex factor{0.0, field.grid.frequencies(m)[axis]};
    for (std::size_t j = 0; j < per_mode; ++j) out.values[m * per_mode + j] *= factor;
  }
  return out;
}

SpectralBoundary tangential_derivative(const SpectralBoundary& field, int axis) {
  field.validate_shape();
  require(axis >= 0 && axis < field.grid.tdim, "tangential_derivative: bad axis");
  SpectralBoundary out = field;
  const int modes = field.grid.modes();
  for (int m = 0; m < modes; ++m) {
    const Complex factor{0.0, field.grid.frequencies(m)[axis]};
    for (int c = 0; c < field.components; ++c) out.at(m, c) *= factor;
  }
  return out;
}

namespace {

void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("lp norm: p must lie in (1, inf)");
}

}  // namespace

double lp_norm_omega(const PhysicalField& field, double p) {
  field.validate_shape();
  check_p(p);
  const auto wlev = field.wall.trapezoid_weights();
  const int modes = field.grid.modes(), nlev = field.wall.count();
  double acc = 0.0;
  for (int m = 0; m < modes; ++m)
    for (int l = 0; l < nlev; ++l) {
      double mag2 = 0.0;
      for (int c = 0; c < field.components; ++c) mag2 += std::norm(field.at(m, l, c));
      acc += wlev[l] * std::pow(mag2, 0.5 * p);
    }
  const double wtan = std::pow(field.grid.box_length / field.grid.n, field.grid.tdim);
  return std::pow(wtan * acc, 1.0 / p);
}

double lp_norm_gamma(const PhysicalBoundary& field, double p) {
  field.validate_shape();
  check_p(p);
  const int modes = field.grid.modes();
  double acc = 0.0;
  for (int m = 0; m < modes; ++m) {
    double mag2 = 0.0;
    for (int c = 0; c < field.components; ++c) mag2 += std::norm(field.at(m, c));
    acc += std::pow(mag2, 0.5 * p);
  }
  const double wtan = std::pow(field.grid.box_length / field.grid.n, field.grid.tdim);
  return std::pow(wtan * acc, 1.0 / p);
}

double l2_norm_spectral(const SpectralField& field) {
  field.validate_shape();
  const auto wlev = field.wall.trapezoid_weights();
  const int modes = field.grid.modes(), nlev = field.wall.count();
  double acc = 0.0;
  for (int m = 0; m < modes; ++m)
    for (int l = 0; l < nlev; ++l)
      for (int c = 0; c < field.components; ++c)
        acc += wlev[l] * std::norm(field.at(m, l, c));
  // Parseval: sum_x |u|^2 = (1/n^tdim) sum_k |u^|^2, then (L/n)^tdim per point.
  const double wtan = std::pow(field.grid.box_length / field.grid.n, field.grid.tdim) /
                      field.grid.modes();
  return std::sqrt(wtan * acc);
}

double sobolev_w1p_norm(const PhysicalField& u, const PhysicalField& du_dy, double p) {
  u.validate_shape();
  du_dy.validate_shape();
  check_p(p);
  require(u.values.size() == du_dy.values.size() && u.components == du_dy.components &&
              u.grid.n == du_dy.grid.n && u.grid.tdim == du_dy.grid.tdim,
          "sobolev_w1p_norm: field and normal derivative shapes differ");
  double total = std::pow(lp_norm_omega(u, p), p) + std::pow(lp_norm_omega(du_dy, p), p);
  const SpectralField spec = forward_dft(u);
  for (int axis = 0; axis < u.grid.tdim; ++axis) {
    const PhysicalField d = inverse_dft(tangential_derivative(spec, axis));
    total += std::pow(lp_norm_omega(d, p), p);
  }
  return std::pow(total, 1.0 / p);
}

double conjugate_symmetry_defect(const SpectralField& field) {
  field.validate_shape();
  double worst = 0.0;
  const int modes = field.grid.modes(), nlev = field.wall.count();
  for (int m = 0; m < modes; ++m) {
    const int r = field.grid.reflected_mode(m);
    for (int l = 0; l < nlev; ++l)
      for (int c = 0; c < field.components; ++c)
        worst = std::max(worst,
                         std::abs(field.at(r, l, c) - std::conj(field.at(m, l, c))));
  }
  return worst;
}

double conjugate_symmetry_defect(const SpectralBoundary& field) {
  field.validate_shape();
  double worst = 0.0;
  for (int m = 0; m < field.grid.modes(); ++m) {
    const int r = field.grid.reflected_mode(m);
    for (int c = 0; c < field.components; ++c)
      worst = std::max(worst, std::abs(field.at(r, c) - std::conj(field.at(m, c))));
  }
  return worst;
}

SpectralBoundary random_band_limited(const TangentialGrid& grid, int components,
                                     std::uint64_t seed) {
  grid.validate();
  SpectralBoundary out(grid, components);
  GaussianSource src(seed);
  const double band = grid.n / 4.0, width = grid.n / 8.0;
  for (int m = 0; m < grid.modes(); ++m) {
    const int r = grid.reflected_mode(m);
    if (r < m) continue;  // pair already filled from its first member
    const auto k = grid.wavenumbers(m);
    const double kk = std::hypot(double(k[0]), double(k[1]));
    if (kk > band) continue;
    const double env = std::exp(-(kk / width) * (kk / width));
    for (int c = 0; c < components; ++c) {
      if (r == m) {
        out.at(m, c) = env * src.next();  // self-conjugate mode must be real
      } else {
        const Complex z = env * src.next_complex();
        out.at(m, c) = z;
        out.at(r, c) = std::conj(z);
      }
    }
  }
  return out;
}

namespace {

constexpr const char* kConventionTag =
    "forward=unnormalized-sum;inverse=1/n^tdim;layout=mode,level,component;"
    "data=f64le-re-im";

static_assert(std::endian::native == std::endian::little,
              "field dumps are defined little-endian");

}  // namespace

template <Space S>
void dump_field(const Field<S>& field, const std::string& prefix) {
  field.validate_shape();
  nlohmann::json header;
  header["space"] = S == Space::spectral ? "spectral" : "physical";
  header["tdim"] = field.grid.tdim;
  header["n"] = field.grid.n;
  header["box_length"] = field.grid.box_length;
  header["levels"] = field.wall.levels;
  header["components"] = field.components;
  header["convention"] = kConventionTag;
  std::ofstream jh(prefix + ".json");
  jh << header.dump(2) << "\n";
  if (!jh) throw std::runtime_error("dump_field: cannot write " + prefix + ".json");
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  bin.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(Complex)));
  if (!bin) throw std::runtime_error("dump_field: cannot write " + prefix + ".bin");
}

template <Space S>
Field<S> load_field(const std::string& prefix) {
  std::ifstream jh(prefix + ".json");
  if (!jh) throw std::runtime_error("load_field: cannot open " + prefix + ".json");
  nlohmann::json header = nlohmann::json::parse(jh);
  const std::string want = S == Space::spectral ? "spectral" : "physical";
  if (header.at("space").get<std::string>() != want)
    throw std::runtime_error("load_field: space tag mismatch in " + prefix + ".json");
  if (header.at("convention").get<std::string>() != kConventionTag)
    throw std::runtime_error("load_field: unknown convention in " + prefix + ".json");
  TangentialGrid grid{header.at("tdim").get<int>(), header.at("n").get<int>(),
                      header.at("box_length").get<double>()};
  WallGrid wall{header.at("levels").get<std::vector<double>>()};
  Field<S> field(grid, wall, header.at("components").get<int>());
  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("load_field: cannot open " + prefix + ".bin");
  bin.read(reinterpret_cast<char*>(field.values.data()),
           static_cast<std::streamsize>(field.values.size() * sizeof(Complex)));
  if (bin.gcount() != static_cast<std::streamsize>(field.values.size() * sizeof(Complex)))
    throw std::runtime_error("load_field: " + prefix + ".bin is short");
  return field;
}

template void dump_field<Space::spectral>(const SpectralField&, const std::string&);
template void dump_field<Space::physical>(const PhysicalField&, const std::string&);
template SpectralField load_field<Space::spectral>(const std::string&);
template PhysicalField load_field<Space::physical>(const std::string&);

}  // namespace hstokes::fields
