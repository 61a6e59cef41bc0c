#include "hstokes/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hstokes::report {

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

void newline_indent(std::string& out, int indent, int depth) {
  if (indent <= 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent) * depth, ' ');
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

JsonValue JsonValue::object() {
  JsonValue v;
  v.kind_ = Kind::object;
  return v;
}

JsonValue JsonValue::array() {
  JsonValue v;
  v.kind_ = Kind::array;
  return v;
}

JsonValue& JsonValue::operator[](const std::string& key) {
  if (kind_ == Kind::null) kind_ = Kind::object;
  if (kind_ != Kind::object)
    throw std::logic_error("JsonValue: member access on a non-object");
  for (auto& [k, v] : members_)
    if (k == key) return v;
  members_.emplace_back(key, JsonValue());
  return members_.back().second;
}

void JsonValue::push_back(JsonValue v) {
  if (kind_ == Kind::null) kind_ = Kind::array;
  if (kind_ != Kind::array)
    throw std::logic_error("JsonValue: push_back on a non-array");
  items_.push_back(std::move(v));
}

std::size_t JsonValue::size() const {
  if (kind_ == Kind::object) return members_.size();
  if (kind_ == Kind::array) return items_.size();
  return 0;
}

void JsonValue::write(std::string& out, int indent, int depth) const {
  switch (kind_) {
    case Kind::null: out += "null"; break;
    case Kind::boolean: out += bool_ ? "true" : "false"; break;
    case Kind::integer: out += std::to_string(integer_); break;
    case Kind::number: out += format_double(number_); break;
    case Kind::string: escape_into(out, string_); break;
    case Kind::array: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      out += '[';
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ',';
        newline_indent(out, indent, depth + 1);
        items_[i].write(out, indent, depth + 1);
      }
      newline_indent(out, indent, depth);
      out += ']';
      break;
    }
    case Kind::object: {
      if (members_.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i) out += ',';
        newline_indent(out, indent, depth + 1);
        escape_into(out, members_[i].first);
        out += indent > 0 ? ": " : ":";
        members_[i].second.write(out, indent, depth + 1);
      }
      newline_indent(out, indent, depth);
      out += '}';
      break;
    }
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CsvWriter: empty header");
}

void CsvWriter::add_row(const std::vector<Cell>& cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CsvWriter: row width " + std::to_string(cells.size()) +
                                " does not match header width " +
                                std::to_string(header_.size()));
  rows_.push_back(cells);
}

namespace {

void csv_field(std::string& out, const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out += s;
    return;
  }
  out += '"';
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

std::string CsvWriter::text() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    csv_field(out, header_[i]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const auto* n = std::get_if<long long>(&row[i]))
        out += std::to_string(*n);
      else if (const auto* d = std::get_if<double>(&row[i]))
        out += format_double(*d);
      else
        csv_field(out, std::get<std::string>(row[i]));
    }
    out += '\n';
  }
  return out;
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot open for writing: " + path);
  const std::string body = text();
  stream.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!stream) throw std::runtime_error("write failed: " + path);
}

JsonValue to_json(Complex z) {
  JsonValue v = JsonValue::object();
  v["re"] = z.real();
  v["im"] = z.imag();
  return v;
}

JsonValue to_json(const solver::ResidualRecord& r) {
  JsonValue v = JsonValue::object();
  v["max_abs"] = r.max_abs;
  v["l2_abs"] = r.l2_abs;
  v["max_rel"] = r.max_rel;
  v["l2_rel"] = r.l2_rel;
  return v;
}

JsonValue to_json(const solver::InteriorResidual& r) {
  JsonValue v = JsonValue::object();
  v["momentum"] = to_json(r.momentum);
  v["divergence"] = to_json(r.divergence);
  return v;
}

JsonValue to_json(const solver::BoundaryResidual& r) {
  JsonValue v = JsonValue::object();
  v["dynamic"] = to_json(r.dynamic);
  v["normal_trace"] = to_json(r.normal_trace);
  return v;
}

JsonValue to_json(const solver::BiharmonicRecord& r) {
  JsonValue v = JsonValue::object();
  v["interior"] = to_json(r.interior);
  v["boundary_row"] = to_json(r.boundary_row);
  return v;
}

JsonValue to_json(const solver::WeakFormRecord& r) {
  JsonValue v = JsonValue::object();
  v["defect"] = to_json(r.defect);
  v["volume_term"] = to_json(r.volume_term);
  v["gradient_term"] = to_json(r.gradient_term);
  v["boundary_term"] = to_json(r.boundary_term);
  v["data_term"] = to_json(r.data_term);
  v["scale"] = r.scale;
  v["rel"] = r.rel();
  return v;
}

JsonValue to_json(const certify::GridArgmax& a) {
  JsonValue v = JsonValue::object();
  v["s"] = a.s;
  v["y"] = a.y;
  v["lambda"] = to_json(a.lambda);
  return v;
}

JsonValue to_json(const certify::MultiplierCertificate& c) {
  JsonValue v = JsonValue::object();
  v["symbol"] = c.symbol;
  v["k"] = c.k;
  v["delta"] = c.delta;
  v["uniform_lambda"] = c.uniform_lambda;
  if (!c.uniform_lambda) v["fixed_lambda"] = to_json(c.fixed_lambda);
  v["alpha"] = c.alpha;
  v["empirical_sup"] = c.empirical_sup;
  v["argmax"] = to_json(c.argmax);
  v["refinement_drift"] = c.refinement_drift;
  v["derivative_breakdowns"] = c.derivative_breakdowns;
  v["grid_note"] = c.grid_note;
  return v;
}

JsonValue to_json(const certify::RealPartReport& r) {
  JsonValue v = JsonValue::object();
  v["points"] = r.points;
  v["real_part_violations"] = r.real_part_violations;
  v["worst_real_deficit"] = r.worst_real_deficit;
  v["worst_real"] = to_json(r.worst_real);
  v["modulus_violations"] = r.modulus_violations;
  v["worst_modulus_deficit"] = r.worst_modulus_deficit;
  v["worst_modulus"] = to_json(r.worst_modulus);
  v["empirical_c"] = r.empirical_c;
  v["argmin_c"] = to_json(r.argmin_c);
  return v;
}

JsonValue to_json(const certify::EBoundReport& r) {
  JsonValue v = JsonValue::object();
  v["points"] = r.points;
  v["sqrt_bound_violations"] = r.sqrt_bound_violations;
  v["worst_excess"] = r.worst_excess;
  v["worst_ratio"] = r.worst_ratio;
  v["worst"] = to_json(r.worst);
  v["exponential_rate"] = r.exponential_rate;
  v["argmin_rate"] = to_json(r.argmin_rate);
  return v;
}

JsonValue to_json(const sweep::DecaySample& s) {
  JsonValue v = JsonValue::object();
  v["modulus"] = s.modulus;
  v["angle"] = s.angle;
  v["alpha"] = s.alpha;
  v["p"] = s.p;
  v["norm_omega"] = s.norm_omega;
  v["norm_gamma"] = s.norm_gamma;
  v["phi_norm"] = s.phi_norm;
  v["constant"] = s.constant();
  return v;
}

JsonValue to_json(const sweep::DecayReport& r) {
  JsonValue v = JsonValue::object();
  v["dim"] = r.dim;
  v["p"] = r.p;
  v["alpha"] = r.alpha;
  v["seed"] = r.seed;
  v["fitted_slope"] = r.fitted_slope;
  v["fit_intercept"] = r.fit_intercept;
  v["fit_residual"] = r.fit_residual;
  v["max_constant"] = r.max_constant;
  v["min_constant"] = r.min_constant;
  v["wall_refinement_shift"] = r.wall_refinement_shift;
  v["under_resolved"] = r.under_resolved;
  v["degenerate"] = r.degenerate;
  JsonValue samples = JsonValue::array();
  for (const auto& s : r.samples) samples.push_back(to_json(s));
  v["samples"] = std::move(samples);
  return v;
}

JsonValue to_json(const sweep::AlphaUniformityReport& r) {
  JsonValue v = JsonValue::object();
  v["dim"] = r.dim;
  v["p"] = r.p;
  v["seed"] = r.seed;
  JsonValue alphas = JsonValue::array();
  for (double a : r.alphas) alphas.push_back(a);
  v["alphas"] = std::move(alphas);
  v["max_constant"] = r.max_constant;
  v["min_constant"] = r.min_constant;
  v["spread"] = r.spread;
  JsonValue per = JsonValue::array();
  for (const auto& rep : r.per_alpha) per.push_back(to_json(rep));
  v["per_alpha"] = std::move(per);
  return v;
}

JsonValue to_json(const sweep::RatioSample& s) {
  JsonValue v = JsonValue::object();
  v["seed"] = s.seed;
  v["band"] = s.band;
  v["phi_norm"] = s.phi_norm;
  v["ratio"] = s.ratio;
  v["degenerate"] = s.degenerate;
  return v;
}

JsonValue to_json(const sweep::RatioReport& r) {
  JsonValue v = JsonValue::object();
  v["dim"] = r.dim;
  v["p"] = r.p;
  v["lambda"] = to_json(r.lambda);
  v["alpha"] = r.alpha;
  v["min_ratio"] = r.min_ratio;
  v["max_ratio"] = r.max_ratio;
  v["spread"] = r.spread;
  v["refinement_shift"] = r.refinement_shift;
  v["degenerate"] = r.degenerate;
  JsonValue samples = JsonValue::array();
  for (const auto& s : r.samples) samples.push_back(to_json(s));
  v["samples"] = std::move(samples);
  return v;
}

CsvWriter decay_table(std::span<const sweep::DecayReport> reports) {
  CsvWriter csv({"modulus", "angle", "alpha", "p", "norm_omega", "norm_gamma", "phi_norm"});
  for (const auto& report : reports)
    for (const auto& s : report.samples)
      csv.add_row({s.modulus, s.angle, s.alpha, s.p, s.norm_omega, s.norm_gamma, s.phi_norm});
  return csv;
}

CsvWriter certificate_table(std::span<const certify::MultiplierCertificate> certs) {
  CsvWriter csv({"symbol", "k", "delta", "uniform_lambda", "lambda_re", "lambda_im", "alpha",
                 "empirical_sup", "argmax_s", "argmax_y", "argmax_lambda_re", "argmax_lambda_im",
                 "refinement_drift", "derivative_breakdowns"});
  for (const auto& c : certs)
    csv.add_row({c.symbol, static_cast<long long>(c.k), c.delta,
                 static_cast<long long>(c.uniform_lambda ? 1 : 0), c.fixed_lambda.real(),
                 c.fixed_lambda.imag(), c.alpha, c.empirical_sup, c.argmax.s, c.argmax.y,
                 c.argmax.lambda.real(), c.argmax.lambda.imag(), c.refinement_drift,
                 static_cast<long long>(c.derivative_breakdowns)});
  return csv;
}

CsvWriter ratio_table(std::span<const sweep::RatioReport> reports) {
  CsvWriter csv({"p", "band", "seed", "phi_norm", "ratio"});
  for (const auto& report : reports)
    for (const auto& s : report.samples)
      csv.add_row({report.p, static_cast<long long>(s.band), static_cast<long long>(s.seed),
                   s.phi_norm, s.ratio});
  return csv;
}

}  // namespace hstokes::report
