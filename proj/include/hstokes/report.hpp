#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hstokes/certify.hpp"
#include "hstokes/solver.hpp"
#include "hstokes/sweep.hpp"

// Machine-readable run reports. The JSON emitter is deliberately bespoke:
// reports pin their floating-point formatting (17 significant digits, NaN
// and infinities as null) so identical runs serialize byte-identically;
// shortest-roundtrip formatters do not give that guarantee across values.
namespace hstokes::report {

class JsonValue {
 public:
  JsonValue() : kind_(Kind::null) {}
  JsonValue(bool b) : kind_(Kind::boolean), bool_(b) {}
  JsonValue(double v) : kind_(Kind::number), number_(v) {}
  JsonValue(int v) : kind_(Kind::integer), integer_(v) {}
  JsonValue(long v) : kind_(Kind::integer), integer_(v) {}
  JsonValue(long long v) : kind_(Kind::integer), integer_(v) {}
  JsonValue(unsigned v) : kind_(Kind::integer), integer_(v) {}
  JsonValue(unsigned long v) : kind_(Kind::integer), integer_(static_cast<long long>(v)) {}
  JsonValue(unsigned long long v) : kind_(Kind::integer), integer_(static_cast<long long>(v)) {}
  JsonValue(const char* s) : kind_(Kind::string), string_(s) {}
  JsonValue(std::string s) : kind_(Kind::string), string_(std::move(s)) {}

  static JsonValue object();
  static JsonValue array();

  // Object member access: inserts a null member at the end on first use.
  // The value must be an object (or fresh null, which becomes one).
  JsonValue& operator[](const std::string& key);
  // Array append; the value must be an array (or fresh null).
  void push_back(JsonValue v);

  bool is_object() const { return kind_ == Kind::object; }
  bool is_array() const { return kind_ == Kind::array; }
  bool is_null() const { return kind_ == Kind::null; }
  std::size_t size() const;

  // Serialize with the pinned numeric policy; indent 0 gives one line.
  std::string dump(int indent = 2) const;

 private:
  enum class Kind { null, boolean, integer, number, string, array, object };
  void write(std::string& out, int indent, int depth) const;

  Kind kind_;
  bool bool_ = false;
  long long integer_ = 0;
  double number_ = 0.0;
  std::string string_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> members_;
};

// 17-significant-digit form used for every floating-point field in reports
// and tables; NaN and infinities become "null".
std::string format_double(double v);

// Rectangular CSV table with a fixed header; numeric cells share the JSON
// formatting policy.
class CsvWriter {
 public:
  using Cell = std::variant<long long, double, std::string>;

  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<Cell>& cells);  // throws on width mismatch
  std::string text() const;
  void write(const std::string& path) const;  // throws std::runtime_error
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

JsonValue to_json(Complex z);
JsonValue to_json(const solver::ResidualRecord& r);
JsonValue to_json(const solver::InteriorResidual& r);
JsonValue to_json(const solver::BoundaryResidual& r);
JsonValue to_json(const solver::BiharmonicRecord& r);
JsonValue to_json(const solver::WeakFormRecord& r);
JsonValue to_json(const certify::GridArgmax& a);
JsonValue to_json(const certify::MultiplierCertificate& c);
JsonValue to_json(const certify::RealPartReport& r);
JsonValue to_json(const certify::EBoundReport& r);
JsonValue to_json(const sweep::DecaySample& s);
JsonValue to_json(const sweep::DecayReport& r);
JsonValue to_json(const sweep::AlphaUniformityReport& r);
JsonValue to_json(const sweep::RatioSample& s);
JsonValue to_json(const sweep::RatioReport& r);

// CSV tables with the documented sample columns.
CsvWriter decay_table(std::span<const sweep::DecayReport> reports);
CsvWriter certificate_table(std::span<const certify::MultiplierCertificate> certs);
CsvWriter ratio_table(std::span<const sweep::RatioReport> reports);

}  // namespace hstokes::report
