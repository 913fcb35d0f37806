#pragma once

#include "fps/common.hpp"
#include "fps/diagnostics.hpp"
#include "fps/models.hpp"
#include "fps/solver.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace fps {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

/// Dense matrix as CSV: one row per line, comma-separated, no header.
Matrix parse_matrix_csv(std::istream& in, const std::string& source = "<stream>");
Matrix read_matrix_csv(const std::string& path);
/// Reads a square CSV matrix; non-square input is InvalidInput.
SymMat read_symmetric_csv(const std::string& path);
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);

Json to_json(const SupportSet& s);
Json to_json(const KktReport& r);
Json to_json(const ConditionReport& r);
Json to_json(const WitnessReport& r);
Json solution_summary(const FpsSolution& sol);
Json model_json(const ModelInstance& m, const std::string& sigma_path);

/// Flat key/value text:
///   # comment to end of line
///   key = value
///   key = v1, v2, v3
/// Keys are [A-Za-z0-9_]+, each key appears once, values are trimmed.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<stream>");
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::vector<std::string>& list(const std::string& key) const;
  const std::string& scalar(const std::string& key) const;
  std::vector<std::string> keys() const;

  void set(const std::string& key, std::vector<std::string> values) { entries_[key] = std::move(values); }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);

}  // namespace fps
