#include "fps/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fps {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Json number(double x) {
  // NaN and infinities have no JSON spelling.
  return std::isfinite(x) ? Json(x) : Json(nullptr);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (t.empty() || res.ec != std::errc() || res.ptr != last)
    fail(ErrorKind::InvalidInput, what + ": not a number: '" + t + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    fail(ErrorKind::InvalidInput, what + ": not an integer: '" + t + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  fail(ErrorKind::InvalidInput, what + ": not a boolean: '" + t + "'");
}

Matrix parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split(line, ','))
      row.push_back(parse_double(cell, source + ":" + std::to_string(lineno)));
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorKind::InvalidInput, source + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::InvalidInput, source + ": empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open " + path);
  return parse_matrix_csv(in, path);
}

SymMat read_symmetric_csv(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.rows() != m.cols())
    fail(ErrorKind::InvalidInput, path + ": matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                      ", expected square");
  return SymMat(m);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
  write_matrix_csv(out, m);
}

Json to_json(const SupportSet& s) { return Json(s.indices()); }

Json to_json(const KktReport& r) {
  return Json{{"sign_mismatch", r.sign_mismatch},
              {"dual_bound_violation", r.dual_bound_violation},
              {"fantope_optimality_gap", r.fantope_optimality_gap}};
}

Json to_json(const ConditionReport& r) {
  Json j;
  j["p"] = r.p;
  j["k"] = r.k;
  j["s"] = r.s;
  j["rho"] = number(r.rho);
  j["sps_gap"] = number(r.sps_gap);
  j["sps_support"] = to_json(r.sps_support);
  j["sps_ok"] = r.sps_ok;
  j["lambda1"] = number(r.lambda1);
  j["lcc_lhs"] = number(r.lcc_lhs);
  j["lcc_alpha"] = number(r.lcc_alpha);
  j["w_inf"] = number(r.w_inf);
  j["det_cond1_lhs"] = number(r.det_cond1_lhs);
  j["det_cond1_ok"] = r.det_cond1_ok;
  j["det_cond2_slack"] = number(r.det_cond2_slack);
  j["det_cond2_ok"] = r.det_cond2_ok;
  j["signal_min_leverage"] = number(r.signal_min_leverage);
  j["signal_threshold"] = number(r.signal_threshold);
  j["signal_ok"] = r.signal_ok;
  j["entrywise_min"] = number(r.entrywise_min);
  j["sign_rank_one"] = r.sign_rank_one;
  j["entrywise_min_ok"] = r.entrywise_min_ok;
  j["n"] = r.n;
  j["sigma_scale"] = number(r.sigma_scale);
  j["alpha"] = number(r.alpha);
  j["sample_lhs"] = number(r.sample_lhs);
  j["sample_rhs"] = number(r.sample_rhs);
  j["prob_sample_ok"] = r.prob_sample_ok;
  j["false_positive_control"] = r.false_positive_control;
  j["exact_recovery"] = r.exact_recovery;
  return j;
}

Json to_json(const WitnessReport& r) {
  Json j;
  j["Htilde_support"] = to_json(SupportSet::from_diagonal(r.Htilde.mat(), 1e-10));
  j["Htilde_constraint_residual"] = number(r.Htilde.constraint_residual());
  j["Q_deviation"] = number(r.Q_deviation);
  j["Q_bound"] = number(r.Q_bound);
  j["q_bound_ok"] = r.q_bound_ok;
  j["dual_offsupport_max"] = number(r.dual_offsupport_max);
  j["dual_max"] = number(r.dual_max);
  j["noise_opnorm"] = number(r.noise_opnorm);
  j["signal_gap"] = number(r.signal_gap);
  j["noise_gap_ok"] = r.noise_gap_ok;
  j["witness_gap"] = number(r.witness_gap);
  j["kkt_gap"] = number(r.kkt_gap);
  j["sub_iters"] = r.sub_iters;
  j["witness_valid"] = r.witness_valid;
  return j;
}

Json solution_summary(const FpsSolution& sol) {
  Json j;
  j["p"] = sol.H.dim();
  j["k"] = sol.H.k();
  j["rho"] = number(sol.rho);
  j["tau_en"] = number(sol.tau_en);
  j["converged"] = sol.converged;
  j["iters"] = sol.iters;
  j["objective"] = number(sol.objective);
  j["support"] = to_json(sol.support);
  j["primal_residual"] = number(sol.primal_residual);
  j["dual_residual"] = number(sol.dual_residual);
  j["dual_clip"] = number(sol.dual_clip);
  j["constraint_residual"] = number(sol.H.constraint_residual());
  j["kkt"] = to_json(sol.kkt);
  return j;
}

Json model_json(const ModelInstance& m, const std::string& sigma_path) {
  Json j;
  j["label"] = m.label;
  j["sigma_path"] = sigma_path;
  j["p"] = m.sigma.dim();
  j["k"] = m.k;
  j["J"] = to_json(m.support);
  j["gap"] = number(m.gap);
  std::vector<double> ev(m.eigenvalues.data(), m.eigenvalues.data() + m.eigenvalues.size());
  j["eigenvalues"] = ev;
  return j;
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::InvalidInput, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") !=
                           std::string::npos)
      fail(ErrorKind::InvalidInput, where + ": bad key '" + key + "'");
    if (cfg.has(key)) fail(ErrorKind::InvalidInput, where + ": duplicate key '" + key + "'");
    std::vector<std::string> values = split(trim(line.substr(eq + 1)), ',');
    for (const std::string& v : values)
      if (v.empty()) fail(ErrorKind::InvalidInput, where + ": empty value for '" + key + "'");
    if (values.empty()) fail(ErrorKind::InvalidInput, where + ": missing value for '" + key + "'");
    cfg.entries_[key] = std::move(values);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open config " + path);
  return parse(in, path);
}

const std::vector<std::string>& KeyValueConfig::list(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorKind::InvalidInput, "config: missing key '" + key + "'");
  return it->second;
}

const std::string& KeyValueConfig::scalar(const std::string& key) const {
  const auto& v = list(key);
  if (v.size() != 1) fail(ErrorKind::InvalidInput, "config: '" + key + "' expects a single value");
  return v.front();
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

}  // namespace fps
