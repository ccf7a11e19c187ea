#ifndef STABKIT_IO_HPP
#define STABKIT_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabkit/certificates.hpp"
#include "stabkit/core.hpp"
#include "stabkit/estimators.hpp"
#include "stabkit/ode.hpp"

namespace stabkit::io {

/// Round-trip decimal text for a double (17 significant digits; inf/nan spelled out).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON value for a double; non-finite values become strings.
inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline nlohmann::json json_vector(const Vector& v) {
  auto a = nlohmann::json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

/// Trajectory table `t,x1..xn,y1..yp[,u]` with one row per stored sample.
inline std::string trajectory_csv(const Trajectory& tr, const std::vector<double>* control = nullptr) {
  std::ostringstream os;
  const std::size_t n = tr.states.front().size(), p = tr.outputs.front().size();
  os << 't';
  for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
  for (std::size_t i = 1; i <= p; ++i) os << ",y" << i;
  if (control) os << ",u";
  os << '\n';
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << format_double(tr.times[k]);
    for (double v : tr.states[k]) os << ',' << format_double(v);
    for (double v : tr.outputs[k]) os << ',' << format_double(v);
    if (control) os << ',' << format_double((*control)[k]);
    os << '\n';
  }
  return os.str();
}

/// Estimate table `abscissa,value` preceded by `# key=value` comment lines.
inline std::string estimate_csv(const StabilityEstimate& e) {
  std::ostringstream os;
  os << "# kind=" << to_string(e.kind) << '\n';
  os << "# seed=" << e.seed << '\n';
  os << "# horizon=" << format_double(e.horizon) << '\n';
  os << "# tail_window=" << format_double(e.tail_window) << '\n';
  os << "# parameter=" << format_double(e.parameter) << '\n';
  if (!e.label.empty()) os << "# label=" << e.label << '\n';
  os << "abscissa,value\n";
  for (std::size_t i = 0; i < e.abscissae.size(); ++i)
    os << format_double(e.abscissae[i]) << ',' << format_double(e.values[i]) << '\n';
  return os.str();
}

inline nlohmann::json report_json(const CertificateReport& r) {
  nlohmann::json j;
  j["certificate"] = r.certificate;
  j["system"] = r.system_id;
  j["verdict"] = r.verdict();
  j["worst_margin"] = json_number(r.worst_margin);
  auto ineqs = nlohmann::json::array();
  for (const auto& s : r.inequalities) {
    nlohmann::json q;
    q["id"] = s.id;
    q["description"] = s.description;
    q["level"] = s.level ? json_number(*s.level) : nlohmann::json(nullptr);
    q["samples"] = s.samples;
    q["premise_held"] = s.premise_held;
    q["violations"] = s.violations;
    q["worst_margin"] = json_number(s.worst_margin);
    q["worst_x"] = json_vector(s.worst_x);
    q["worst_d"] = json_vector(s.worst_d);
    ineqs.push_back(std::move(q));
  }
  j["inequalities"] = std::move(ineqs);
  auto wit = nlohmann::json::array();
  for (const auto& w : r.witnesses) {
    nlohmann::json q;
    q["inequality_id"] = w.inequality_id;
    q["level"] = w.level ? json_number(*w.level) : nlohmann::json(nullptr);
    q["sample_index"] = w.sample_index;
    q["x"] = json_vector(w.x);
    q["d"] = json_vector(w.d);
    q["lhs"] = json_number(w.lhs);
    q["rhs"] = json_number(w.rhs);
    q["strict"] = w.strict;
    wit.push_back(std::move(q));
  }
  j["witnesses"] = std::move(wit);
  auto info = nlohmann::json::object();
  for (const auto& [k, v] : r.info) info[k] = json_number(v);
  j["info"] = std::move(info);
  j["notes"] = r.notes;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// A parsed numeric CSV: header names, rows, and `# key=value` comments.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> comments;

  std::vector<double> column(std::size_t j) const {
    std::vector<double> c;
    for (const auto& r : rows) c.push_back(r[j]);
    return c;
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  if (t == "nan") return NAN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParameterError("not a number: '" + s + "'");
  }
  if (used != t.size()) throw ParameterError("not a number: '" + s + "'");
  return v;
}

inline Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.comments.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line, ',');
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size())
      throw ParameterError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(t.header.size()));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ParameterError("CSV has no header");
  return t;
}

}  // namespace stabkit::io

#endif  // STABKIT_IO_HPP
