#include "dynid/samples.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "dynid/errors.hpp"

namespace dynid {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> expected_header(int n) {
  std::vector<std::string> cols{"t"};
  for (const char* prefix : {"q", "qd", "v"}) {
    for (int j = 1; j <= n; ++j) cols.push_back(prefix + std::to_string(j));
  }
  cols.push_back("scenario");
  return cols;
}

bool is_indexed(const std::string& token, const std::string& prefix) {
  if (token.size() <= prefix.size() || token.compare(0, prefix.size(), prefix) != 0) {
    return false;
  }
  for (std::size_t i = prefix.size(); i < token.size(); ++i) {
    if (token[i] < '0' || token[i] > '9') return false;
  }
  return true;
}

void append_double(std::string& out, double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

}  // namespace

char scenario_tag(Scenario s) { return s == Scenario::kPayload ? 'b' : 'a'; }

Scenario parse_scenario(const std::string& tag) {
  if (tag == "a") return Scenario::kNoPayload;
  if (tag == "b") return Scenario::kPayload;
  throw schema_error("unknown scenario tag '" + tag + "' (expected a or b)");
}

JointState SampleSet::state(int k) const {
  return JointState{q.row(k).transpose(), qd.row(k).transpose(),
                    qdd.row(k).transpose()};
}

double SampleSet::period() const {
  if (t.size() < 2) throw schema_error("need at least 2 samples for a period");
  return (t[t.size() - 1] - t[0]) / static_cast<double>(t.size() - 1);
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> linear_region_mask(
    const SampleSet& set, double threshold) {
  return set.qd.array().abs() > threshold;
}

void check_uniform(const VectorXd& t) {
  if (t.size() < 2) throw schema_error("need at least 2 samples");
  const double period = (t[t.size() - 1] - t[0]) / static_cast<double>(t.size() - 1);
  if (!(period > 0.0)) throw schema_error("timestamps are not increasing");
  for (Eigen::Index k = 1; k < t.size(); ++k) {
    if (std::fabs((t[k] - t[k - 1]) - period) > 1e-9) {
      throw schema_error("non-uniform timestamps at sample " + std::to_string(k));
    }
  }
}

MatrixXd differentiate(const MatrixXd& qd, double period) {
  if (qd.rows() < 2) throw schema_error("differentiation needs at least 2 samples");
  if (!(period > 0.0)) throw usage_error("sampling period must be positive");
  MatrixXd qdd(qd.rows(), qd.cols());
  for (Eigen::Index k = 1; k < qd.rows(); ++k) {
    qdd.row(k) = (qd.row(k) - qd.row(k - 1)) / period;
  }
  qdd.row(0) = qdd.row(1);
  return qdd;
}

MatrixXd differentiate(const MatrixXd& qd, const VectorXd& t) {
  check_uniform(t);
  if (t.size() != qd.rows()) throw schema_error("time and velocity lengths differ");
  return differentiate(qd, (t[t.size() - 1] - t[0]) / static_cast<double>(t.size() - 1));
}

std::string format_double(double x) {
  std::string s;
  append_double(s, x);
  return s;
}

double parse_double(const std::string& text, const std::string& context) {
  std::size_t b = 0, e = text.size();
  while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
  while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
  double value = 0.0;
  const char* first = text.data() + b;
  const char* last = text.data() + e;
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || first == last) {
    throw schema_error("unparsable number '" + text + "' in " + context);
  }
  if (std::isnan(value)) throw schema_error("NaN field in " + context);
  if (!std::isfinite(value)) throw schema_error("non-finite field in " + context);
  return value;
}

std::string format_samples(const SampleSet& set) {
  const int n = set.dof();
  std::string out;
  const auto header = expected_header(n);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  const char tag = scenario_tag(set.scenario);
  for (int k = 0; k < set.size(); ++k) {
    append_double(out, set.t[k]);
    for (const MatrixXd* m : {&set.q, &set.qd, &set.v}) {
      for (int j = 0; j < n; ++j) {
        out += ',';
        append_double(out, (*m)(k, j));
      }
    }
    out += ',';
    out += tag;
    out += '\n';
  }
  return out;
}

void write_samples(const std::string& path, const SampleSet& set) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open '" + path + "' for writing");
  f << format_samples(set);
  if (!f) throw usage_error("failed writing '" + path + "'");
}

SampleSet parse_samples(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw schema_error(origin + ": empty sample file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto tokens = split(line, ',');
  if (tokens.empty() || tokens.front() != "t") {
    throw schema_error(origin + ": malformed header, first column must be 't'");
  }
  int n = 0;
  for (const auto& tok : tokens) {
    if (is_indexed(tok, "q") || is_indexed(tok, "qd") || is_indexed(tok, "v")) {
      if (is_indexed(tok, "q")) {
        n = std::max(n, std::stoi(tok.substr(1)));
      } else if (is_indexed(tok, "qd")) {
        n = std::max(n, std::stoi(tok.substr(2)));
      } else {
        n = std::max(n, std::stoi(tok.substr(1)));
      }
    }
  }
  if (n == 0) throw schema_error(origin + ": malformed header, no joint columns");
  const auto expected = expected_header(n);
  for (const auto& name : expected) {
    if (std::find(tokens.begin(), tokens.end(), name) == tokens.end()) {
      throw schema_error(origin + ": missing column '" + name + "'");
    }
  }
  if (tokens != expected) {
    throw schema_error(origin + ": malformed header, expected t,q1..q" +
                       std::to_string(n) + ",qd1..,v1..,scenario in order");
  }

  std::vector<std::vector<double>> rows;
  std::string tag;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != expected.size()) {
      throw schema_error(origin + ": ragged row at line " + std::to_string(line_no) +
                         ", expected " + std::to_string(expected.size()) +
                         " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> values(expected.size() - 1);
    for (std::size_t c = 0; c + 1 < fields.size(); ++c) {
      values[c] = parse_double(fields[c], origin + " line " + std::to_string(line_no) +
                                              " column '" + expected[c] + "'");
    }
    if (tag.empty()) {
      tag = fields.back();
    } else if (fields.back() != tag) {
      throw schema_error(origin + ": mixed scenario tags at line " + std::to_string(line_no));
    }
    rows.push_back(std::move(values));
  }
  if (rows.size() < 2) throw schema_error(origin + ": need at least 2 samples");

  SampleSet set;
  const auto m = static_cast<Eigen::Index>(rows.size());
  set.t.resize(m);
  set.q.resize(m, n);
  set.qd.resize(m, n);
  set.v.resize(m, n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& r = rows[static_cast<std::size_t>(k)];
    set.t[k] = r[0];
    for (int j = 0; j < n; ++j) {
      set.q(k, j) = r[static_cast<std::size_t>(1 + j)];
      set.qd(k, j) = r[static_cast<std::size_t>(1 + n + j)];
      set.v(k, j) = r[static_cast<std::size_t>(1 + 2 * n + j)];
    }
  }
  set.scenario = parse_scenario(tag);
  set.qdd = differentiate(set.qd, set.t);
  return set;
}

SampleSet read_samples(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open sample file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_samples(buf.str(), path);
}

SampleSet slice(const SampleSet& set, int first, int count) {
  if (first < 0 || count < 0 || first + count > set.size()) {
    throw usage_error("sample slice out of range");
  }
  SampleSet out;
  out.t = set.t.segment(first, count);
  out.q = set.q.middleRows(first, count);
  out.qd = set.qd.middleRows(first, count);
  out.qdd = set.qdd.middleRows(first, count);
  out.v = set.v.middleRows(first, count);
  out.scenario = set.scenario;
  out.source = set.source;
  return out;
}

}  // namespace dynid
