#include "roughcadlag/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "roughcadlag/errors.hpp"

namespace roughcadlag {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, const std::string& field) {
  if (text.empty()) throw SchemaError(field, "empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE)
    throw SchemaError(field, "not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void write_path_csv(std::ostream& out, const CadlagPath& path) {
  out << 't';
  for (std::size_t k = 0; k < path.dim(); ++k) out << ",x" << (k + 1);
  out << '\n';
  auto write_row = [&](double t, std::size_t i) {
    out << format_double(t);
    const auto row = path.row(i);
    for (Eigen::Index k = 0; k < row.size(); ++k) out << ',' << format_double(row(k));
    out << '\n';
  };
  for (std::size_t i = 0; i < path.size(); ++i) write_row(path.time(i), i);
  if (path.time(path.size() - 1) < path.horizon()) write_row(path.horizon(), path.size() - 1);
}

CadlagPath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("header", "missing");
  strip_cr(line);
  const std::vector<std::string> header = split(line);
  if (header.size() < 2 || header[0] != "t") throw SchemaError("header", "expected t,x1,...,xd");
  for (std::size_t k = 1; k < header.size(); ++k)
    if (header[k] != "x" + std::to_string(k))
      throw SchemaError("header", "column " + std::to_string(k + 1) + " should be x" +
                                      std::to_string(k));
  const std::size_t d = header.size() - 1;

  std::vector<double> times;
  std::vector<double> flat;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> cells = split(line);
    const std::string where = "row " + std::to_string(row);
    if (cells.size() != d + 1) throw SchemaError(where, "expected " + std::to_string(d + 1) + " columns");
    times.push_back(parse_double(cells[0], where + " t"));
    for (std::size_t k = 1; k <= d; ++k)
      flat.push_back(parse_double(cells[k], where + " x" + std::to_string(k)));
  }
  if (times.empty()) throw SchemaError("rows", "no samples");
  RowMatrix values = Eigen::Map<RowMatrix>(flat.data(), static_cast<Eigen::Index>(times.size()),
                                           static_cast<Eigen::Index>(d));
  const double horizon = times.back();
  return {std::move(times), std::move(values), horizon};
}

void save_path_csv(const std::filesystem::path& file, const CadlagPath& path) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DomainError("cannot open " + file.string() + " for writing");
  write_path_csv(out, path);
  if (!out) throw DomainError("failed writing " + file.string());
}

CadlagPath load_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DomainError("cannot open " + file.string());
  return read_path_csv(in);
}

// --- JSON ---

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

const nlohmann::json& field(const nlohmann::json& j, const std::string& name,
                            const std::string& path) {
  if (!j.is_object() || !j.contains(name)) throw SchemaError(path + name, "missing");
  return j.at(name);
}

double number(const nlohmann::json& j, const std::string& name) {
  if (!j.is_number()) throw SchemaError(name, "expected a number");
  return j.get<double>();
}

Matrix matrix_from_json(const nlohmann::json& j, std::size_t d, const std::string& name) {
  if (!j.is_array() || j.size() != d) throw SchemaError(name, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    if (!j[r].is_array() || j[r].size() != d) throw SchemaError(name, "ragged matrix");
    for (std::size_t c = 0; c < d; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number(j[r][c], name + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

}  // namespace

nlohmann::json to_json(const RoughLift& lift) {
  const CadlagPath& x = lift.path();
  nlohmann::json j;
  j["p"] = lift.p();
  j["T"] = x.horizon();
  j["times"] = std::vector<double>(x.times().begin(), x.times().end());
  nlohmann::json xs = nlohmann::json::array();
  nlohmann::json is = nlohmann::json::array();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vector v = x.value(i);
    xs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    is.push_back(matrix_json(lift.integral().at(i)));
  }
  j["X"] = std::move(xs);
  j["I"] = std::move(is);

  const LiftMeta& m = lift.meta();
  nlohmann::json meta;
  meta["method"] = m.method;
  meta["level"] = m.level;
  meta["gap"] = m.gap;
  meta["tol"] = m.tol;
  meta["stabilized"] = m.stabilized;
  meta["geometric_diagonal"] = m.geometric_diagonal;
  if (m.cross_terms) {
    meta["cross_terms"] = {{"xx", matrix_json(m.cross_terms->xx)},
                           {"xy", matrix_json(m.cross_terms->xy)},
                           {"yx", matrix_json(m.cross_terms->yx)},
                           {"yy", matrix_json(m.cross_terms->yy)}};
  }
  if (!m.source.empty()) meta["source"] = m.source;
  j["meta"] = std::move(meta);
  return j;
}

RoughLift lift_from_json(const nlohmann::json& j) {
  const double p = number(field(j, "p", ""), "p");
  const nlohmann::json& times_j = field(j, "times", "");
  const nlohmann::json& xs = field(j, "X", "");
  const nlohmann::json& is = field(j, "I", "");
  const nlohmann::json& meta_j = field(j, "meta", "");
  if (!times_j.is_array() || times_j.empty()) throw SchemaError("times", "expected a non-empty array");
  const std::size_t n = times_j.size();
  if (!xs.is_array() || xs.size() != n) throw SchemaError("X", "length differs from times");
  if (!is.is_array() || is.size() != n) throw SchemaError("I", "length differs from times");
  if (!xs[0].is_array() || xs[0].empty()) throw SchemaError("X[0]", "expected a non-empty array");
  const std::size_t d = xs[0].size();

  std::vector<double> times(n);
  RowMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<Matrix> integral;
  integral.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string at = "[" + std::to_string(i) + "]";
    times[i] = number(times_j[i], "times" + at);
    if (!xs[i].is_array() || xs[i].size() != d) throw SchemaError("X" + at, "dimension mismatch");
    for (std::size_t k = 0; k < d; ++k)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          number(xs[i][k], "X" + at + "[" + std::to_string(k) + "]");
    integral.push_back(matrix_from_json(is[i], d, "I" + at));
  }
  const double horizon = j.contains("T") ? number(j.at("T"), "T") : times.back();

  LiftMeta meta;
  const nlohmann::json& method = field(meta_j, "method", "meta.");
  if (!method.is_string()) throw SchemaError("meta.method", "expected a string");
  meta.method = method.get<std::string>();
  const nlohmann::json& level = field(meta_j, "level", "meta.");
  if (!level.is_number_integer()) throw SchemaError("meta.level", "expected an integer");
  meta.level = level.get<int>();
  meta.gap = number(field(meta_j, "gap", "meta."), "meta.gap");
  meta.tol = number(field(meta_j, "tol", "meta."), "meta.tol");
  if (meta_j.contains("stabilized")) {
    if (!meta_j["stabilized"].is_boolean()) throw SchemaError("meta.stabilized", "expected a boolean");
    meta.stabilized = meta_j["stabilized"].get<bool>();
  }
  if (meta_j.contains("geometric_diagonal")) {
    if (!meta_j["geometric_diagonal"].is_boolean())
      throw SchemaError("meta.geometric_diagonal", "expected a boolean");
    meta.geometric_diagonal = meta_j["geometric_diagonal"].get<bool>();
  }
  if (meta_j.contains("cross_terms")) {
    const nlohmann::json& c = meta_j["cross_terms"];
    meta.cross_terms = CrossTerms{
        matrix_from_json(field(c, "xx", "meta.cross_terms."), d, "meta.cross_terms.xx"),
        matrix_from_json(field(c, "xy", "meta.cross_terms."), d, "meta.cross_terms.xy"),
        matrix_from_json(field(c, "yx", "meta.cross_terms."), d, "meta.cross_terms.yx"),
        matrix_from_json(field(c, "yy", "meta.cross_terms."), d, "meta.cross_terms.yy")};
  }
  if (meta_j.contains("source")) {
    const nlohmann::json& s = meta_j["source"];
    if (!s.is_object()) throw SchemaError("meta.source", "expected an object");
    for (const auto& [k, v] : s.items()) {
      if (!v.is_string()) throw SchemaError("meta.source." + k, "expected a string");
      meta.source[k] = v.get<std::string>();
    }
  }

  try {
    CadlagPath path(times, std::move(values), horizon);
    MatrixPath integral_path(std::move(times), integral, horizon);
    return RoughLift(std::move(path), std::move(integral_path), p, std::move(meta));
  } catch (const DomainError& e) {
    throw SchemaError("lift", e.what());
  }
}

nlohmann::json to_json(const VariationResult& result) {
  return {{"p", result.p},
          {"value", result.value},
          {"raw_sup", result.raw_sup},
          {"partition", result.partition}};
}

nlohmann::json to_json(const RateFit& fit) {
  return {{"levels", fit.levels},       {"errors", fit.errors},
          {"slope", fit.slope},         {"intercept", fit.intercept},
          {"r2", fit.r_squared},        {"excluded", fit.excluded}};
}

nlohmann::json to_json(const TimeChange& change) {
  nlohmann::json values = nlohmann::json::array();
  for (const Vector& v : change.g_values)
    values.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return {{"p", change.p},
          {"phi", change.phi},
          {"g_times", change.g_times},
          {"g_values", std::move(values)},
          {"max_holder_ratio", change.max_holder_ratio}};
}

nlohmann::json load_json(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DomainError("cannot open " + file.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(file.string(), e.what());
  }
}

void save_json(const std::filesystem::path& file, const nlohmann::json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DomainError("cannot open " + file.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DomainError("failed writing " + file.string());
}

}  // namespace roughcadlag
