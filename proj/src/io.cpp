#include "advlin/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace advlin {
namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  return in;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Parses separator-delimited numbers; false if any token is not a number.
bool parse_numbers(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::string token;
  std::string cleaned = line;
  for (char& c : cleaned)
    if (c == ',' || c == ';' || c == '\t') c = ' ';
  std::istringstream words(cleaned);
  while (words >> token) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) return false;
    out.push_back(v);
  }
  return true;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Dataset read_dataset_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> values;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!parse_numbers(line, values)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw ConfigError("data file: non-numeric value on line " + std::to_string(line_no));
    }
    first = false;
    if (!rows.empty() && values.size() != rows.front().size())
      throw ConfigError("data file: inconsistent column count on line " + std::to_string(line_no));
    rows.push_back(values);
  }
  if (rows.empty()) throw ConfigError("data file: no rows");
  if (rows.front().size() < 2) throw ConfigError("data file: need y and at least one x column");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.front().size()) - 1;
  Matrix x(n, p);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    y(i) = r[0];
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = r[static_cast<std::size_t>(j + 1)];
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset read_dataset_csv(const std::string& path) {
  auto in = open_input(path);
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << 'y';
  for (Eigen::Index j = 0; j < data.p(); ++j) out << ",x" << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y()(i));
    for (Eigen::Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.x()(i, j));
    out << '\n';
  }
}

ModelSpec read_model(std::istream& in) {
  std::vector<double> theta0;
  std::vector<std::vector<double>> sigma_rows;
  double noise_var = 0.0;
  bool have_theta0 = false;
  std::string line;
  std::vector<double> values;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model file: expected key = value on line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    if (!parse_numbers(line.substr(eq + 1), values) || values.empty())
      throw ConfigError("model file: bad numbers on line " + std::to_string(line_no));
    if (key == "theta0") {
      theta0 = values;
      have_theta0 = true;
    } else if (key == "sigma") {
      sigma_rows.push_back(values);
    } else if (key == "noise_var") {
      if (values.size() != 1) throw ConfigError("model file: noise_var takes one value");
      noise_var = values[0];
    } else {
      throw ConfigError("model file: unknown key '" + key + "'");
    }
  }
  if (!have_theta0) throw ConfigError("model file: missing theta0");
  const auto p = static_cast<Eigen::Index>(theta0.size());
  if (static_cast<Eigen::Index>(sigma_rows.size()) != p) throw ConfigError("model file: sigma must have p rows");
  Matrix sigma(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const auto& r = sigma_rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(r.size()) != p) throw ConfigError("model file: sigma row has wrong length");
    for (Eigen::Index j = 0; j < p; ++j) sigma(i, j) = r[static_cast<std::size_t>(j)];
  }
  return ModelSpec(Eigen::Map<const Vector>(theta0.data(), p), std::move(sigma), noise_var);
}

ModelSpec read_model(const std::string& path) {
  auto in = open_input(path);
  return read_model(in);
}

void write_model(std::ostream& out, const ModelSpec& model) {
  out << "noise_var = " << format_double(model.noise_var()) << '\n';
  out << "theta0 =";
  for (Eigen::Index i = 0; i < model.dim(); ++i) out << ' ' << format_double(model.theta0()(i));
  out << '\n';
  for (Eigen::Index i = 0; i < model.dim(); ++i) {
    out << "sigma =";
    for (Eigen::Index j = 0; j < model.dim(); ++j) out << ' ' << format_double(model.sigma()(i, j));
    out << '\n';
  }
}

Vector read_vector(std::istream& in) {
  std::vector<double> all;
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (!parse_numbers(line, values)) throw ConfigError("vector file: non-numeric token");
    all.insert(all.end(), values.begin(), values.end());
  }
  if (all.empty()) throw ConfigError("vector file: no values");
  return Eigen::Map<const Vector>(all.data(), static_cast<Eigen::Index>(all.size()));
}

Vector read_vector(const std::string& path) {
  auto in = open_input(path);
  return read_vector(in);
}

}  // namespace advlin
