#include "gpe2d/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gpe2d/errors.hpp"

namespace gpe2d::io {

namespace {

// Parses "key=value" tokens after a fixed magic prefix.
std::map<std::string, std::string> parse_header(const std::string& line, const std::string& magic) {
  std::istringstream ss(line);
  std::string tag, version;
  ss >> tag >> version;
  if (tag + " " + version != magic) throw ParseError("expected header '" + magic + "', got '" + line + "'");
  std::map<std::string, std::string> kv;
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("malformed header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

template <typename T>
T header_value(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError("header is missing '" + key + "'");
  std::istringstream ss(it->second);
  T v{};
  ss >> v;
  if (ss.fail() || !ss.eof()) throw ParseError("bad value for '" + key + "': " + it->second);
  return v;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ParseError("not a number: '" + s + "'");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_coefficients(std::ostream& out, const CoefficientField& field) {
  const auto& b = field.basis();
  out << "gpe2d-coeffs v1 L1=" << b.L1() << " L2=" << b.L2() << " beta1=" << format_double(b.spec(0).beta)
      << " beta2=" << format_double(b.spec(1).beta) << " N=" << format_double(field.target_mass()) << '\n';
  for (int a = 0; a < b.L1(); ++a)
    for (int c = 0; c < b.L2(); ++c) out << a << ' ' << c << ' ' << format_double(field.coeffs()(a, c)) << '\n';
}

void write_coefficients(const std::filesystem::path& path, const CoefficientField& field) {
  auto out = open_out(path);
  write_coefficients(out, field);
}

CoefficientField read_coefficients(std::istream& in, BasisPtr basis) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty coefficient file");
  const auto kv = parse_header(line, "gpe2d-coeffs v1");
  const BasisSpec sx{header_value<int>(kv, "L1"), parse_double(kv.count("beta1") ? kv.at("beta1") : "")};
  const BasisSpec sy{header_value<int>(kv, "L2"), parse_double(kv.count("beta2") ? kv.at("beta2") : "")};
  const double N = parse_double(kv.count("N") ? kv.at("N") : "");
  sx.validate();
  sy.validate();
  if (basis) {
    if (!(basis->spec(0) == sx && basis->spec(1) == sy))
      throw BasisMismatch("coefficient file basis does not match the supplied basis");
  } else {
    basis = make_basis(sx, sy);
  }
  CoeffMatrix c = CoeffMatrix::Zero(sx.L, sy.L);
  for (int a = 0; a < sx.L; ++a) {
    for (int b = 0; b < sy.L; ++b) {
      if (!std::getline(in, line)) throw ParseError("coefficient file truncated");
      std::istringstream ss(line);
      int l1 = -1, l2 = -1;
      std::string value;
      ss >> l1 >> l2 >> value;
      if (l1 != a || l2 != b) throw ParseError("coefficient line out of order: '" + line + "'");
      c(a, b) = parse_double(value);
    }
  }
  return CoefficientField(std::move(basis), std::move(c), N);
}

CoefficientField read_coefficients(const std::filesystem::path& path, BasisPtr basis) {
  auto in = open_in(path);
  return read_coefficients(in, std::move(basis));
}

void write_grid(std::ostream& out, const Grid2D& grid, int component, const Matrix& values) {
  if (values.rows() != grid.ny || values.cols() != grid.nx)
    throw InvalidParameter("grid", "value matrix shape does not match the grid");
  out << "gpe2d-grid v1 nx=" << grid.nx << " ny=" << grid.ny << " x0=" << format_double(grid.x0)
      << " x1=" << format_double(grid.x1) << " y0=" << format_double(grid.y0) << " y1=" << format_double(grid.y1)
      << " component=" << component << '\n';
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (i) out << ' ';
      out << format_double(values(j, i));
    }
    out << '\n';
  }
}

void write_grid(const std::filesystem::path& path, const Grid2D& grid, int component, const Matrix& values) {
  auto out = open_out(path);
  write_grid(out, grid, component, values);
}

GridData read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty grid file");
  const auto kv = parse_header(line, "gpe2d-grid v1");
  GridData g;
  g.grid.nx = header_value<int>(kv, "nx");
  g.grid.ny = header_value<int>(kv, "ny");
  g.grid.x0 = parse_double(kv.count("x0") ? kv.at("x0") : "");
  g.grid.x1 = parse_double(kv.count("x1") ? kv.at("x1") : "");
  g.grid.y0 = parse_double(kv.count("y0") ? kv.at("y0") : "");
  g.grid.y1 = parse_double(kv.count("y1") ? kv.at("y1") : "");
  g.component = header_value<int>(kv, "component");
  g.grid.validate();
  g.values.resize(g.grid.ny, g.grid.nx);
  for (int j = 0; j < g.grid.ny; ++j) {
    if (!std::getline(in, line)) throw ParseError("grid file truncated");
    std::istringstream ss(line);
    std::string tok;
    for (int i = 0; i < g.grid.nx; ++i) {
      if (!(ss >> tok)) throw ParseError("grid row " + std::to_string(j) + " too short");
      g.values(j, i) = parse_double(tok);
    }
    if (ss >> tok) throw ParseError("grid row " + std::to_string(j) + " too long");
  }
  return g;
}

GridData read_grid(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_grid(in);
}

std::string report_to_json(const StateReport& r) {
  nlohmann::json j;
  j["energy"] = r.energy;
  j["energies_per_component"] = r.energies_per_component;
  j["chemical_potentials"] = r.chemical_potentials;
  j["overlap_integral"] = r.overlap_integral;
  j["residual_norm"] = r.residual_norm;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j.dump(2);
}

StateReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    StateReport r;
    r.energy = j.at("energy").get<double>();
    r.energies_per_component = j.at("energies_per_component").get<std::array<double, 2>>();
    r.chemical_potentials = j.at("chemical_potentials").get<std::array<double, 2>>();
    r.overlap_integral = j.at("overlap_integral").get<double>();
    r.residual_norm = j.at("residual_norm").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid state report: ") + e.what());
  }
}

}  // namespace gpe2d::io
