#include "gpe2d/run_config.hpp"

#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "gpe2d/errors.hpp"
#include "gpe2d/io.hpp"

namespace gpe2d::cli {

namespace {

using io::format_double;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || errno == ERANGE) throw InvalidParameter(key, "expected a number, got '" + v + "'");
  return d;
}

int to_int(const std::string& v, const std::string& key) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const long n = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0' || errno == ERANGE || n < INT_MIN || n > INT_MAX)
    throw InvalidParameter(key, "expected an integer, got '" + v + "'");
  return int(n);
}

bool to_bool(const std::string& v, const std::string& key) {
  const std::string t = trim(v);
  if (t == "1" || t == "true") return true;
  if (t == "0" || t == "false") return false;
  throw InvalidParameter(key, "expected true/false, got '" + v + "'");
}

std::array<int, 2> to_mode(const std::string& v, const std::string& key) {
  const auto parts = parse_double_list(v, key);
  if (parts.size() != 2) throw InvalidParameter(key, "expected l1,l2");
  std::array<int, 2> m{};
  for (int k = 0; k < 2; ++k) {
    if (parts[std::size_t(k)] != double(int(parts[std::size_t(k)])))
      throw InvalidParameter(key, "mode indices must be integers");
    m[std::size_t(k)] = int(parts[std::size_t(k)]);
  }
  return m;
}

struct Key {
  std::string section;
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Ref>
Key real_key(std::string section, std::string name, Ref ref) {
  return {section, name,
          [ref, name](RunConfig& c, const std::string& v) { ref(c) = to_double(v, name); },
          [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Key int_key(std::string section, std::string name, Ref ref) {
  return {section, name,
          [ref, name](RunConfig& c, const std::string& v) { ref(c) = to_int(v, name); },
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    for (int i = 0; i < 2; ++i) {
      const std::string n = std::to_string(i + 1);
      k.push_back(real_key("system", "m" + n, [i](RunConfig& c) -> double& { return c.system.m[i]; }));
    }
    k.push_back(real_key("system", "theta11", [](RunConfig& c) -> double& { return c.system.theta[0][0]; }));
    k.push_back({"system", "theta12",
                 [](RunConfig& c, const std::string& v) { c.system.set_coupling(to_double(v, "theta12")); },
                 [](const RunConfig& c) { return format_double(c.system.theta[0][1]); }});
    k.push_back(real_key("system", "theta22", [](RunConfig& c) -> double& { return c.system.theta[1][1]; }));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
        k.push_back(real_key("system", "omega" + ij, [i, j](RunConfig& c) -> double& { return c.system.omega[i][j]; }));
      }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
        k.push_back(real_key("system", "x" + ij, [i, j](RunConfig& c) -> double& { return c.system.centers[i][j]; }));
      }
    for (int i = 0; i < 2; ++i)
      k.push_back(real_key("system", "N" + std::to_string(i + 1), [i](RunConfig& c) -> double& { return c.system.N[i]; }));
    k.push_back(real_key("system", "rho", [](RunConfig& c) -> double& { return c.system.rho; }));

    k.push_back(int_key("basis", "L1", [](RunConfig& c) -> int& { return c.basis_x.L; }));
    k.push_back(int_key("basis", "L2", [](RunConfig& c) -> int& { return c.basis_y.L; }));
    k.push_back(real_key("basis", "beta1", [](RunConfig& c) -> double& { return c.basis_x.beta; }));
    k.push_back(real_key("basis", "beta2", [](RunConfig& c) -> double& { return c.basis_y.beta; }));

    k.push_back(int_key("solver", "max_newton_iters", [](RunConfig& c) -> int& { return c.solver.max_newton_iters; }));
    k.push_back(real_key("solver", "grad_tol", [](RunConfig& c) -> double& { return c.solver.grad_tol; }));
    k.push_back(real_key("solver", "stage_tol", [](RunConfig& c) -> double& { return c.solver.stage_tol; }));
    k.push_back(real_key("solver", "armijo_c", [](RunConfig& c) -> double& { return c.solver.armijo_c; }));
    k.push_back(real_key("solver", "backtrack_factor", [](RunConfig& c) -> double& { return c.solver.backtrack_factor; }));
    k.push_back(int_key("solver", "max_backtracks", [](RunConfig& c) -> int& { return c.solver.max_backtracks; }));
    k.push_back(int_key("solver", "continuation_steps_rho",
                        [](RunConfig& c) -> int& { return c.solver.continuation_steps_rho; }));
    k.push_back(int_key("solver", "continuation_steps_theta",
                        [](RunConfig& c) -> int& { return c.solver.continuation_steps_theta; }));
    k.push_back(real_key("solver", "diag_floor", [](RunConfig& c) -> double& { return c.solver.diag_floor; }));
    k.push_back(int_key("solver", "max_halvings", [](RunConfig& c) -> int& { return c.solver.max_halvings; }));

    for (int i = 0; i < 2; ++i) {
      const std::string name = "mode" + std::to_string(i + 1);
      k.push_back({"excited", name,
                   [i, name](RunConfig& c, const std::string& v) { c.excited.modes[i] = to_mode(v, name); },
                   [i](const RunConfig& c) {
                     return std::to_string(c.excited.modes[i][0]) + "," + std::to_string(c.excited.modes[i][1]);
                   }});
    }
    k.push_back({"excited", "keep_parity",
                 [](RunConfig& c, const std::string& v) { c.excited.keep_parity = to_bool(v, "keep_parity"); },
                 [](const RunConfig& c) { return std::string(c.excited.keep_parity ? "true" : "false"); }});

    k.push_back({"sweep", "kappas",
                 [](RunConfig& c, const std::string& v) { c.kappas = parse_double_list(v, "kappas"); },
                 [](const RunConfig& c) {
                   std::string s;
                   for (std::size_t q = 0; q < c.kappas.size(); ++q) s += (q ? "," : "") + format_double(c.kappas[q]);
                   return s;
                 }});
    k.push_back(int_key("sweep", "points_per_decade", [](RunConfig& c) -> int& { return c.sweep.points_per_decade; }));

    k.push_back({"output", "dir", [](RunConfig& c, const std::string& v) { c.out_dir = trim(v); },
                 [](const RunConfig& c) { return c.out_dir; }});
    k.push_back(real_key("output", "grid_x0", [](RunConfig& c) -> double& { return c.grid.x0; }));
    k.push_back(real_key("output", "grid_x1", [](RunConfig& c) -> double& { return c.grid.x1; }));
    k.push_back(int_key("output", "grid_nx", [](RunConfig& c) -> int& { return c.grid.nx; }));
    k.push_back(real_key("output", "grid_y0", [](RunConfig& c) -> double& { return c.grid.y0; }));
    k.push_back(real_key("output", "grid_y1", [](RunConfig& c) -> double& { return c.grid.y1; }));
    k.push_back(int_key("output", "grid_ny", [](RunConfig& c) -> int& { return c.grid.ny; }));
    return k;
  }();
  return table;
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.system == b.system && a.basis_x == b.basis_x && a.basis_y == b.basis_y && a.solver == b.solver &&
         a.excited == b.excited && a.kappas == b.kappas && a.sweep.points_per_decade == b.sweep.points_per_decade &&
         a.grid == b.grid && a.out_dir == b.out_dir;
}

void RunConfig::validate() const {
  system.validate();
  for (auto [spec, l, beta] : {std::tuple{&basis_x, "L1", "beta1"}, std::tuple{&basis_y, "L2", "beta2"}}) {
    if (spec->L < 1) throw InvalidParameter(l, "must be >= 1");
    if (!(spec->beta > 0.0) || !std::isfinite(spec->beta)) throw InvalidParameter(beta, "must be positive");
  }
  solver.validate();
  for (int i = 0; i < 2; ++i) {
    const auto& m = excited.modes[std::size_t(i)];
    const std::string key = "mode" + std::to_string(i + 1);
    if (m[0] < 0 || m[1] < 0) throw InvalidParameter(key, "mode indices must be nonnegative");
    if (m[0] >= basis_x.L || m[1] >= basis_y.L) throw InvalidParameter(key, "mode index outside the basis");
  }
  if (sweep.points_per_decade < 1) throw InvalidParameter("points_per_decade", "must be >= 1");
  grid.validate();
  if (out_dir.empty()) throw InvalidParameter("dir", "output directory must not be empty");
}

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_double(cell, key));
  if (!text.empty() && trim(text).back() == ',') throw InvalidParameter(key, "trailing comma");
  return out;
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig c;
  std::map<std::string, const Key*> index;
  std::set<std::string> sections;
  for (const auto& k : keys()) {
    index[k.section + "." + k.name] = &k;
    sections.insert(k.section);
  }
  std::set<std::string> seen;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw InvalidParameter(section, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string name = trim(line.substr(0, eq));
    if (section.empty()) throw ParseError("line " + std::to_string(lineno) + ": key '" + name + "' outside a section");
    const auto it = index.find(section + "." + name);
    if (it == index.end()) throw InvalidParameter(name, "unknown key in [" + section + "]");
    if (!seen.insert(it->first).second) throw InvalidParameter(name, "duplicate key");
    it->second->set(c, line.substr(eq + 1));
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("config", "cannot open " + path.string());
  return parse_run_config(in);
}

std::string write_run_config(const RunConfig& config) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) os << '\n';
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << k.name << " = " << k.get(config) << '\n';
  }
  return os.str();
}

}  // namespace gpe2d::cli
