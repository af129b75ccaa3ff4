#include "alohar/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace alohar {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  if (text.empty() || text[0] == '-')
    throw std::invalid_argument("config: " + key + " must be a nonnegative integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (errno != 0 || end != text.c_str() + text.size())
    throw std::invalid_argument("config: " + key + " must be a nonnegative integer");
  return v;
}

double parse_double_key(const std::string& key, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("config: " + key + " must be a number");
  }
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "route.kind") {
    if (value == "poisson")
      cfg.route_kind = RouteKind::poisson;
    else if (value == "lattice")
      cfg.route_kind = RouteKind::lattice;
    else
      throw std::invalid_argument("config: route.kind must be poisson or lattice");
  } else if (key == "route.lambda") {
    cfg.lambda = parse_double_key(key, value);
  } else if (key == "route.delta") {
    cfg.delta = parse_double_key(key, value);
  } else if (key == "mac.p") {
    cfg.mac.p = parse_double_key(key, value);
  } else if (key == "mac.p_prime") {
    cfg.mac.p_prime = parse_double_key(key, value);
  } else if (key == "channel.A") {
    cfg.ch.A = parse_double_key(key, value);
  } else if (key == "channel.beta") {
    cfg.ch.beta = parse_double_key(key, value);
  } else if (key == "channel.T") {
    cfg.ch.T = parse_double_key(key, value);
  } else if (key == "channel.W") {
    cfg.ch.W = parse_double_key(key, value);
  } else if (key == "interferers.kind") {
    if (value == "none")
      cfg.ifs.kind = InterfererKind::none;
    else if (value == "poisson_field")
      cfg.ifs.kind = InterfererKind::poisson_field;
    else if (value == "poisson_line")
      cfg.ifs.kind = InterfererKind::poisson_line;
    else
      throw std::invalid_argument(
          "config: interferers.kind must be none, poisson_field or poisson_line");
  } else if (key == "interferers.mu") {
    cfg.ifs.mu = parse_double_key(key, value);
  } else if (key == "interferers.nu") {
    cfg.ifs.nu = parse_double_key(key, value);
  } else if (key == "interferers.lambda_prime") {
    cfg.ifs.lambda_prime = parse_double_key(key, value);
  } else if (key == "e2e.m") {
    cfg.e2e_m = parse_double_key(key, value);
  } else if (key == "hop.r") {
    cfg.hop_r = parse_double_key(key, value);
  } else if (key == "mc.samples") {
    cfg.samples = parse_uint(key, value);
  } else if (key == "mc.seed") {
    cfg.seed = parse_uint(key, value);
    cfg.seed_from_file = true;
  } else if (key == "mc.mode") {
    if (value == "slot")
      cfg.mode = mc::CaptureMode::slot;
    else if (value == "semi_analytic")
      cfg.mode = mc::CaptureMode::semi_analytic;
    else
      throw std::invalid_argument("config: mc.mode must be slot or semi_analytic");
  } else if (key == "window.route") {
    cfg.window.half_width_1d = parse_double_key(key, value);
  } else if (key == "window.field") {
    cfg.window.half_width_2d = parse_double_key(key, value);
  } else if (key == "lattice.terms") {
    if (value == "uniform")
      cfg.lattice_terms = LatticeTermMode::uniform;
    else if (value == "partial")
      cfg.lattice_terms = LatticeTermMode::partial;
    else
      throw std::invalid_argument("config: lattice.terms must be uniform or partial");
  } else if (key == "lattice.speed_norm") {
    if (value == "combined")
      cfg.lattice_norm = LatticeSpeedNorm::combined;
    else if (value == "route_only")
      cfg.lattice_norm = LatticeSpeedNorm::route_only;
    else
      throw std::invalid_argument("config: lattice.speed_norm must be combined or route_only");
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not key=value");
    assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("config: override '" + assignment + "' is not key=value");
  assign(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "route.kind=" << (cfg.route_kind == RouteKind::poisson ? "poisson" : "lattice") << "\n";
  out << "route.lambda=" << format_double(cfg.lambda) << "\n";
  out << "route.delta=" << format_double(cfg.delta) << "\n";
  out << "mac.p=" << format_double(cfg.mac.p) << "\n";
  out << "mac.p_prime=" << format_double(cfg.mac.p_prime) << "\n";
  out << "channel.A=" << format_double(cfg.ch.A) << "\n";
  out << "channel.beta=" << format_double(cfg.ch.beta) << "\n";
  out << "channel.T=" << format_double(cfg.ch.T) << "\n";
  out << "channel.W=" << format_double(cfg.ch.W) << "\n";
  out << "interferers.kind=" << interferer_kind_string(cfg.ifs.kind) << "\n";
  out << "interferers.mu=" << format_double(cfg.ifs.mu) << "\n";
  out << "interferers.nu=" << format_double(cfg.ifs.nu) << "\n";
  out << "interferers.lambda_prime=" << format_double(cfg.ifs.lambda_prime) << "\n";
  out << "e2e.m=" << format_double(cfg.e2e_m) << "\n";
  out << "hop.r=" << format_double(cfg.hop_r) << "\n";
  out << "mc.samples=" << cfg.samples << "\n";
  out << "mc.seed=" << cfg.seed << "\n";
  out << "mc.mode=" << (cfg.mode == mc::CaptureMode::slot ? "slot" : "semi_analytic") << "\n";
  out << "window.route=" << format_double(cfg.window.half_width_1d) << "\n";
  out << "window.field=" << format_double(cfg.window.half_width_2d) << "\n";
  out << "lattice.terms="
      << (cfg.lattice_terms == LatticeTermMode::uniform ? "uniform" : "partial") << "\n";
  out << "lattice.speed_norm="
      << (cfg.lattice_norm == LatticeSpeedNorm::combined ? "combined" : "route_only") << "\n";
  return out.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text.empty()) throw std::invalid_argument("empty number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size())
    throw std::invalid_argument("bad number '" + text + "'");
  return v;
}

const char* interferer_kind_string(InterfererKind kind) {
  switch (kind) {
    case InterfererKind::none: return "none";
    case InterfererKind::poisson_field: return "poisson_field";
    case InterfererKind::poisson_line: return "poisson_line";
  }
  return "none";
}

std::string CsvTable::render() const {
  std::ostringstream out;
  for (const std::string& c : comments) out << "# " << c << "\n";
  for (std::size_t j = 0; j < columns.size(); ++j)
    out << columns[j] << (j + 1 < columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j)
      out << row[j] << (j + 1 < row.size() ? "," : "");
    out << "\n";
  }
  return out.str();
}

}  // namespace alohar
