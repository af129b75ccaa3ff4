// Command-line front end for the relaying laboratory: evaluate closed forms,
// sweep parameters, reproduce the reference figures, optimize MAC and grid
// parameters, and run analytic-vs-simulation validation suites.
//
// Exit codes: 0 success, 1 usage error, 2 validation failure (bad
// configuration values or a failed validation suite), 3 numeric failure.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alohar/analytic.hpp"
#include "alohar/config.hpp"
#include "alohar/figures.hpp"
#include "alohar/mc.hpp"
#include "alohar/model.hpp"
#include "alohar/numerics.hpp"
#include "alohar/parallel.hpp"
#include "alohar/sinr.hpp"
#include "alohar/validate.hpp"

namespace {

using namespace alohar;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

mc::RngSeed seed_at(const RunConfig& cfg, std::size_t idx) {
  return {cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(idx + 1)};
}

const std::vector<std::string>& quantity_names() {
  static const std::vector<std::string> names{
      "capture_nn", "capture_nr",  "local_delay",  "critical_p",
      "speed",      "density",     "e2e_delay",    "e2e_speed",
      "lattice_delay", "lattice_speed", "eprime_p", "eprime_pl"};
  return names;
}

InterfererSpec forced_kind(const RunConfig& cfg, InterfererKind kind) {
  InterfererSpec ifs = cfg.ifs;
  ifs.kind = kind;
  return ifs;
}

double eval_quantity(const RunConfig& cfg, const std::string& q) {
  const PoissonRouteConfig rc = cfg.route();
  if (q == "capture_nn") return capture_nn(rc);
  if (q == "capture_nr") return capture_nr(rc);
  if (q == "local_delay") return mean_local_delay_nn(rc).slots;
  if (q == "critical_p") {
    const auto pc = critical_p(cfg.ch);
    return pc ? *pc : std::numeric_limits<double>::infinity();
  }
  if (q == "speed") return long_distance_speed(rc);
  if (q == "density") return density_of_progress(rc);
  if (q == "e2e_delay") return end_to_end_delay(cfg.e2e_m, rc, cfg.ifs).slots;
  if (q == "e2e_speed") return end_to_end_speed(cfg.e2e_m, rc, cfg.ifs);
  if (q == "lattice_delay")
    return lattice_mean_local_delay(cfg.lattice(), cfg.ifs, cfg.lattice_terms).slots;
  if (q == "lattice_speed")
    return lattice_speed(cfg.lattice(), cfg.ifs, cfg.lattice_norm, cfg.lattice_terms);
  if (q == "eprime_p")
    return expected_delay_factor_poisson_field(cfg.hop_r, cfg.ifs.mu, cfg.mac, cfg.ch);
  if (q == "eprime_pl")
    return expected_delay_factor_poisson_line(cfg.hop_r, cfg.ifs.nu, cfg.ifs.lambda_prime,
                                              cfg.mac, cfg.ch);
  throw UsageError("unknown quantity: " + q);
}

struct McCell {
  double mean = 0.0;
  double stderr_ = 0.0;
  int flag = -1;  // -1 none, else 0/1 divergence flag
};

// Simulator counterpart of a quantity, or nullopt when none exists.
std::optional<McCell> eval_quantity_mc(const RunConfig& cfg, const std::string& q,
                                       mc::RngSeed seed) {
  const PoissonRouteConfig rc = cfg.route();
  const std::uint64_t n = cfg.samples;
  if (q == "capture_nn" || q == "capture_nr") {
    if (!(rc.mac.p > 0.0)) return std::nullopt;  // estimator targets the joint slot event
    const mc::Estimate e = q == "capture_nn"
                               ? mc::estimate_capture_nn(rc, cfg.mode, n, cfg.window, seed)
                               : mc::estimate_capture_nr(rc, cfg.mode, n, cfg.window, seed);
    return McCell{e.mean / rc.mac.p, e.std_error / rc.mac.p, -1};
  }
  if (q == "local_delay") {
    const mc::DelayEstimate e = mc::estimate_mean_local_delay(rc, cfg.ifs, n, cfg.window, seed);
    return McCell{e.overall.mean, e.overall.std_error, e.diverged ? 1 : 0};
  }
  if (q == "speed") {
    const mc::Estimate e = mc::simulate_long_distance_speed(
        rc, 300, std::max<std::uint64_t>(10, n / 50), cfg.window, seed);
    return McCell{e.mean, e.std_error, -1};
  }
  if (q == "e2e_delay" || q == "e2e_speed") {
    const mc::Estimate e = mc::simulate_end_to_end(cfg.e2e_m, rc, cfg.ifs, n, cfg.window, seed);
    if (q == "e2e_delay") return McCell{e.mean, e.std_error, -1};
    if (!(e.mean > 0.0) || !std::isfinite(e.mean)) return McCell{0.0, 0.0, -1};
    return McCell{cfg.e2e_m / e.mean, cfg.e2e_m * e.std_error / (e.mean * e.mean), -1};
  }
  if (q == "lattice_delay" || q == "lattice_speed") {
    const mc::DelayEstimate e =
        mc::simulate_lattice_local_delay(cfg.lattice(), cfg.ifs, n, cfg.window, seed);
    if (q == "lattice_delay")
      return McCell{e.overall.mean, e.overall.std_error, e.diverged ? 1 : 0};
    const double spacing = cfg.lattice_norm == LatticeSpeedNorm::combined
                               ? 1.0 / (cfg.lambda + 1.0 / cfg.delta)
                               : 1.0 / cfg.lambda;
    const double m = e.overall.mean;
    if (!(m > 0.0) || !std::isfinite(m)) return McCell{0.0, 0.0, e.diverged ? 1 : 0};
    return McCell{spacing / m, spacing * e.overall.std_error / (m * m), e.diverged ? 1 : 0};
  }
  if (q == "eprime_p") {
    const mc::Estimate e = mc::estimate_field_delay_factor(
        cfg.hop_r, forced_kind(cfg, InterfererKind::poisson_field), cfg.mac, cfg.ch, n,
        cfg.window, seed);
    return McCell{e.mean, e.std_error, -1};
  }
  if (q == "eprime_pl") {
    const mc::Estimate e = mc::estimate_field_delay_factor(
        cfg.hop_r, forced_kind(cfg, InterfererKind::poisson_line), cfg.mac, cfg.ch, n,
        cfg.window, seed);
    return McCell{e.mean, e.std_error, -1};
  }
  return std::nullopt;
}

// One-line echo of the numbers a printed value depends on.
std::string params_line(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# lambda=" << format_double(cfg.lambda) << " p=" << format_double(cfg.mac.p)
      << " p_prime=" << format_double(cfg.mac.p_prime) << " A=" << format_double(cfg.ch.A)
      << " beta=" << format_double(cfg.ch.beta) << " T=" << format_double(cfg.ch.T)
      << " W=" << format_double(cfg.ch.W) << " m=" << format_double(cfg.e2e_m)
      << " r=" << format_double(cfg.hop_r) << " delta=" << format_double(cfg.delta)
      << " interferers=" << interferer_kind_string(cfg.ifs.kind);
  if (cfg.ifs.kind == InterfererKind::poisson_field)
    out << " mu=" << format_double(cfg.ifs.mu);
  if (cfg.ifs.kind == InterfererKind::poisson_line)
    out << " nu=" << format_double(cfg.ifs.nu)
        << " lambda_prime=" << format_double(cfg.ifs.lambda_prime);
  out << " seed=" << cfg.seed << " samples=" << cfg.samples;
  return out.str();
}

void set_sweep_param(RunConfig& cfg, const std::string& name, double v) {
  if (name == "p" || name == "mac.p") cfg.mac.p = v;
  else if (name == "p_prime" || name == "mac.p_prime") cfg.mac.p_prime = v;
  else if (name == "m" || name == "M" || name == "e2e.m") cfg.e2e_m = v;
  else if (name == "w" || name == "W" || name == "channel.W") cfg.ch.W = v;
  else if (name == "delta" || name == "route.delta") cfg.delta = v;
  else if (name == "lambda" || name == "route.lambda") cfg.lambda = v;
  else if (name == "lambda_prime" || name == "interferers.lambda_prime")
    cfg.ifs.lambda_prime = v;
  else if (name == "nu" || name == "interferers.nu") cfg.ifs.nu = v;
  else if (name == "nu_lambda_prime") cfg.ifs.lambda_prime = v / cfg.ifs.nu;
  else if (name == "mu" || name == "interferers.mu") cfg.ifs.mu = v;
  else if (name == "r" || name == "hop.r") cfg.hop_r = v;
  else throw UsageError("unknown sweep parameter: " + name);
}

void write_document(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << text;
  std::cout << "wrote " << out_path << " (" << text.size() << " bytes)\n";
}

int cmd_eval(const RunConfig& cfg, const std::string& quantity, bool with_mc,
             const std::string& out_path) {
  std::ostringstream doc;
  const double v = eval_quantity(cfg, quantity);
  doc << quantity << " = " << format_double(v) << "\n" << params_line(cfg) << "\n";
  if (quantity == "critical_p" && std::isinf(v))
    doc << "# no phase transition below p = 1 for this channel\n";
  if (with_mc) {
    const auto cell = eval_quantity_mc(cfg, quantity, seed_at(cfg, 0));
    if (cell) {
      doc << "mc_mean = " << format_double(cell->mean) << "\n"
          << "mc_stderr = " << format_double(cell->stderr_) << "\n";
      if (cell->flag >= 0) doc << "mc_diverged = " << cell->flag << "\n";
    } else {
      doc << "# no simulator counterpart for this quantity\n";
    }
  }
  write_document(doc.str(), out_path);
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& param, const std::string& quantity,
              double from, double to, std::size_t points, bool log_grid, bool with_mc,
              const std::string& out_path) {
  if (points < 1) throw UsageError("sweep needs at least one grid point");
  if (log_grid && !(from > 0.0 && to > 0.0))
    throw UsageError("log-spaced sweep needs positive endpoints");
  {
    RunConfig probe = cfg;
    set_sweep_param(probe, param, from);  // unknown names rejected before any work
  }
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = log_grid ? std::exp(std::log(from) + t * (std::log(to) - std::log(from)))
                       : from + t * (to - from);
  }
  CsvTable table;
  table.comments = {"sweep of " + quantity + " over " + param,
                    params_line(cfg).substr(2),
                    std::string(log_grid ? "log" : "linear") + "-spaced grid"};
  table.columns = {param, quantity};
  if (with_mc) {
    table.columns.push_back("mc_mean");
    table.columns.push_back("mc_stderr");
    table.columns.push_back("mc_diverged");
  }
  table.columns.push_back("status");
  table.rows = parallel_map(grid.size(), [&](std::size_t i) {
    std::vector<std::string> row{format_double(grid[i])};
    RunConfig point = cfg;
    try {
      set_sweep_param(point, param, grid[i]);
      row.push_back(format_double(eval_quantity(point, quantity)));
      if (with_mc) {
        const auto cell = eval_quantity_mc(point, quantity, seed_at(cfg, i));
        if (cell) {
          row.push_back(format_double(cell->mean));
          row.push_back(format_double(cell->stderr_));
          row.push_back(cell->flag < 0 ? "" : std::to_string(cell->flag));
        } else {
          row.insert(row.end(), {"", "", ""});
        }
      }
      row.push_back("ok");
    } catch (const std::invalid_argument&) {
      // Domain violation at this grid point: mark the row, keep sweeping.
      row.resize(table.columns.size() - 1);
      row.push_back("domain");
    }
    return row;
  });
  write_document(table.render(), out_path);
  return 0;
}

int cmd_figure(const RunConfig& cfg, const std::string& name, bool with_mc,
               const std::string& out_path) {
  const auto fig = parse_figure_name(name);
  if (!fig) throw UsageError("unknown figure name: " + name);
  const std::string text = render_figure(*fig, cfg, with_mc);
  const std::string path = out_path.empty() ? name + ".csv" : out_path;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
  std::cout << "wrote " << path << " (" << text.size() << " bytes)\n";
  return 0;
}

int cmd_optimize(const RunConfig& cfg, const std::string& target, const std::string& out_path) {
  struct Eval {
    double x, value;
  };
  std::vector<Eval> trace;
  std::ostringstream summary;
  CsvTable table;
  const num::Tolerance tol{};
  if (target == "p_for_speed" || target == "p_for_density") {
    PoissonRouteConfig probe = cfg.route();
    const bool for_speed = target == "p_for_speed";
    auto f = [&](double p) {
      probe.mac.p = p;
      const double v = for_speed ? long_distance_speed(probe) : density_of_progress(probe);
      trace.push_back({p, v});
      return v;
    };
    double hi = 1.0 - 1e-9;
    if (for_speed)
      if (const auto pc = critical_p(cfg.ch)) hi = std::min(hi, *pc - 1e-9);
    const num::Bracket bracket{1e-9, hi};
    const num::Peak peak = num::maximize_unimodal(f, bracket, tol);
    summary << "target = " << target << "\n"
            << "bracket = [" << format_double(bracket.lo) << ", " << format_double(bracket.hi)
            << "]\n"
            << "tolerance = rel " << format_double(tol.rel) << ", abs " << format_double(tol.abs)
            << "\n"
            << "optimum_p = " << format_double(peak.argmax) << "\n"
            << (for_speed ? "speed" : "density") << " = " << format_double(peak.max) << "\n";
    if (!for_speed) {
      const ProgressOptimum po = optimize_progress_density(cfg.route());
      summary << "stationary_p = " << format_double(po.p_stationary) << "\n"
              << "alternate_p = " << format_double(po.p_alternate)
              << "  (alternate closed form; lands below the numeric optimum)\n"
              << "alternate_density = " << format_double(po.density_alternate) << "\n";
    }
    table.columns = {"step", "p", for_speed ? "speed" : "density"};
  } else if (target == "delta_for_speed") {
    auto f = [&](double t) {
      LatticeRouteConfig lc = cfg.lattice();
      lc.delta = std::exp(t);
      const double v = lattice_speed(lc, cfg.ifs, cfg.lattice_norm, cfg.lattice_terms);
      trace.push_back({lc.delta, v});
      return v;
    };
    const num::Bracket bracket{std::log(50.0), std::log(20000.0)};
    const num::Peak peak = num::maximize_unimodal(f, bracket, tol);
    summary << "target = delta_for_speed\n"
            << "bracket = [50, 20000] (searched in log spacing)\n"
            << "tolerance = rel " << format_double(tol.rel) << ", abs " << format_double(tol.abs)
            << "\n"
            << "optimum_delta = " << format_double(std::exp(peak.argmax)) << "\n"
            << "speed = " << format_double(peak.max) << "\n";
    table.columns = {"step", "delta", "speed"};
  } else {
    throw UsageError("unknown optimize target: " + target);
  }
  summary << "evaluations = " << trace.size() << "\n";
  std::cout << summary.str();
  table.comments = {"evaluation trace of " + target, params_line(cfg).substr(2)};
  for (std::size_t i = 0; i < trace.size(); ++i)
    table.rows.push_back(
        {std::to_string(i), format_double(trace[i].x), format_double(trace[i].value)});
  write_document(table.render(), out_path);
  return 0;
}

int cmd_validate(const RunConfig& cfg, const std::string& suite, const std::string& out_path) {
  std::vector<std::string> suites;
  if (suite == "all")
    suites = all_validation_suites();
  else
    suites.push_back(suite);
  std::ostringstream doc;
  bool all_pass = true;
  std::vector<std::string> failed;
  for (const std::string& s : suites) {
    const SuiteResult r = run_validation_suite(s, cfg);  // unknown name -> invalid_argument
    const std::string report = format_suite_report(r);
    std::cout << report;
    doc << report;
    all_pass = all_pass && r.pass;
    for (const CheckResult& c : r.checks)
      if (!c.pass) failed.push_back(r.suite + "/" + c.name);
  }
  if (!out_path.empty()) write_document(doc.str(), out_path);
  if (!all_pass) {
    std::cerr << "failed checks:";
    for (const std::string& f : failed) std::cerr << " " << f;
    std::cerr << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"performance laboratory for nearest-neighbor multihop relaying under slotted Aloha"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed_flag = 0;
  std::uint64_t samples_flag = 0;
  std::string out_path;
  app.add_option("--config", config_path, "configuration file (key = value lines)");
  app.add_option("--set", overrides, "override one key=value (repeatable)");
  auto* seed_opt = app.add_option("--seed", seed_flag, "RNG seed (highest precedence)");
  auto* samples_opt = app.add_option("--samples", samples_flag, "MC sample count");
  app.add_option("--out", out_path, "write the output document to this file");

  auto* eval_cmd = app.add_subcommand("eval", "print one analytic quantity");
  std::string quantity;
  bool with_mc = false;
  eval_cmd->add_option("--quantity", quantity, "one of: " + [] {
                        std::string s;
                        for (const auto& q : quantity_names()) s += (s.empty() ? "" : ", ") + q;
                        return s;
                      }())
      ->required();
  eval_cmd->add_flag("--mc", with_mc, "add the simulator counterpart");

  auto* sweep_cmd = app.add_subcommand("sweep", "CSV of a quantity over a parameter grid");
  std::string sweep_param;
  double sweep_from = 0.0, sweep_to = 0.0;
  std::size_t sweep_points = 25;
  bool sweep_log = false;
  sweep_cmd->add_option("--param", sweep_param,
                        "p, p_prime, m, w, delta, lambda, lambda_prime, nu, nu_lambda_prime, mu, r")
      ->required();
  sweep_cmd->add_option("--quantity", quantity, "quantity to tabulate")->required();
  sweep_cmd->add_option("--from", sweep_from, "grid start")->required();
  sweep_cmd->add_option("--to", sweep_to, "grid end")->required();
  sweep_cmd->add_option("--points", sweep_points, "grid size (default 25)");
  sweep_cmd->add_flag("--log", sweep_log, "log-spaced grid");
  sweep_cmd->add_flag("--mc", with_mc, "add simulator columns");

  auto* figure_cmd = app.add_subcommand("figure", "reproduce a reference figure as CSV");
  std::string figure_name;
  figure_cmd->add_option("--name", figure_name,
                         "speed1, varM, varMW, varWM, chlambda, ppl, grw")
      ->required();
  figure_cmd->add_flag("--mc", with_mc, "add simulator columns where supported");

  auto* optimize_cmd = app.add_subcommand("optimize", "golden-section optimum with trace");
  std::string target;
  optimize_cmd->add_option("--target", target, "p_for_speed, p_for_density, delta_for_speed")
      ->required();

  auto* validate_cmd = app.add_subcommand("validate", "analytic-vs-MC comparison suites");
  std::string suite;
  validate_cmd
      ->add_option("--suite", suite, "fixed, capture, local-delay, e2e, fields, lattice, all")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config(slurp(config_path));
    if (!cfg.seed_from_file) {
      if (const char* env = std::getenv("ALOHA_RELAY_SEED")) {
        try {
          cfg.seed = parse_config("mc.seed = " + std::string(env)).seed;
        } catch (const std::invalid_argument&) {
          throw std::invalid_argument("ALOHA_RELAY_SEED is not a valid seed: " +
                                      std::string(env));
        }
      }
    }
    for (const std::string& s : overrides) apply_override(cfg, s);
    if (seed_opt->count() > 0) cfg.seed = seed_flag;
    if (samples_opt->count() > 0) {
      if (samples_flag == 0) throw std::invalid_argument("--samples must be positive");
      cfg.samples = samples_flag;
    }

    if (eval_cmd->parsed()) return cmd_eval(cfg, quantity, with_mc, out_path);
    if (sweep_cmd->parsed())
      return cmd_sweep(cfg, sweep_param, quantity, sweep_from, sweep_to, sweep_points, sweep_log,
                       with_mc, out_path);
    if (figure_cmd->parsed()) return cmd_figure(cfg, figure_name, with_mc, out_path);
    if (optimize_cmd->parsed()) return cmd_optimize(cfg, target, out_path);
    if (validate_cmd->parsed()) return cmd_validate(cfg, suite, out_path);
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const num::QuadratureError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
