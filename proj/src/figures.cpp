#include "alohar/figures.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "alohar/analytic.hpp"
#include "alohar/config.hpp"
#include "alohar/mc.hpp"
#include "alohar/model.hpp"
#include "alohar/parallel.hpp"

namespace alohar {

namespace {

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  const double llo = std::log(lo), lhi = std::log(hi);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

// Distinct deterministic seed per grid point so MC columns are reproducible
// bit for bit and rows stay independent under parallel evaluation.
mc::RngSeed seed_at(const RunConfig& cfg, std::size_t idx) {
  return {cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(idx + 1)};
}

std::string cell(double v) { return format_double(v); }

// Relaxed quadrature for dense plotting grids over the slow nested field
// transforms; anchors and acceptance checks use the tight defaults instead.
constexpr num::Tolerance kPlotTol{1e-7, 1e-10, 2000};

std::string render_speed1(const RunConfig& cfg, bool with_mc) {
  CsvTable t;
  t.comments = {"speed and density of progress of the nearest-neighbor route vs MAC probability",
                "p [transmit probability]", "speed [m/slot]", "density_over_lambda [m/slot]"};
  t.columns = {"p", "speed", "density_over_lambda"};
  if (with_mc) {
    t.columns.push_back("mc_speed");
    t.columns.push_back("mc_speed_stderr");
  }
  const std::vector<double> ps = linear_grid(0.005, 0.35, 70);
  t.rows = parallel_map(ps.size(), [&](std::size_t i) {
    PoissonRouteConfig rc = cfg.route();
    rc.mac.p = ps[i];
    std::vector<std::string> row{cell(ps[i]), cell(long_distance_speed(rc)),
                                 cell(density_of_progress(rc) / rc.lambda)};
    if (with_mc) {
      const mc::Estimate e = mc::simulate_long_distance_speed(rc, 200, 100, cfg.window, seed_at(cfg, i));
      row.push_back(cell(e.mean));
      row.push_back(cell(e.std_error));
    }
    return row;
  });
  return t.render();
}

std::string render_var_m(const RunConfig& cfg, bool with_mc) {
  CsvTable t;
  t.comments = {"end-to-end delay and speed vs source-destination distance, with the long-distance speed limit",
                "m [m]", "delay [slots]", "speed [m/slot]", "limit_speed [m/slot]"};
  t.columns = {"m", "delay", "speed", "limit_speed"};
  if (with_mc) {
    t.columns.push_back("mc_delay");
    t.columns.push_back("mc_delay_stderr");
  }
  const PoissonRouteConfig rc = cfg.route();
  const double limit = long_distance_speed(rc);
  const std::vector<double> ms = linear_grid(100.0, 2000.0, 39);
  t.rows = parallel_map(ms.size(), [&](std::size_t i) {
    const ExtendedDelay d = end_to_end_delay(ms[i], rc, cfg.ifs);
    std::vector<std::string> row{cell(ms[i]), cell(d.slots),
                                 cell(end_to_end_speed(ms[i], rc, cfg.ifs)), cell(limit)};
    if (with_mc) {
      const mc::Estimate e =
          mc::simulate_end_to_end(ms[i], rc, cfg.ifs, 2000, cfg.window, seed_at(cfg, i));
      row.push_back(cell(e.mean));
      row.push_back(cell(e.std_error));
    }
    return row;
  });
  return t.render();
}

std::string render_var_mw(const RunConfig& cfg) {
  CsvTable t;
  t.comments = {"end-to-end delay and speed vs distance for three ambient noise levels",
                "w [noise power]", "m [m]", "delay [slots]", "speed [m/slot]"};
  t.columns = {"w", "m", "delay", "speed"};
  const std::vector<double> ws{1e-11, 1e-12, 1e-13};
  const std::vector<double> ms = log_grid(100.0, 12000.0, 40);
  t.rows = parallel_map(ws.size() * ms.size(), [&](std::size_t idx) {
    const double w = ws[idx / ms.size()];
    const double m = ms[idx % ms.size()];
    PoissonRouteConfig rc = cfg.route();
    rc.ch.W = w;
    const ExtendedDelay d = end_to_end_delay(m, rc, cfg.ifs);
    return std::vector<std::string>{cell(w), cell(m), cell(d.slots),
                                    cell(d.is_finite() ? m / d.slots : 0.0)};
  });
  return t.render();
}

std::string render_var_wm(const RunConfig& cfg) {
  CsvTable t;
  t.comments = {"end-to-end delay and speed vs ambient noise at distance 10000 m",
                "w [noise power]", "delay [slots]", "speed [m/slot]"};
  t.columns = {"w", "delay", "speed"};
  const double m = 10000.0;
  const std::vector<double> ws = log_grid(1e-14, 1e-8, 40);
  t.rows = parallel_map(ws.size(), [&](std::size_t i) {
    PoissonRouteConfig rc = cfg.route();
    rc.ch.W = ws[i];
    const ExtendedDelay d = end_to_end_delay(m, rc, cfg.ifs);
    return std::vector<std::string>{cell(ws[i]), cell(d.slots),
                                    cell(d.is_finite() ? m / d.slots : 0.0)};
  });
  return t.render();
}

// Shared by the two external-field figures: e2e speed at 10 km vs the planar
// intensity of the interferer population, one curve per listed p'.
std::string render_field_speed(const RunConfig& cfg, bool line_process) {
  CsvTable t;
  const char* ind = line_process ? "nu_lambda_prime" : "mu";
  t.comments = {std::string("end-to-end delay and speed at 10000 m vs interferer intensity (") +
                    (line_process ? "Poisson-line field)" : "planar Poisson field)"),
                "p_prime [transmit probability]", std::string(ind) + " [1/m^2]",
                "delay [slots]", "speed [m/slot]"};
  t.columns = {"p_prime", ind, "delay", "speed"};
  const double m = 10000.0;
  const std::vector<double> pps{0.15, 0.015};
  const std::vector<double> intens = log_grid(1e-8, 1e-3, 30);
  t.rows = parallel_map(pps.size() * intens.size(), [&](std::size_t idx) {
    const double pp = pps[idx / intens.size()];
    const double a = intens[idx % intens.size()];
    PoissonRouteConfig rc = cfg.route();
    rc.mac.p_prime = pp;
    InterfererSpec ifs = cfg.ifs;
    if (line_process) {
      ifs.kind = InterfererKind::poisson_line;
      // Sweep the per-line density at fixed line intensity: the factor for one
      // line grows like exp(lambda' * hop), so scaling lambda' with the target
      // planar intensity keeps the sparse end of the sweep representable.
      ifs.lambda_prime = a / ifs.nu;
    } else {
      ifs.kind = InterfererKind::poisson_field;
      ifs.mu = a;
    }
    const ExtendedDelay d = end_to_end_delay(m, rc, ifs, kPlotTol);
    return std::vector<std::string>{cell(pp), cell(a), cell(d.slots),
                                    cell(d.is_finite() ? m / d.slots : 0.0)};
  });
  return t.render();
}

std::string render_grw(const RunConfig& cfg, bool with_mc) {
  CsvTable t;
  t.comments = {"local delay and speed of the grid-stabilized route vs grid spacing, two noise levels",
                "w [noise power]", "delta [m]", "delay [slots]",
                "speed [m/slot] (combined-spacing normalization)",
                "speed_route [m/slot] (route-spacing normalization)"};
  t.columns = {"w", "delta", "delay", "speed", "speed_route"};
  if (with_mc) {
    t.columns.push_back("mc_delay");
    t.columns.push_back("mc_delay_stderr");
    t.columns.push_back("mc_diverged");
  }
  const std::vector<double> ws{1e-11, 1e-12};
  const std::vector<double> ds = log_grid(200.0, 12000.0, 30);
  t.rows = parallel_map(ws.size() * ds.size(), [&](std::size_t idx) {
    LatticeRouteConfig lc = cfg.lattice();
    lc.base.ch.W = ws[idx / ds.size()];
    lc.delta = ds[idx % ds.size()];
    const LatticeDelayTerms terms = lattice_delay_terms(lc, cfg.ifs, cfg.lattice_terms);
    const double mean = terms.mean_slots;
    const double hop_combined = 1.0 / (lc.base.lambda + 1.0 / lc.delta);
    const double hop_route = 1.0 / lc.base.lambda;
    std::vector<std::string> row{cell(lc.base.ch.W), cell(lc.delta), cell(mean),
                                 cell(std::isfinite(mean) ? hop_combined / mean : 0.0),
                                 cell(std::isfinite(mean) ? hop_route / mean : 0.0)};
    if (with_mc) {
      const mc::DelayEstimate e =
          mc::simulate_lattice_local_delay(lc, cfg.ifs, 2000, cfg.window, seed_at(cfg, idx));
      row.push_back(cell(e.overall.mean));
      row.push_back(cell(e.overall.std_error));
      row.push_back(e.diverged ? "1" : "0");
    }
    return row;
  });
  return t.render();
}

}  // namespace

std::optional<FigureName> parse_figure_name(const std::string& name) {
  for (FigureName f : all_figure_names())
    if (name == figure_name_string(f)) return f;
  return std::nullopt;
}

std::string figure_name_string(FigureName name) {
  switch (name) {
    case FigureName::speed1: return "speed1";
    case FigureName::varM: return "varM";
    case FigureName::varMW: return "varMW";
    case FigureName::varWM: return "varWM";
    case FigureName::chlambda: return "chlambda";
    case FigureName::ppl: return "ppl";
    case FigureName::grw: return "grw";
  }
  return "";
}

const std::vector<FigureName>& all_figure_names() {
  static const std::vector<FigureName> names{
      FigureName::speed1, FigureName::varM,  FigureName::varMW, FigureName::varWM,
      FigureName::chlambda, FigureName::ppl, FigureName::grw};
  return names;
}

std::string render_figure(FigureName name, const RunConfig& cfg, bool with_mc) {
  switch (name) {
    case FigureName::speed1: return render_speed1(cfg, with_mc);
    case FigureName::varM: return render_var_m(cfg, with_mc);
    case FigureName::varMW: return render_var_mw(cfg);
    case FigureName::varWM: return render_var_wm(cfg);
    case FigureName::chlambda: return render_field_speed(cfg, false);
    case FigureName::ppl: return render_field_speed(cfg, true);
    case FigureName::grw: return render_grw(cfg, with_mc);
  }
  return {};
}

}  // namespace alohar
