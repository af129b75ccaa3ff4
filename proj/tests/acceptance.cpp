// Acceptance gate for the whole laboratory: eleven end-to-end criteria, one
// printed line each, "PASS k name (t s)" or "FAIL k name (t s): reason".
// Tolerances are pinned here on purpose; the exit status is the number of
// failed criteria. Criteria with a stated time budget enforce it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "alohar/analytic.hpp"
#include "alohar/config.hpp"
#include "alohar/figures.hpp"
#include "alohar/mc.hpp"
#include "alohar/model.hpp"
#include "alohar/numerics.hpp"
#include "alohar/rng.hpp"
#include "alohar/sinr.hpp"

using namespace alohar;

namespace {

const PoissonRouteConfig kRoute{};  // lambda=0.01, p=0.15, A=1, beta=4, T=10, W=0
const double kPi = std::acos(-1.0);

PoissonRouteConfig with_p(double p) {
  PoissonRouteConfig cfg = kRoute;
  cfg.mac.p = p;
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Records the first failed requirement of a criterion.
struct Gate {
  bool ok = true;
  std::string why;

  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
  }
};

void require_close(Gate& g, const std::string& what, double observed, double expected,
                   double sigma) {
  g.require(std::isfinite(observed) && std::abs(observed - expected) <= 3.0 * sigma + 1e-12,
            what + ": observed " + fmt(observed) + " vs " + fmt(expected) + " with 3 sigma " +
                fmt(3.0 * sigma));
}

// 1. The tail integral behind every closed form, against its sine formula.
void criterion_shape_integral(Gate& g) {
  for (double beta : {2.5, 3.0, 4.0, 6.0}) {
    ChannelConfig ch;
    ch.beta = beta;
    const double exact = kPi / (beta * std::sin(kPi / beta));
    const double quad = ShapeConstants(ch).tail_integral(0.0);
    g.require(std::abs(quad - exact) <= 1e-8 * exact,
              "beta " + fmt(beta) + ": quadrature " + fmt(quad) + " vs closed " + fmt(exact));
  }
}

// 2. Played slots against the exact fixed-geometry capture probability.
void criterion_fixed_slots(Gate& g) {
  const MacConfig mac{0.25, 0.25};
  const Point2 tx{0.0, 0.0}, rx{100.0, 0.0};
  struct Case {
    const char* label;
    Interferers2D ifs;
    double w;
  };
  const std::vector<Case> cases = {
      {"no interferers", {}, 0.0},
      {"one interferer", {{50.0, 80.0}}, 1e-11},
      {"five interferers",
       {{150.0, 40.0}, {-60.0, 90.0}, {30.0, -120.0}, {200.0, -50.0}, {-140.0, -70.0}},
       1e-11},
  };
  const std::uint64_t n = 1000000;
  std::uint64_t seed = 2001;
  for (const Case& c : cases) {
    ChannelConfig ch;
    ch.W = c.w;
    const double exact = capture_prob_fixed(tx, rx, c.ifs, mac, ch);
    const mc::Estimate est = mc::slot_capture_frequency(tx, rx, c.ifs, mac, ch, n, {seed++});
    const double sigma = std::sqrt(exact * (1.0 - exact) / double(n));
    require_close(g, c.label, est.mean, exact, sigma);
  }
}

// 3. Route capture closed forms against the geometry-sampling estimator, and
// receiver-choice dominance across the MAC range.
void criterion_route_capture(Gate& g) {
  std::uint64_t seed = 3001;
  for (double p : {0.05, 0.1, 0.3}) {
    const PoissonRouteConfig cfg = with_p(p);
    const mc::Estimate nn =
        mc::estimate_capture_nn(cfg, mc::CaptureMode::semi_analytic, 100000, {}, {seed++});
    require_close(g, "nearest neighbor, p=" + fmt(p), nn.mean, p * capture_nn(cfg),
                  nn.std_error);
    const mc::Estimate nr =
        mc::estimate_capture_nr(cfg, mc::CaptureMode::semi_analytic, 100000, {}, {seed++});
    require_close(g, "nearest receiver, p=" + fmt(p), nr.mean, p * capture_nr(cfg),
                  nr.std_error);
  }
  for (int i = 0; i < 50; ++i) {
    const double p = 0.01 + 0.97 * double(i) / 49.0;
    g.require(capture_nr(with_p(p)) >= capture_nn(with_p(p)) - 1e-12,
              "receiver choice loses at p=" + fmt(p));
  }
}

// 4. The delay phase transition: located by bisection, respected by the
// closed form, flagged and reproduced by the importance-sampling estimator.
void criterion_delay_transition(Gate& g) {
  const std::optional<double> pc = critical_p(kRoute.ch);
  g.require(pc.has_value(), "no transition found below p=1");
  if (!pc) return;
  const double lo = 0.9 * *pc, hi = 1.1 * *pc;
  const ExtendedDelay cold_exact = mean_local_delay_nn(with_p(lo));
  g.require(cold_exact.is_finite(), "delay not finite just below the transition");
  g.require(!mean_local_delay_nn(with_p(hi)).is_finite(),
            "delay finite just above the transition");

  const mc::DelayEstimate hot = mc::estimate_mean_local_delay(with_p(hi), {}, 20000, {}, {4001});
  g.require(hot.diverged, "estimator did not flag the supercritical regime");

  const mc::DelayEstimate cold =
      mc::estimate_mean_local_delay(with_p(lo), {}, 100000, {}, {4002});
  g.require(!cold.diverged, "estimator flagged the subcritical regime");
  g.require(cold.growth_full < 0.02,
            "running mean still moved " + fmt(100.0 * cold.growth_full) + "% on the last doubling");
  require_close(g, "subcritical delay", cold.overall.mean, cold_exact.slots,
                cold.overall.std_error);
}

// 5. Speed: unimodal below the transition, optimum where expected, exact
// reciprocal relation to the local delay, and the route simulator agrees.
void criterion_speed(Gate& g) {
  const std::optional<double> pc = critical_p(kRoute.ch);
  g.require(pc.has_value(), "no transition found below p=1");
  if (!pc) return;
  const int n = 41;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = long_distance_speed(with_p(*pc * (i + 1) / (n + 1)));
  const int k = int(std::max_element(v.begin(), v.end()) - v.begin());
  g.require(k > 0 && k < n - 1, "speed peak sits at the grid edge");
  for (int i = 0; i + 1 < n; ++i) {
    if (i < k)
      g.require(v[i] < v[i + 1] + 1e-12, "speed not rising before its peak");
    else
      g.require(v[i] > v[i + 1] - 1e-12, "speed not falling after its peak");
  }

  const SpeedOptimum opt = optimize_speed(kRoute);
  g.require(std::abs(opt.p - 0.15) <= 0.02,
            "speed-optimal MAC probability " + fmt(opt.p) + " outside 0.15 +- 0.02");

  for (double p : {0.05, 0.15, 0.25}) {
    const PoissonRouteConfig cfg = with_p(p);
    const double prod =
        long_distance_speed(cfg) * cfg.lambda * mean_local_delay_nn(cfg).slots;
    g.require(std::abs(prod - 1.0) <= 1e-10,
              "speed * lambda * delay = " + fmt(prod) + " at p=" + fmt(p));
  }

  const mc::Estimate sim = mc::simulate_long_distance_speed(kRoute, 500, 1000, {}, {5001});
  const double target = long_distance_speed(kRoute);
  g.require(std::abs(sim.mean - target) <= 0.10 * target,
            "simulated speed " + fmt(sim.mean) + " vs " + fmt(target));
}

// 6. End-to-end delay against simulation; speed saturates with distance on
// the expected scale; the short-distance limit is the bare MAC cost.
void criterion_end_to_end(Gate& g) {
  std::uint64_t seed = 6001;
  for (double m : {100.0, 500.0, 1000.0, 2000.0}) {
    const double exact = end_to_end_delay(m, kRoute).slots;
    const mc::Estimate est = mc::simulate_end_to_end(m, kRoute, {}, 10000, {}, {seed++});
    require_close(g, "distance " + fmt(m), est.mean, exact, est.std_error);
  }

  const std::vector<double> ms = {50,  100, 150, 200,  250,  300,  350, 400,
                                  500, 600, 750, 1000, 1250, 1500, 2000};
  std::vector<double> s(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) s[i] = end_to_end_speed(ms[i], kRoute);
  double smax = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    g.require(s[i + 1] >= s[i] * (1.0 - 1e-9), "speed falls between " + fmt(ms[i]) + " and " +
                                                   fmt(ms[i + 1]));
  for (double x : s) smax = std::max(smax, x);
  double first = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= 0.9 * smax) {
      first = ms[i];
      break;
    }
  }
  g.require(first >= 250.0 && first <= 750.0,
            "90% of peak speed first reached at distance " + fmt(first));

  const double bare = 1.0 / (kRoute.mac.p * (1.0 - kRoute.mac.p));
  const double short_delay = end_to_end_delay(0.01, kRoute).slots;
  g.require(std::abs(short_delay - bare) <= 0.01 * bare,
            "short-distance delay " + fmt(short_delay) + " vs " + fmt(bare));
}

// 7. Ambient noise: the noise-averaged capture reduces exactly at W = 0,
// strictly loses for W > 0, matches the estimator, and the mean local delay
// estimator flags the infinite-mean noise regime.
void criterion_noise(Gate& g) {
  const double closed = capture_nn(kRoute);
  const double at_zero = capture_nn_noise(kRoute, constant_noise_laplace(0.0));
  g.require(std::abs(at_zero - closed) <= 1e-10,
            "noise form at W=0 " + fmt(at_zero) + " vs closed " + fmt(closed));

  const double w = 1e-11;
  const double noisy_cap = capture_nn_noise(kRoute, constant_noise_laplace(w));
  g.require(noisy_cap < closed, "capture did not drop under noise");

  PoissonRouteConfig noisy = kRoute;
  noisy.ch.W = w;
  const mc::Estimate est =
      mc::estimate_capture_nn(noisy, mc::CaptureMode::semi_analytic, 100000, {}, {7001});
  require_close(g, "noisy capture", est.mean, kRoute.mac.p * noisy_cap, est.std_error);

  const mc::DelayEstimate d = mc::estimate_mean_local_delay(noisy, {}, 20000, {}, {7002});
  g.require(d.diverged, "estimator did not flag the noisy delay");
}

// 8. External fields: the two delay inflation factors against their
// estimators, and line clustering dominates the homogeneous field at every
// matched intensity.
void criterion_fields(Gate& g) {
  const double r = 100.0;
  InterfererSpec field;
  field.kind = InterfererKind::poisson_field;
  field.mu = 1e-4;
  const double ep = expected_delay_factor_poisson_field(r, field.mu, kRoute.mac, kRoute.ch);
  const mc::Estimate fe =
      mc::estimate_field_delay_factor(r, field, kRoute.mac, kRoute.ch, 40000, {}, {8001});
  require_close(g, "homogeneous field factor", fe.mean, ep, fe.std_error);

  InterfererSpec line;
  line.kind = InterfererKind::poisson_line;
  line.nu = 0.01;
  line.lambda_prime = 0.01;
  const double el =
      expected_delay_factor_poisson_line(r, line.nu, line.lambda_prime, kRoute.mac, kRoute.ch);
  const mc::Estimate le =
      mc::estimate_field_delay_factor(r, line, kRoute.mac, kRoute.ch, 40000, {}, {8002});
  require_close(g, "line field factor", le.mean, el, le.std_error);

  std::mt19937_64 rng = substream(777, 0);
  for (int i = 0; i < 20; ++i) {
    const double rr = 20.0 + 130.0 * runif(rng);
    const double mu = std::exp(std::log(1e-6) + std::log(2e2) * runif(rng));
    const double lp = std::exp(std::log(0.002) + std::log(25.0) * runif(rng));
    const double a = expected_delay_factor_poisson_field(rr, mu, kRoute.mac, kRoute.ch);
    const double b =
        expected_delay_factor_poisson_line(rr, mu / lp, lp, kRoute.mac, kRoute.ch);
    g.require(b >= a * (1.0 - 1e-6), "line factor " + fmt(b) + " below field factor " + fmt(a) +
                                         " at r=" + fmt(rr) + ", intensity " + fmt(mu));
  }
}

// 9. End-to-end speed over a long trip versus external-field intensity:
// flat at low intensity, collapsed at high, and lines never beat the
// homogeneous field.
void criterion_field_collapse(Gate& g) {
  const double m = 10000.0;
  const std::vector<double> as = {1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 3e-4, 1e-3};
  std::vector<double> sf(as.size()), sl(as.size());
  for (std::size_t i = 0; i < as.size(); ++i) {
    InterfererSpec field;
    field.kind = InterfererKind::poisson_field;
    field.mu = as[i];
    sf[i] = end_to_end_speed(m, kRoute, field);
    InterfererSpec line;
    line.kind = InterfererKind::poisson_line;
    line.nu = 0.01;
    line.lambda_prime = as[i] / line.nu;
    sl[i] = end_to_end_speed(m, kRoute, line);
  }
  g.require(sf[0] > 0.0, "no motion even without interferers");
  g.require(sl[0] > 0.0, "sparse line field already stalls the packet");
  g.require(std::abs(sf[1] - sf[0]) <= 0.05 * sf[0], "field speed not flat at low intensity");
  g.require(std::abs(sl[1] - sl[0]) <= 0.05 * sl[0], "line speed not flat at low intensity");
  for (std::size_t i = 0; i + 1 < as.size(); ++i) {
    g.require(sf[i + 1] <= sf[i] * (1.0 + 1e-9), "field speed rose with intensity");
    g.require(sl[i + 1] <= sl[i] * (1.0 + 1e-9), "line speed rose with intensity");
  }
  g.require(sf.back() < 0.05 * sf[0], "field speed did not collapse: " + fmt(sf.back()) +
                                          " vs plateau " + fmt(sf[0]));
  g.require(sl.back() < 0.05 * sl[0], "line speed did not collapse");
  // the gap between the two closes as the per-line density vanishes, so allow
  // slack a little above the quadrature tolerance
  for (std::size_t i = 0; i < as.size(); ++i)
    g.require(sl[i] <= sf[i] * (1.0 + 1e-6) + 1e-15,
              "line speed beats field speed at intensity " + fmt(as[i]));
}

// 10. The periodic grid under ambient noise: simulation agrees around the
// optimal spacing, the speed-versus-spacing curve has an interior peak, and
// the optimal spacing sits within a factor two of the distance at which the
// end-to-end speed peaks under the same noise.
void criterion_grid_spacing(Gate& g) {
  PoissonRouteConfig noisy = kRoute;
  noisy.ch.W = 1e-11;
  auto lat = [&](double delta) { return LatticeRouteConfig{noisy, delta}; };

  const num::Peak peak = num::maximize_unimodal(
      [&](double t) { return lattice_speed(lat(std::exp(t))); },
      {std::log(50.0), std::log(20000.0)}, {1e-8, 1e-4, 2000});
  const double dstar = std::exp(peak.argmax);
  g.require(dstar > 55.0 && dstar < 18000.0, "optimal spacing hit the search bracket");

  const int n = 25;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) {
    const double delta = 100.0 * std::pow(12000.0 / 100.0, double(i) / (n - 1));
    s[i] = lattice_speed(lat(delta));
  }
  const int k = int(std::max_element(s.begin(), s.end()) - s.begin());
  g.require(k > 0 && k < n - 1, "grid-speed peak sits at the grid edge");
  for (int i = 0; i + 1 < n; ++i) {
    if (i < k)
      g.require(s[i] <= s[i + 1] * (1.0 + 1e-9), "grid speed not rising before its peak");
    else
      g.require(s[i + 1] <= s[i] * (1.0 + 1e-9), "grid speed not falling after its peak");
  }

  std::uint64_t seed = 10001;
  for (double delta : {0.5 * dstar, dstar, 2.0 * dstar}) {
    const double exact = lattice_mean_local_delay(lat(delta)).slots;
    const mc::DelayEstimate est = mc::simulate_lattice_local_delay(lat(delta), {}, 30000, {},
                                                                   {seed++});
    g.require(!est.diverged, "estimator flagged spacing " + fmt(delta));
    require_close(g, "spacing " + fmt(delta), est.overall.mean, exact, est.overall.std_error);
  }

  const num::Peak mpeak = num::maximize_unimodal(
      [&](double t) { return end_to_end_speed(std::exp(t), noisy); },
      {std::log(100.0), std::log(5000.0)}, {1e-8, 1e-4, 2000});
  const double mstar = std::exp(mpeak.argmax);
  const double ratio = dstar / mstar;
  g.require(ratio >= 0.5 && ratio <= 2.0,
            "spacing optimum " + fmt(dstar) + " vs distance optimum " + fmt(mstar));
}

// 11. Every figure re-renders byte-identically under the same seed.
void criterion_figure_determinism(Gate& g) {
  const RunConfig cfg;  // seed = 1
  for (FigureName name : all_figure_names()) {
    const bool mc_on =
        name == FigureName::speed1 || name == FigureName::varM || name == FigureName::grw;
    const std::string once = render_figure(name, cfg, mc_on);
    const std::string again = render_figure(name, cfg, mc_on);
    g.require(!once.empty(), "empty render of " + figure_name_string(name));
    g.require(std::count(once.begin(), once.end(), '\n') > 5,
              "figure " + figure_name_string(name) + " has almost no rows");
    g.require(once == again, "re-render of " + figure_name_string(name) + " differs");
  }
}

struct Criterion {
  int id;
  const char* name;
  void (*fn)(Gate&);
  double budget_s;  // 0 = no stated budget
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "shape integral quadrature matches the sine closed form", criterion_shape_integral,
       1.0},
      {2, "played slots reproduce fixed-geometry capture", criterion_fixed_slots, 60.0},
      {3, "route capture estimates match the closed forms", criterion_route_capture, 120.0},
      {4, "delay phase transition is located and flagged", criterion_delay_transition, 300.0},
      {5, "speed is unimodal with the expected optimum", criterion_speed, 0.0},
      {6, "end-to-end delay is exact and speed saturates", criterion_end_to_end, 0.0},
      {7, "ambient noise degrades capture and breaks the mean delay", criterion_noise, 0.0},
      {8, "field delay factors are exact and lines dominate", criterion_fields, 600.0},
      {9, "dense fields collapse the end-to-end speed", criterion_field_collapse, 0.0},
      {10, "grid spacing optimum coheres with the distance optimum", criterion_grid_spacing,
       0.0},
      {11, "figures re-render byte-identically", criterion_figure_determinism, 0.0},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Gate g;
    try {
      c.fn(g);
    } catch (const std::exception& e) {
      g.require(false, std::string("exception: ") + e.what());
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0)
      g.require(dt <= c.budget_s,
                "took " + fmt(dt) + " s, budget " + fmt(c.budget_s) + " s");
    if (g.ok) {
      std::printf("PASS %2d %s (%.1f s)\n", c.id, c.name, dt);
    } else {
      std::printf("FAIL %2d %s (%.1f s): %s\n", c.id, c.name, dt, g.why.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures;
}
