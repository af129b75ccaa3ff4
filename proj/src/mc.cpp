#include "alohar/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "alohar/numerics.hpp"
#include "alohar/parallel.hpp"
#include "alohar/rng.hpp"
#include "alohar/sinr.hpp"

namespace alohar::mc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// log(DBL_MAX); exponents beyond it round to +inf.
constexpr double kLogMax = 709.78;
// Unsampled tail of the route log product allowed per sample.
constexpr double kRouteTailBudget = 1e-4;
// Same budget for planar fields (quadratically more points per meter).
constexpr double kFieldTailBudget = 1e-3;
constexpr std::uint64_t kSlotCap = 10000000;

double route_half_width(const SimWindow& w, double lambda) {
  return w.half_width_1d > 0.0 ? w.half_width_1d : 50.0 / lambda;
}

double field_half_width(const SimWindow& w, double gap, double hop, const ChannelConfig& ch) {
  if (w.half_width_2d > 0.0) return w.half_width_2d;
  return 30.0 * std::max(gap, hop) * std::pow(ch.T, 1.0 / ch.beta);
}

// Widen the route window so the truncated tail of sum log(1/h) for a hop of
// length r is below the budget: tail ~ lambda p T r^beta w^(1-beta)/(beta-1).
double adaptive_route_half_width(double base, double lambda, double p, double r,
                                 const ChannelConfig& ch) {
  if (!(r > 0.0) || p <= 0.0) return base;
  const double need = std::pow(lambda * p * ch.T * std::pow(r, ch.beta) /
                                   ((ch.beta - 1.0) * kRouteTailBudget),
                               1.0 / (ch.beta - 1.0));
  return std::max(base, need);
}

// Field analogue: tail ~ 2 pi mu p' T r^beta w^(2-beta)/(beta-2).
double adaptive_field_half_width(double base, double intensity, double p_prime, double r,
                                 const ChannelConfig& ch) {
  if (!(r > 0.0) || intensity <= 0.0 || p_prime <= 0.0) return base;
  const double pi = std::acos(-1.0);
  const double need = std::pow(2.0 * pi * intensity * p_prime * ch.T * std::pow(r, ch.beta) /
                                   ((ch.beta - 2.0) * kFieldTailBudget),
                               1.0 / (ch.beta - 2.0));
  return std::max(base, need);
}

Estimate reduce_estimate(const std::vector<double>& vals) {
  Estimate e;
  e.n = vals.size();
  double sum = 0.0;
  for (double v : vals) sum += v;
  e.mean = sum / static_cast<double>(e.n);
  if (!std::isfinite(e.mean)) {
    e.std_error = kInf;
    return e;
  }
  if (e.n < 2) return e;
  double ss = 0.0;
  for (double v : vals) {
    const double d = v - e.mean;
    ss += d * d;
  }
  e.std_error = std::sqrt(ss / (static_cast<double>(e.n - 1) * static_cast<double>(e.n)));
  return e;
}

double prefix_mean(const std::vector<double>& vals, std::size_t k) {
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += vals[i];
  return sum / static_cast<double>(k);
}

DelayEstimate reduce_delay(const std::vector<double>& vals) {
  DelayEstimate d;
  d.overall = reduce_estimate(vals);
  const std::size_t n = vals.size();
  std::vector<double> sorted(vals);
  std::sort(sorted.begin(), sorted.end());
  d.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const std::size_t trim = n / 10;
  if (n > 2 * trim) {
    double sum = 0.0;
    for (std::size_t i = trim; i < n - trim; ++i) sum += sorted[i];
    d.trimmed_mean = sum / static_cast<double>(n - 2 * trim);
  } else {
    d.trimmed_mean = d.overall.mean;
  }
  if (n >= 4) {
    const double m1 = prefix_mean(vals, n / 4);
    const double m2 = prefix_mean(vals, n / 2);
    const double m3 = d.overall.mean;
    d.growth_half = std::isfinite(m1) && m1 > 0.0 && std::isfinite(m2) ? m2 / m1 - 1.0 : kInf;
    d.growth_full = std::isfinite(m2) && m2 > 0.0 && std::isfinite(m3) ? m3 / m2 - 1.0 : kInf;
  }
  bool any_inf = false;
  double total = 0.0;
  double top = 0.0;
  for (double v : vals) {
    if (!std::isfinite(v)) any_inf = true;
    total += v;
    top = std::max(top, v);
  }
  d.max_share = any_inf ? 1.0 : (total > 0.0 ? top / total : 0.0);
  d.diverged = !std::isfinite(d.overall.mean) || d.growth_half > 0.10 || d.growth_full > 0.10 ||
               d.max_share > 0.5;
  return d;
}

// T^{1/beta} * [int_a^inf + int_0^inf] of (1 + x_u)^s - 1 du with
// x_u = p/(u^beta + 1 - p) and a = T^{-1/beta}. The mean of the per-gap route
// product prod h^{-s} over a gap r is exp(lambda r G(s)); G(1) = p * D1.
double tilt_constant(double s, double p, const ChannelConfig& ch) {
  const auto f = [&](double u) {
    return std::pow(1.0 + p / (std::pow(u, ch.beta) + 1.0 - p), s) - 1.0;
  };
  const double a = std::pow(ch.T, -1.0 / ch.beta);
  const num::Tolerance tol{1e-10, 1e-13, 2000};
  return std::pow(ch.T, 1.0 / ch.beta) *
         (num::integrate_semi_infinite(f, a, tol) + num::integrate_semi_infinite(f, 0.0, tol));
}

// Sum of log(1/interference_factor) over field points around the receiver.
double field_log_factors(std::mt19937_64& rng, const InterfererSpec& ifs, const SimWindow& window,
                         double gap_scale, double r, double p_prime, const ChannelConfig& ch) {
  if (ifs.kind == InterfererKind::none) return 0.0;
  const double intensity =
      ifs.kind == InterfererKind::poisson_field ? ifs.mu : ifs.nu * ifs.lambda_prime;
  if (intensity <= 0.0) return 0.0;
  const double base = field_half_width(window, gap_scale, r, ch);
  const double hw = window.half_width_2d > 0.0
                        ? window.half_width_2d
                        : adaptive_field_half_width(base, intensity, p_prime, r, ch);
  const Interferers2D pts = ifs.kind == InterfererKind::poisson_field
                                ? sample_poisson_field(ifs.mu, hw, rng)
                                : sample_poisson_line_field(ifs.nu, ifs.lambda_prime, hw, rng);
  double log_sum = 0.0;
  for (const Point2& q : pts) {
    const double d = std::hypot(q.x, q.y);
    log_sum -= std::log(interference_factor(d, r, p_prime, ch));
  }
  return log_sum;
}

// Product of interference factors from sorted route positions within
// half_width of rx, skipping the hop's own endpoints.
double sorted_route_product(const std::vector<double>& pts, std::size_t i_tx, std::size_t i_rx,
                            double rx, double r, double half_width, double p,
                            const ChannelConfig& ch) {
  const auto lo = std::lower_bound(pts.begin(), pts.end(), rx - half_width);
  const auto hi = std::upper_bound(pts.begin(), pts.end(), rx + half_width);
  double prod = 1.0;
  for (auto it = lo; it != hi; ++it) {
    const std::size_t j = static_cast<std::size_t>(it - pts.begin());
    if (j == i_tx || j == i_rx) continue;
    prod *= interference_factor(*it - rx, r, p, ch);
  }
  return prod;
}

}  // namespace

Route1D sample_poisson_route(double lambda, double half_width, std::mt19937_64& rng) {
  if (!(lambda > 0.0)) throw std::invalid_argument("sample_poisson_route: lambda must be > 0");
  if (!(half_width > 0.0))
    throw std::invalid_argument("sample_poisson_route: half_width must be > 0");
  const long n = rpoisson(rng, lambda * 2.0 * half_width);
  Route1D pts(static_cast<std::size_t>(n));
  for (double& x : pts) x = (2.0 * runif(rng) - 1.0) * half_width;
  std::sort(pts.begin(), pts.end());
  return pts;
}

Interferers2D sample_poisson_field(double mu, double half_width, std::mt19937_64& rng) {
  if (!(mu >= 0.0)) throw std::invalid_argument("sample_poisson_field: mu must be >= 0");
  if (!(half_width > 0.0))
    throw std::invalid_argument("sample_poisson_field: half_width must be > 0");
  const double side = 2.0 * half_width;
  const long n = rpoisson(rng, mu * side * side);
  Interferers2D pts(static_cast<std::size_t>(n));
  for (Point2& q : pts) {
    q.x = (2.0 * runif(rng) - 1.0) * half_width;
    q.y = (2.0 * runif(rng) - 1.0) * half_width;
  }
  return pts;
}

Interferers2D sample_poisson_line_field(double nu, double lambda_prime, double half_width,
                                        std::mt19937_64& rng) {
  if (!(nu >= 0.0) || !(lambda_prime >= 0.0))
    throw std::invalid_argument("sample_poisson_line_field: intensities must be >= 0");
  if (!(half_width > 0.0))
    throw std::invalid_argument("sample_poisson_line_field: half_width must be > 0");
  Interferers2D pts;
  if (nu == 0.0 || lambda_prime == 0.0) return pts;
  // Lines whose distance from the center is below rho_max = hw*sqrt(2) cover
  // the square; offset intensity nu gives length per unit area nu.
  const double rho_max = half_width * std::sqrt(2.0);
  const long n_lines = rpoisson(rng, nu * 2.0 * rho_max);
  const double t_max = half_width * std::sqrt(2.0);
  for (long l = 0; l < n_lines; ++l) {
    const double theta = std::acos(-1.0) * runif(rng);
    const double rho = (2.0 * runif(rng) - 1.0) * rho_max;
    const double cx = rho * -std::sin(theta);
    const double cy = rho * std::cos(theta);
    const long m = rpoisson(rng, lambda_prime * 2.0 * t_max);
    for (long k = 0; k < m; ++k) {
      const double t = (2.0 * runif(rng) - 1.0) * t_max;
      const Point2 q{cx + t * std::cos(theta), cy + t * std::sin(theta)};
      if (std::abs(q.x) <= half_width && std::abs(q.y) <= half_width) pts.push_back(q);
    }
  }
  return pts;
}

namespace {

// Nearest-forward-neighbor geometry around the typical node: gap R to the
// receiver, interferer distances from the receiver on both sides. Gaps are
// drawn until they exhaust the window.
struct NnGeometry {
  double gap = 0.0;
  std::vector<double> dist;  // distances from the receiver
};

NnGeometry sample_nn_geometry(std::mt19937_64& rng, double lambda, double half_width) {
  NnGeometry g;
  g.gap = rexp(rng, lambda);
  for (double s = rexp(rng, lambda); s <= half_width; s += rexp(rng, lambda))
    g.dist.push_back(s);  // beyond the receiver
  for (double s = rexp(rng, lambda); s <= half_width; s += rexp(rng, lambda))
    g.dist.push_back(s + g.gap);  // behind the transmitter
  return g;
}

}  // namespace

Estimate estimate_capture_nn(const PoissonRouteConfig& cfg, CaptureMode mode, std::uint64_t n,
                             SimWindow window, RngSeed seed) {
  check(cfg);
  if (n < 1) throw std::invalid_argument("estimate_capture_nn: n must be >= 1");
  const double hw = route_half_width(window, cfg.lambda);
  const double p = cfg.mac.p;
  const auto vals = parallel_map(n, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    const NnGeometry g = sample_nn_geometry(rng, cfg.lambda, hw);
    if (mode == CaptureMode::semi_analytic) {
      double v = p * (1.0 - p) * noise_factor(g.gap, cfg.ch);
      for (double d : g.dist) v *= interference_factor(d, g.gap, p, cfg.ch);
      return v;
    }
    const bool tx_on = rbernoulli(rng, p);
    const bool rx_on = rbernoulli(rng, p);
    double interference = 0.0;
    for (double d : g.dist)
      if (rbernoulli(rng, p)) interference += rfade(rng) / path_loss(d, cfg.ch);
    const double signal = rfade(rng) / path_loss(g.gap, cfg.ch);
    const bool ok = tx_on && !rx_on && signal >= cfg.ch.T * (cfg.ch.W + interference);
    return ok ? 1.0 : 0.0;
  });
  return reduce_estimate(vals);
}

Estimate estimate_capture_nr(const PoissonRouteConfig& cfg, CaptureMode mode, std::uint64_t n,
                             SimWindow window, RngSeed seed) {
  check(cfg);
  if (n < 1) throw std::invalid_argument("estimate_capture_nr: n must be >= 1");
  const double hw = route_half_width(window, cfg.lambda);
  const double p = cfg.mac.p;
  const auto vals = parallel_map(n, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    if (mode == CaptureMode::semi_analytic) {
      if (p <= 0.0 || p >= 1.0) return 0.0;
      // Gap to the nearest listener; transmitting interferers are the
      // MAC-thinned route on both sides of the receiver, gap included.
      const double gap = rexp(rng, cfg.lambda * (1.0 - p));
      double v = p * noise_factor(gap, cfg.ch);
      const long m = rpoisson(rng, cfg.lambda * p * 2.0 * hw);
      for (long k = 0; k < m; ++k) {
        const double d = std::abs((2.0 * runif(rng) - 1.0) * hw);
        v *= sure_interference_factor(d, gap, cfg.ch);
      }
      return v;
    }
    const Route1D route = sample_poisson_route(cfg.lambda, hw, rng);
    const bool tx_on = rbernoulli(rng, p);
    std::vector<bool> on(route.size());
    for (std::size_t k = 0; k < route.size(); ++k) on[k] = rbernoulli(rng, p);
    std::ptrdiff_t rx_idx = -1;
    for (std::size_t k = 0; k < route.size(); ++k) {
      if (route[k] > 0.0 && !on[k]) {
        rx_idx = static_cast<std::ptrdiff_t>(k);
        break;
      }
    }
    if (!tx_on || rx_idx < 0) return 0.0;
    const double rx = route[static_cast<std::size_t>(rx_idx)];
    double interference = 0.0;
    for (std::size_t k = 0; k < route.size(); ++k) {
      if (static_cast<std::ptrdiff_t>(k) == rx_idx || !on[k]) continue;
      interference += rfade(rng) / path_loss(std::abs(route[k] - rx), cfg.ch);
    }
    const double signal = rfade(rng) / path_loss(rx, cfg.ch);
    return signal >= cfg.ch.T * (cfg.ch.W + interference) ? 1.0 : 0.0;
  });
  return reduce_estimate(vals);
}

DelayEstimate estimate_mean_local_delay(const PoissonRouteConfig& cfg, const InterfererSpec& ifs,
                                        std::uint64_t n, SimWindow window, RngSeed seed) {
  check(cfg);
  check(ifs);
  if (n < 1) throw std::invalid_argument("estimate_mean_local_delay: n must be >= 1");
  const double p = cfg.mac.p;
  const double lambda = cfg.lambda;
  if (p <= 0.0 || p >= 1.0)
    return reduce_delay(std::vector<double>(n, kInf));  // the hop never succeeds

  // Importance sampling. The per-gap mean of the delay value grows like
  // exp(lambda r g1), so the gap proposal mixes Exp(lambda) with an
  // exponential matched to the surviving decay rate (floored at lambda/40 so
  // supercritical runs still reach the heavy region), plus a component aimed
  // at the ambient-noise turnover radius when W > 0. The route is sampled
  // with the tilted intensity lambda*h^{-alpha}, which moves most of the
  // product into a deterministic exponent and keeps the sample variance near
  // the acceptance thresholds' comfort zone.
  const double g1 = tilt_constant(1.0, p, cfg.ch);
  const double alpha = g1 < 1.0 ? 0.8 : 0.0;
  const double g_alpha = alpha > 0.0 ? tilt_constant(alpha, p, cfg.ch) : 0.0;
  const double survive = std::min(std::max(1.0 - g1, 0.025), 1.0);
  double weights[3] = {0.5, 0.5, 0.0};
  double rates[3] = {lambda, lambda * survive, 1.0};
  int n_comp = 2;
  if (cfg.ch.W > 0.0) {
    const double turnover =
        std::pow(survive * lambda / (cfg.ch.T * cfg.ch.W * std::pow(cfg.ch.A, cfg.ch.beta)),
                 1.0 / (cfg.ch.beta - 1.0));
    weights[0] = 0.5;
    weights[1] = 0.3;
    weights[2] = 0.2;
    rates[2] = std::min(rates[1], 1.0 / turnover);
    n_comp = 3;
  }
  const double base_hw = route_half_width(window, lambda);
  const double envelope = lambda * std::pow(1.0 - p, -alpha);
  const double log_mac = std::log(p * (1.0 - p));

  const auto vals = parallel_map(n, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    const double u = runif(rng);
    int comp = 0;
    double acc = 0.0;
    for (int c = 0; c < n_comp; ++c) {
      acc += weights[c];
      if (u <= acc) {
        comp = c;
        break;
      }
      comp = c;
    }
    const double gap = rexp(rng, rates[comp]);
    double q = 0.0;
    for (int c = 0; c < n_comp; ++c)
      q += weights[c] * rates[c] * std::exp(-std::min(rates[c] * gap, 700.0));
    const double log_w = std::log(lambda) - lambda * gap - std::log(q);
    const double eta = cfg.ch.T * cfg.ch.W * std::pow(cfg.ch.A * gap, cfg.ch.beta);
    // The route product and tilt exponent are >= 0, so the value is already
    // certain to overflow; skip the geometry.
    if (log_w + eta - log_mac > kLogMax) return kInf;
    const double hw = window.half_width_1d > 0.0
                          ? window.half_width_1d
                          : adaptive_route_half_width(base_hw, lambda, p, gap, cfg.ch);
    double log_v = eta + lambda * gap * g_alpha;
    for (int side = 0; side < 2; ++side) {
      const long m = rpoisson(rng, envelope * hw);
      for (long k = 0; k < m; ++k) {
        const double d = runif(rng) * hw + (side == 0 ? 0.0 : gap);
        const double h = interference_factor(d, gap, p, cfg.ch);
        const double accept = runif(rng);
        if (accept <= std::pow((1.0 - p) / h, alpha)) log_v -= (1.0 - alpha) * std::log(h);
      }
    }
    log_v += field_log_factors(rng, ifs, window, std::max(1.0 / lambda, gap), gap,
                               cfg.mac.p_prime, cfg.ch);
    const double total = log_w + log_v - log_mac;
    return total < kLogMax ? std::exp(total) : kInf;
  });
  return reduce_delay(vals);
}

Estimate simulate_end_to_end(double m, const PoissonRouteConfig& cfg, const InterfererSpec& ifs,
                             std::uint64_t n, SimWindow window, RngSeed seed) {
  check(cfg);
  check(ifs);
  if (!(m > 0.0)) throw std::invalid_argument("simulate_end_to_end: m must be > 0");
  if (n < 1) throw std::invalid_argument("simulate_end_to_end: n must be >= 1");
  const double hw = route_half_width(window, cfg.lambda);
  const double p = cfg.mac.p;
  const double field_margin = field_half_width(window, 1.0 / cfg.lambda, 1.0 / cfg.lambda, cfg.ch);
  const double intensity =
      ifs.kind == InterfererKind::poisson_field ? ifs.mu : ifs.nu * ifs.lambda_prime;
  const auto vals = parallel_map(n, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    std::vector<double> pts{0.0, m};
    const long extra = rpoisson(rng, cfg.lambda * (m + 2.0 * hw));
    pts.reserve(static_cast<std::size_t>(extra) + 2);
    for (long k = 0; k < extra; ++k) pts.push_back(-hw + runif(rng) * (m + 2.0 * hw));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    // Field centered on the route midpoint, wide enough to cover every hop's
    // own field window.
    Interferers2D field;
    if (ifs.kind != InterfererKind::none && intensity > 0.0) {
      const double fhw = m / 2.0 + field_margin;
      field = ifs.kind == InterfererKind::poisson_field
                  ? sample_poisson_field(ifs.mu, fhw, rng)
                  : sample_poisson_line_field(ifs.nu, ifs.lambda_prime, fhw, rng);
      for (Point2& q : field) q.x += m / 2.0;
      std::sort(field.begin(), field.end(),
                [](const Point2& a, const Point2& b) { return a.x < b.x; });
    }

    const std::size_t i0 = static_cast<std::size_t>(
        std::lower_bound(pts.begin(), pts.end(), 0.0) - pts.begin());
    double delay = 0.0;
    for (std::size_t k = i0; pts[k] < m; ++k) {
      const double rx = pts[k + 1];
      const double r = rx - pts[k];
      double cap = p * (1.0 - p) * noise_factor(r, cfg.ch) *
                   sorted_route_product(pts, k, k + 1, rx, r, hw, p, cfg.ch);
      if (!field.empty()) {
        const double rf = field_half_width(window, 1.0 / cfg.lambda, r, cfg.ch);
        const auto lo = std::lower_bound(field.begin(), field.end(), rx - rf,
                                         [](const Point2& a, double x) { return a.x < x; });
        for (auto it = lo; it != field.end() && it->x <= rx + rf; ++it)
          cap *= interference_factor(std::hypot(it->x - rx, it->y), r, cfg.mac.p_prime, cfg.ch);
      }
      delay += 1.0 / cap;
    }
    return delay;
  });
  return reduce_estimate(vals);
}

Estimate simulate_long_distance_speed(const PoissonRouteConfig& cfg, std::uint64_t k_hops,
                                      std::uint64_t n_routes, SimWindow window, RngSeed seed) {
  check(cfg);
  if (k_hops < 1) throw std::invalid_argument("simulate_long_distance_speed: k_hops must be >= 1");
  if (n_routes < 1)
    throw std::invalid_argument("simulate_long_distance_speed: n_routes must be >= 1");
  const double hw = route_half_width(window, cfg.lambda);
  const double p = cfg.mac.p;
  const auto vals = parallel_map(n_routes, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    std::vector<double> pts;
    pts.reserve(k_hops + static_cast<std::size_t>(2.2 * hw * cfg.lambda) + 4);
    for (double s = rexp(rng, cfg.lambda); s <= hw; s += rexp(rng, cfg.lambda))
      pts.push_back(-s);  // behind the source
    std::reverse(pts.begin(), pts.end());
    pts.push_back(0.0);
    const std::size_t i0 = pts.size() - 1;
    double x = 0.0;
    for (std::uint64_t k = 0; k < k_hops; ++k) {
      x += rexp(rng, cfg.lambda);
      pts.push_back(x);
    }
    const double x_end = x;
    for (double s = x_end + rexp(rng, cfg.lambda); s <= x_end + hw; s += rexp(rng, cfg.lambda))
      pts.push_back(s);
    double delay = 0.0;
    for (std::size_t k = i0; k < i0 + k_hops; ++k) {
      const double rx = pts[k + 1];
      const double r = rx - pts[k];
      const double cap = p * (1.0 - p) * noise_factor(r, cfg.ch) *
                         sorted_route_product(pts, k, k + 1, rx, r, hw, p, cfg.ch);
      delay += 1.0 / cap;
    }
    return std::isfinite(delay) ? x_end / delay : 0.0;
  });
  return reduce_estimate(vals);
}

DelayEstimate simulate_lattice_local_delay(const LatticeRouteConfig& cfg,
                                           const InterfererSpec& ifs, std::uint64_t n,
                                           SimWindow window, RngSeed seed) {
  check(cfg);
  check(ifs);
  if (n < 1) throw std::invalid_argument("simulate_lattice_local_delay: n must be >= 1");
  const double p = cfg.base.mac.p;
  const double lambda = cfg.base.lambda;
  const ChannelConfig& ch = cfg.base.ch;
  if (p <= 0.0 || p >= 1.0) return reduce_delay(std::vector<double>(n, kInf));
  const double eps = 1.0 / cfg.delta;
  const double weight_route = lambda / (lambda + eps);
  const double base_hw = route_half_width(window, lambda);
  const double log_mac = std::log(p * (1.0 - p));

  const auto vals = parallel_map(n, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    const bool from_route = runif(rng) <= weight_route;
    // Grid node positions are phase + j*delta; the typical grid node sits at
    // the origin with phase 0 and is excluded from its own interferers.
    const double phase = from_route ? cfg.delta * runif(rng) : 0.0;
    const double first_gap = rexp(rng, lambda);
    const double grid_right = from_route ? phase : cfg.delta;
    const double gap = std::min(first_gap, grid_right);
    const double hw = window.half_width_1d > 0.0
                          ? window.half_width_1d
                          : adaptive_route_half_width(base_hw, lambda, p, gap, ch);
    double log_v = ch.T * ch.W * std::pow(ch.A * gap, ch.beta);
    // Route interferers: either side of the transmitter, receiver excluded.
    if (first_gap <= hw && first_gap != gap)
      log_v -= std::log(interference_factor(first_gap - gap, gap, p, ch));
    for (double s = first_gap + rexp(rng, lambda); s <= hw; s += rexp(rng, lambda))
      log_v -= std::log(interference_factor(s - gap, gap, p, ch));
    for (double s = rexp(rng, lambda); s <= hw; s += rexp(rng, lambda))
      log_v -= std::log(interference_factor(s + gap, gap, p, ch));
    // Grid interferers on both sides, the receiver (if it is the grid node)
    // and the typical grid transmitter excluded.
    for (double x = grid_right; x <= gap + hw; x += cfg.delta)
      if (x != gap) log_v -= std::log(interference_factor(x - gap, gap, p, ch));
    for (double x = grid_right - cfg.delta; x >= -hw; x -= cfg.delta)
      if (x != 0.0) log_v -= std::log(interference_factor(x - gap, gap, p, ch));
    log_v += field_log_factors(rng, ifs, window, std::max(1.0 / lambda, gap), gap,
                               cfg.base.mac.p_prime, ch);
    const double total = log_v - log_mac;
    return total < kLogMax ? std::exp(total) : kInf;
  });
  return reduce_delay(vals);
}

Estimate estimate_capture_field(double r, const InterfererSpec& ifs, const MacConfig& mac,
                                const ChannelConfig& ch, std::uint64_t n, SimWindow window,
                                RngSeed seed) {
  check(ch);
  check(mac);
  check(ifs);
  if (!(r > 0.0)) throw std::invalid_argument("estimate_capture_field: r must be > 0");
  if (n < 1) throw std::invalid_argument("estimate_capture_field: n must be >= 1");
  const double hw = field_half_width(window, r, r, ch);
  const double base = mac.p * (1.0 - mac.p) * noise_factor(r, ch);
  const auto vals = parallel_map(n, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    double v = base;
    if (ifs.kind != InterfererKind::none) {
      const Interferers2D pts = ifs.kind == InterfererKind::poisson_field
                                    ? sample_poisson_field(ifs.mu, hw, rng)
                                    : sample_poisson_line_field(ifs.nu, ifs.lambda_prime, hw, rng);
      for (const Point2& q : pts)
        v *= interference_factor(std::hypot(q.x, q.y), r, mac.p_prime, ch);
    }
    return v;
  });
  return reduce_estimate(vals);
}

Estimate estimate_field_delay_factor(double r, const InterfererSpec& ifs, const MacConfig& mac,
                                     const ChannelConfig& ch, std::uint64_t n, SimWindow window,
                                     RngSeed seed) {
  check(ch);
  check(mac);
  check(ifs);
  if (!(r > 0.0)) throw std::invalid_argument("estimate_field_delay_factor: r must be > 0");
  if (n < 1) throw std::invalid_argument("estimate_field_delay_factor: n must be >= 1");
  const auto vals = parallel_map(n, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    return std::exp(field_log_factors(rng, ifs, window, r, r, mac.p_prime, ch));
  });
  return reduce_estimate(vals);
}

Estimate slot_capture_frequency(Point2 tx, Point2 rx, const Interferers2D& interferers,
                                const MacConfig& mac, const ChannelConfig& ch,
                                std::uint64_t n_slots, RngSeed seed) {
  check(ch);
  check(mac);
  if (n_slots < 1) throw std::invalid_argument("slot_capture_frequency: n_slots must be >= 1");
  const double r = std::hypot(tx.x - rx.x, tx.y - rx.y);
  if (!(r > 0.0))
    throw std::invalid_argument("slot_capture_frequency: tx and rx must be distinct");
  std::vector<double> inv_loss(interferers.size());
  for (std::size_t k = 0; k < interferers.size(); ++k)
    inv_loss[k] = 1.0 / path_loss(std::hypot(interferers[k].x - rx.x, interferers[k].y - rx.y), ch);
  const double sig_loss = path_loss(r, ch);
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (n_slots + kChunk - 1) / kChunk;
  const auto counts = parallel_map(chunks, [&](std::size_t c) {
    auto rng = substream(seed.value, c);
    const std::uint64_t lo = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t hi = std::min(n_slots, lo + kChunk);
    std::uint64_t ok = 0;
    for (std::uint64_t s = lo; s < hi; ++s) {
      const bool tx_on = rbernoulli(rng, mac.p);
      const bool rx_on = rbernoulli(rng, mac.p);
      double interference = 0.0;
      for (double il : inv_loss)
        if (rbernoulli(rng, mac.p)) interference += rfade(rng) * il;
      const double signal = rfade(rng) / sig_loss;
      if (tx_on && !rx_on && signal >= ch.T * (ch.W + interference)) ++ok;
    }
    return ok;
  });
  std::uint64_t ok = 0;
  for (std::uint64_t c : counts) ok += c;
  Estimate e;
  e.n = n_slots;
  e.mean = static_cast<double>(ok) / static_cast<double>(n_slots);
  e.std_error = n_slots > 1 ? std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n_slots - 1))
                            : 0.0;
  return e;
}

SlotDelayEstimate slot_local_delay(Point2 tx, Point2 rx, const Interferers2D& interferers,
                                   const MacConfig& mac, const ChannelConfig& ch, std::uint64_t n,
                                   RngSeed seed) {
  check(ch);
  check(mac);
  if (n < 1) throw std::invalid_argument("slot_local_delay: n must be >= 1");
  const double r = std::hypot(tx.x - rx.x, tx.y - rx.y);
  if (!(r > 0.0)) throw std::invalid_argument("slot_local_delay: tx and rx must be distinct");
  std::vector<double> inv_loss(interferers.size());
  for (std::size_t k = 0; k < interferers.size(); ++k)
    inv_loss[k] = 1.0 / path_loss(std::hypot(interferers[k].x - rx.x, interferers[k].y - rx.y), ch);
  const double sig_loss = path_loss(r, ch);
  struct Rep {
    double slots;
    bool censored;
  };
  const auto reps = parallel_map(n, [&](std::size_t i) {
    auto rng = substream(seed.value, i);
    for (std::uint64_t s = 1; s <= kSlotCap; ++s) {
      const bool tx_on = rbernoulli(rng, mac.p);
      const bool rx_on = rbernoulli(rng, mac.p);
      double interference = 0.0;
      for (double il : inv_loss)
        if (rbernoulli(rng, mac.p)) interference += rfade(rng) * il;
      const double signal = rfade(rng) / sig_loss;
      if (tx_on && !rx_on && signal >= ch.T * (ch.W + interference))
        return Rep{static_cast<double>(s), false};
    }
    return Rep{static_cast<double>(kSlotCap), true};
  });
  std::vector<double> vals(n);
  SlotDelayEstimate out;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    vals[i] = reps[i].slots;
    if (reps[i].censored) ++out.censored;
  }
  out.est = reduce_estimate(vals);
  return out;
}

}  // namespace alohar::mc
