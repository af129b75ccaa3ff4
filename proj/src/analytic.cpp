#include "alohar/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "alohar/sinr.hpp"

namespace alohar {

namespace {

// Tolerances pinned here, not taken from callers, so memoized values are
// independent of call sites.
const num::Tolerance kConstTol{1e-12, 1e-15, 2000};

double tail_integral_impl(double a, double beta, double offset) {
  return num::integrate_semi_infinite(
      [beta, offset](double u) { return 1.0 / (std::pow(u, beta) + offset); }, a, kConstTol);
}

// Process-wide memo of the delay constant, keyed by the exact parameter
// triple. Shared reads, exclusive inserts; recomputation on a race is
// harmless because the value is deterministic.
double delay_constant_impl(double p, double T, double beta) {
  using Key = std::tuple<double, double, double>;
  static std::shared_mutex mu;
  static std::map<Key, double> cache;
  const Key key{p, T, beta};
  {
    std::shared_lock lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double tinv = std::pow(T, -1.0 / beta);
  const double value = std::pow(T, 1.0 / beta) *
                       (tail_integral_impl(tinv, beta, 1.0 - p) + tail_integral_impl(0.0, beta, 1.0 - p));
  std::unique_lock lk(mu);
  cache.emplace(key, value);
  return value;
}

double logistic_gap_exponent(const PoissonRouteConfig& cfg) {
  return cfg.lambda * cfg.mac.p * delay_constant_impl(cfg.mac.p, cfg.ch.T, cfg.ch.beta);
}

double log_interference_factor_inv(double s, double r, double p, const ChannelConfig& ch) {
  return -std::log(interference_factor(s, r, p, ch));
}

// Uniform-grid cubic Hermite interpolant with centered-difference slopes.
class CubicTable {
 public:
  CubicTable() = default;
  CubicTable(double x0, double x1, std::vector<double> ys) : x0_(x0), ys_(std::move(ys)) {
    const std::size_t n = ys_.size();
    if (n < 2 || !(x1 > x0)) throw std::invalid_argument("CubicTable: need >= 2 nodes, x1 > x0");
    dx_ = (x1 - x0) / static_cast<double>(n - 1);
    ms_.resize(n);
    ms_[0] = (ys_[1] - ys_[0]) / dx_;
    ms_[n - 1] = (ys_[n - 1] - ys_[n - 2]) / dx_;
    for (std::size_t i = 1; i + 1 < n; ++i) ms_[i] = (ys_[i + 1] - ys_[i - 1]) / (2.0 * dx_);
  }

  double operator()(double x) const {
    const std::size_t n = ys_.size();
    double t = (x - x0_) / dx_;
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (t <= 0.0) return ys_[0];
    if (t >= static_cast<double>(n - 1)) return ys_[n - 1];
    const std::size_t i = static_cast<std::size_t>(t);
    t -= static_cast<double>(i);
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * ys_[i] + h10 * dx_ * ms_[i] + h01 * ys_[i + 1] + h11 * dx_ * ms_[i + 1];
  }

  bool empty() const { return ys_.empty(); }

 private:
  double x0_ = 0.0, dx_ = 1.0;
  std::vector<double> ys_, ms_;
};

// Log of the per-hop mean-delay kernel over hop length r: the Poisson-gap
// inflation exp(lambda p D1 r), the external-field inflation, and the noise
// inflation exp(T W (A r)^beta). Composed in log space so cliff regimes
// overflow to +inf only at the final exp.
class HopKernel {
 public:
  HopKernel(const PoissonRouteConfig& cfg, const InterfererSpec& ifs, double max_r,
            num::Tolerance tol)
      : gap_rate_(logistic_gap_exponent(cfg)),
        noise_rate_(cfg.ch.T * cfg.ch.W * std::pow(cfg.ch.A, cfg.ch.beta)),
        beta_(cfg.ch.beta),
        kind_(ifs.kind) {
    check(ifs);
    const double pp = cfg.mac.p_prime;
    if (kind_ == InterfererKind::poisson_field) {
      if (ifs.mu == 0.0 || pp == 0.0) {
        kind_ = InterfererKind::none;
      } else {
        // log of the closed-form field inflation is quadratic in r.
        field_quad_ = std::log(expected_delay_factor_poisson_field(1.0, ifs.mu, {0.0, pp}, cfg.ch));
      }
    } else if (kind_ == InterfererKind::poisson_line) {
      if (ifs.nu == 0.0 || ifs.lambda_prime == 0.0 || pp == 0.0) {
        kind_ = InterfererKind::none;
      } else {
        build_line_table(cfg, ifs, max_r, tol);
      }
    }
  }

  double log_gap(double r) const { return gap_rate_ * r; }
  double log_noise(double r) const { return noise_rate_ * std::pow(r, beta_); }
  double log_field(double r) const {
    switch (kind_) {
      case InterfererKind::none:
        return 0.0;
      case InterfererKind::poisson_field:
        return field_quad_ * r * r;
      case InterfererKind::poisson_line:
        return line_table_(r);
    }
    return 0.0;
  }
  double log_value(double r) const { return log_gap(r) + log_field(r) + log_noise(r); }

 private:
  void build_line_table(const PoissonRouteConfig& cfg, const InterfererSpec& ifs, double max_r,
                        num::Tolerance tol) {
    const double beta = cfg.ch.beta, T = cfg.ch.T, pp = cfg.mac.p_prime;
    // Per-line expected -log factor as a function of the scaled line offset,
    // tabulated once on the compactified axis x = s/(1+s). The integral decays
    // like s^(1-beta), so the table stores it scaled by (1+s)^(beta-1): the
    // stored function is bounded up to the far edge (exact limit at x = 1) and
    // lookups multiply the tail back. Interpolating the raw values instead
    // leaves a knot-spacing error that the outer transform amplifies into a
    // spurious slow tail, which the quadrature then chases past double
    // resolution.
    const int n_inner = 513;
    std::vector<double> inner(n_inner);
    for (int i = 0; i < n_inner; ++i) {
      const double x = static_cast<double>(i) / (n_inner - 1);
      if (x >= 1.0) {
        const double pi = std::acos(-1.0);
        inner[i] = pp * T * 0.5 * std::sqrt(pi) *
                   std::exp(std::lgamma(0.5 * (beta - 1.0)) - std::lgamma(0.5 * beta));
        continue;
      }
      const double s = x / (1.0 - x);
      inner[i] = std::pow(1.0 + s, beta - 1.0) *
                 num::integrate_semi_infinite(
                     [&](double t) { return pp / (std::pow(s * s + t * t, 0.5 * beta) / T + 1.0 - pp); },
                     0.0, tol);
    }
    CubicTable inner_table(0.0, 1.0, std::move(inner));
    const int n_r = 513;
    std::vector<double> logs(n_r);
    for (int i = 0; i < n_r; ++i) {
      const double r = max_r * static_cast<double>(i) / (n_r - 1);
      if (r == 0.0) {
        logs[i] = 0.0;
        continue;
      }
      const double outer = num::integrate_semi_infinite(
          [&](double s) {
            if (!std::isfinite(s)) return 0.0;
            const double om = 1.0 / (1.0 + s);
            return std::expm1(2.0 * ifs.lambda_prime * r * inner_table(s * om) *
                              std::pow(om, beta - 1.0));
          },
          0.0, tol);
      // A clamped log still overflows to +inf at the final exp; the clamp only
      // keeps the interpolant free of inf - inf.
      logs[i] = std::min(2.0 * ifs.nu * r * outer, 1e300);
    }
    line_table_ = CubicTable(0.0, max_r, std::move(logs));
  }

  double gap_rate_;
  double noise_rate_;
  double beta_;
  InterfererKind kind_;
  double field_quad_ = 0.0;
  CubicTable line_table_;
};

}  // namespace

ShapeConstants::ShapeConstants(const ChannelConfig& ch) : ch_(ch) {
  check(ch);
  const double beta = ch.beta, T = ch.T;
  const double tscale = std::pow(T, 1.0 / beta);
  const double full = tail_integral_impl(0.0, beta, 1.0);
  const double from_tinv = tail_integral_impl(1.0 / tscale, beta, 1.0);
  c_nn_ = tscale * (from_tinv + full);
  c_nr_ = 2.0 * tscale * full;
}

double ShapeConstants::tail_integral(double a) const {
  if (!(a >= 0.0)) throw std::invalid_argument("tail_integral: a must be >= 0");
  return tail_integral_impl(a, ch_.beta, 1.0);
}

double ShapeConstants::delay_constant(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("delay_constant: needs p in [0,1)");
  return delay_constant_impl(p, ch_.T, ch_.beta);
}

double capture_nn(const PoissonRouteConfig& cfg) {
  check(cfg);
  if (cfg.ch.W > 0.0) return capture_nn_noise(cfg, constant_noise_laplace(cfg.ch.W));
  const ShapeConstants sc(cfg.ch);
  const double p = cfg.mac.p;
  return (1.0 - p) / (1.0 + p * sc.nn_constant());
}

double capture_nr(const PoissonRouteConfig& cfg) {
  check(cfg);
  const ShapeConstants sc(cfg.ch);
  const double p = cfg.mac.p;
  if (cfg.ch.W == 0.0) return (1.0 - p) / (1.0 + p * (sc.nr_constant() - 1.0));
  // Same exponential-gap average as the noiseless case, with the noise factor
  // under the integral; the receiver gap has rate lambda(1-p).
  const double lam = cfg.lambda;
  const double rate = lam * (1.0 - p) + lam * p * sc.nr_constant();
  const double noise_rate = cfg.ch.T * cfg.ch.W * std::pow(cfg.ch.A, cfg.ch.beta);
  const double beta = cfg.ch.beta;
  const double integral = num::integrate_semi_infinite(
      [&](double r) { return std::exp(-rate * r - noise_rate * std::pow(r, beta)); }, 0.0,
      num::Tolerance{1e-12, 1e-16, 2000});
  return lam * (1.0 - p) * integral;
}

NoiseLaplace constant_noise_laplace(double w) {
  if (!(w >= 0.0)) throw std::invalid_argument("constant_noise_laplace: W must be >= 0");
  return [w](double, double theta) { return std::exp(-theta * w); };
}

double capture_nn_noise(const PoissonRouteConfig& cfg, const NoiseLaplace& noise,
                        num::Tolerance tol) {
  check(cfg);
  if (!noise) throw std::invalid_argument("capture_nn_noise: empty noise law");
  const ShapeConstants sc(cfg.ch);
  const double p = cfg.mac.p;
  const double lam = cfg.lambda;
  const double rate = lam * (1.0 + p * sc.nn_constant());
  const double beta = cfg.ch.beta, T = cfg.ch.T, A = cfg.ch.A;
  const double integral = num::integrate_semi_infinite(
      [&](double r) { return std::exp(-rate * r) * noise(r, T * std::pow(A * r, beta)); }, 0.0, tol);
  return lam * (1.0 - p) * integral;
}

ExtendedDelay mean_local_delay_nn(const PoissonRouteConfig& cfg) {
  check(cfg);
  const double p = cfg.mac.p;
  if (p <= 0.0 || p >= 1.0) return ExtendedDelay::infinite();
  if (cfg.ch.W > 0.0) return ExtendedDelay::infinite();
  const double pd = p * delay_constant_impl(p, cfg.ch.T, cfg.ch.beta);
  if (pd >= 1.0) return ExtendedDelay::infinite();
  return {1.0 / (p * (1.0 - p) * (1.0 - pd))};
}

std::optional<double> critical_p(const ChannelConfig& ch, num::Tolerance tol) {
  check(ch);
  auto excess = [&](double p) { return p * delay_constant_impl(p, ch.T, ch.beta) - 1.0; };
  const double lo = 1e-12, hi = 1.0 - 1e-12;
  if (!(excess(hi) > 0.0)) return std::nullopt;
  if (!(excess(lo) < 0.0)) return lo;
  return num::find_root(excess, {lo, hi}, tol);
}

double long_distance_speed(const PoissonRouteConfig& cfg) {
  check(cfg);
  const ExtendedDelay d = mean_local_delay_nn(cfg);
  if (!d.is_finite()) return 0.0;
  return 1.0 / (cfg.lambda * d.slots);
}

double density_of_progress(const PoissonRouteConfig& cfg) {
  check(cfg);
  const ShapeConstants sc(cfg.ch);
  const double p = cfg.mac.p;
  const double denom = 1.0 + p * sc.nn_constant();
  return p * (1.0 - p) / (denom * denom);
}

SpeedOptimum optimize_speed(const PoissonRouteConfig& cfg, num::Tolerance tol) {
  check(cfg);
  PoissonRouteConfig probe = cfg;
  auto speed_at = [&probe](double p) {
    probe.mac.p = p;
    return long_distance_speed(probe);
  };
  double hi = 1.0 - 1e-9;
  if (auto pc = critical_p(cfg.ch)) hi = std::min(hi, *pc - 1e-9);
  const num::Peak peak = num::maximize_unimodal(speed_at, {1e-9, hi}, tol);
  return {peak.argmax, peak.max};
}

ProgressOptimum optimize_progress_density(const PoissonRouteConfig& cfg, num::Tolerance tol) {
  check(cfg);
  const ShapeConstants sc(cfg.ch);
  const double c = sc.nn_constant();
  PoissonRouteConfig probe = cfg;
  auto density_at = [&probe](double p) {
    probe.mac.p = p;
    return density_of_progress(probe);
  };
  const num::Peak peak = num::maximize_unimodal(density_at, {1e-9, 1.0 - 1e-9}, tol);
  ProgressOptimum out;
  out.p = peak.argmax;
  out.density = peak.max;
  out.p_stationary = 1.0 / (2.0 + c);
  out.p_alternate = (c + 1.0 - std::sqrt(c * c - 1.0)) / (2.0 * c);
  out.density_alternate = density_at(out.p_alternate);
  return out;
}

ExtendedDelay end_to_end_delay(double m, const PoissonRouteConfig& cfg, const InterfererSpec& ifs,
                               num::Tolerance tol) {
  check(cfg);
  check(ifs);
  if (!(m > 0.0)) throw std::invalid_argument("end_to_end_delay: M must be > 0");
  const double p = cfg.mac.p;
  if (p <= 0.0 || p >= 1.0) return ExtendedDelay::infinite();
  const double lam = cfg.lambda;
  const HopKernel kernel(cfg, ifs, m, tol);
  const ChannelConfig& ch = cfg.ch;
  auto log_hinv = [&](double s, double r) { return log_interference_factor_inv(s, r, p, ch); };
  const double log_lam = std::log(lam);

  // Origin-to-destination hop when no relay landed between them.
  const double term_direct = std::exp(-lam * m + kernel.log_value(m));
  // First hop out of the origin, corrected for the destination node at M.
  const double term_first = num::integrate_finite(
      [&](double r) { return std::exp(log_lam - lam * r + kernel.log_value(r) + log_hinv(m - r, r)); },
      0.0, m, tol);
  // Interior hops: relay at s (route averaging over s), corrected for both
  // endpoint nodes.
  const double term_interior = num::integrate_finite(
      [&](double s) {
        const double inner = num::integrate_finite(
            [&](double r) {
              return std::exp(log_lam - lam * r + kernel.log_value(r) + log_hinv(s + r, r) +
                              log_hinv(m - s - r, r));
            },
            0.0, m - s, tol);
        return lam * inner;
      },
      0.0, m, tol);
  // Final hop into the destination, corrected for the origin node at 0.
  const double term_last = num::integrate_finite(
      [&](double s) {
        const double r = m - s;
        return std::exp(log_lam - lam * r + kernel.log_value(r) + log_hinv(m, r));
      },
      0.0, m, tol);

  const double sum = term_direct + term_first + term_interior + term_last;
  if (std::isinf(sum)) return ExtendedDelay::infinite();
  return {sum / (p * (1.0 - p))};
}

double end_to_end_speed(double m, const PoissonRouteConfig& cfg, const InterfererSpec& ifs,
                        num::Tolerance tol) {
  const ExtendedDelay d = end_to_end_delay(m, cfg, ifs, tol);
  if (!d.is_finite()) return 0.0;
  return m / d.slots;
}

namespace {

// Sum over the grid nodes n*delta + a, n != 0, of -log of the interference
// factor at the receiver of a hop of length r.
double grid_log_sum(double a, double r, double delta, double p, const ChannelConfig& ch,
                    num::Tolerance tol) {
  if (p == 0.0) return 0.0;
  const auto sum = num::lattice_log_sum(
      [&](long n) {
        return log_interference_factor_inv(static_cast<double>(n) * delta + a, r, p, ch);
      },
      tol, ch.beta);
  return sum.value;
}

}  // namespace

LatticeDelayTerms lattice_delay_terms(const LatticeRouteConfig& cfg, const InterfererSpec& ifs,
                                      LatticeTermMode mode, num::Tolerance tol) {
  check(cfg);
  check(ifs);
  const double lam = cfg.base.lambda;
  const double delta = cfg.delta;
  const double eps = 1.0 / delta;
  const double p = cfg.base.mac.p;
  const ChannelConfig& ch = cfg.base.ch;
  LatticeDelayTerms out;
  out.weight_route = lam / (lam + eps);
  out.weight_grid = eps / (lam + eps);
  if (p <= 0.0 || p >= 1.0) {
    out.mean_slots = std::numeric_limits<double>::infinity();
    return out;
  }
  const HopKernel kernel(cfg.base, ifs, delta, tol);
  const bool uniform = mode == LatticeTermMode::uniform;
  const num::Tolerance sum_tol{1e-8, 1e-9, 2000};
  const num::Tolerance quad_tol{std::max(tol.rel, 1e-7), tol.abs, tol.max_subdivisions};
  auto log_hinv = [&](double s, double r) { return log_interference_factor_inv(s, r, p, ch); };

  // Typical Poisson node; nearest forward node is the grid node at phase z.
  out.route_to_grid = num::integrate_finite(
      [&](double z) {
        const double logk = uniform ? kernel.log_value(z) : kernel.log_gap(z) + kernel.log_field(z);
        return std::exp(-lam * z + logk + grid_log_sum(0.0, z, delta, p, ch, sum_tol)) / delta;
      },
      0.0, delta, quad_tol);

  // Typical Poisson node; nearest forward node is a Poisson node at r, closer
  // than the grid node at z, which then interferes from distance z - r.
  out.route_to_route = num::integrate_finite(
      [&](double z) {
        const double inner = num::integrate_finite(
            [&](double r) {
              const double logk = uniform ? kernel.log_value(r) : kernel.log_gap(r);
              return std::exp(std::log(lam) - lam * r + logk +
                              grid_log_sum(z - r, r, delta, p, ch, sum_tol) + log_hinv(z - r, r));
            },
            0.0, z, quad_tol);
        return inner / delta;
      },
      0.0, delta, quad_tol);

  // Typical grid node; nearest forward node is a Poisson node at z < delta.
  out.grid_to_route = num::integrate_finite(
      [&](double z) {
        const double logk = uniform ? kernel.log_value(z) : kernel.log_gap(z);
        return std::exp(std::log(lam) - lam * z + logk +
                        grid_log_sum(-z, z, delta, p, ch, sum_tol));
      },
      0.0, delta, quad_tol);

  // Typical grid node; no Poisson node before the next grid node at delta,
  // whose own factor is removed from the grid sum (it is the receiver).
  {
    const double logk = uniform ? kernel.log_value(delta)
                                : kernel.log_gap(delta) + kernel.log_noise(delta);
    out.grid_to_grid = std::exp(-lam * delta + logk + grid_log_sum(0.0, delta, delta, p, ch, sum_tol) +
                                std::log(interference_factor(delta, delta, p, ch)));
  }

  const double combined = out.weight_route * (out.route_to_grid + out.route_to_route) +
                          out.weight_grid * (out.grid_to_route + out.grid_to_grid);
  out.mean_slots = combined / (p * (1.0 - p));
  return out;
}

ExtendedDelay lattice_mean_local_delay(const LatticeRouteConfig& cfg, const InterfererSpec& ifs,
                                       LatticeTermMode mode, num::Tolerance tol) {
  const LatticeDelayTerms terms = lattice_delay_terms(cfg, ifs, mode, tol);
  if (std::isinf(terms.mean_slots)) return ExtendedDelay::infinite();
  return {terms.mean_slots};
}

double lattice_speed(const LatticeRouteConfig& cfg, const InterfererSpec& ifs,
                     LatticeSpeedNorm norm, LatticeTermMode mode, num::Tolerance tol) {
  const ExtendedDelay d = lattice_mean_local_delay(cfg, ifs, mode, tol);
  if (!d.is_finite()) return 0.0;
  const double intensity =
      norm == LatticeSpeedNorm::combined ? cfg.base.lambda + 1.0 / cfg.delta : cfg.base.lambda;
  return 1.0 / (intensity * d.slots);
}

}  // namespace alohar
