#include "alohar/sinr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace alohar {

double path_loss(double r, const ChannelConfig& ch) {
  if (!(r >= 0.0)) throw std::invalid_argument("path_loss: r must be >= 0");
  return std::pow(ch.A * r, ch.beta);
}

double interference_factor(double s, double r, double p, const ChannelConfig& ch) {
  if (!(r > 0.0)) throw std::invalid_argument("interference_factor: r must be > 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("interference_factor: p must lie in [0,1]");
  const double ratio = std::abs(s) / r;
  return 1.0 - p / (std::pow(ratio, ch.beta) / ch.T + 1.0);
}

double sure_interference_factor(double s, double r, const ChannelConfig& ch) {
  if (!(r > 0.0)) throw std::invalid_argument("sure_interference_factor: r must be > 0");
  const double sa = std::abs(s);
  if (sa == 0.0) return 0.0;
  return 1.0 / (1.0 + ch.T * std::pow(r / sa, ch.beta));
}

double noise_factor(double r, const ChannelConfig& ch) {
  return std::exp(-ch.T * ch.W * path_loss(r, ch));
}

namespace {

double hop_success(double r, const Interferers2D& interferers, Point2 rx, const MacConfig& mac,
                   const ChannelConfig& ch) {
  double prob = mac.p * (1.0 - mac.p) * noise_factor(r, ch);
  for (const Point2& z : interferers) {
    const double s = std::hypot(z.x - rx.x, z.y - rx.y);
    prob *= interference_factor(s, r, mac.p, ch);
  }
  return prob;
}

}  // namespace

double capture_prob_fixed(Point2 tx, Point2 rx, const Interferers2D& interferers,
                          const MacConfig& mac, const ChannelConfig& ch) {
  check(mac);
  check(ch);
  const double r = std::hypot(rx.x - tx.x, rx.y - tx.y);
  if (!(r > 0.0)) throw std::invalid_argument("capture_prob_fixed: tx and rx coincide");
  return hop_success(r, interferers, rx, mac, ch);
}

ExtendedDelay local_delay_fixed(Point2 tx, Point2 rx, const Interferers2D& interferers,
                                const MacConfig& mac, const ChannelConfig& ch) {
  return ExtendedDelay::from_success_prob(capture_prob_fixed(tx, rx, interferers, mac, ch));
}

ExtendedDelay route_delay_fixed(const Route1D& route, const Interferers2D& interferers,
                                const MacConfig& mac, const ChannelConfig& ch) {
  check(mac);
  check(ch);
  if (route.size() < 2) throw std::invalid_argument("route_delay_fixed: route needs >= 2 nodes");
  for (std::size_t k = 0; k + 1 < route.size(); ++k)
    if (!(route[k] < route[k + 1]))
      throw std::invalid_argument("route_delay_fixed: route must be strictly increasing");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < route.size(); ++k) {
    const Point2 rx{route[k + 1], 0.0};
    const double r = route[k + 1] - route[k];
    double prob = hop_success(r, interferers, rx, mac, ch);
    for (std::size_t j = 0; j < route.size(); ++j) {
      if (j == k || j == k + 1) continue;
      prob *= interference_factor(route[j] - rx.x, r, mac.p, ch);
    }
    if (!(prob > 0.0)) return ExtendedDelay::infinite();
    total += 1.0 / prob;
  }
  return {total};
}

double route_speed_fixed(const Route1D& route, const Interferers2D& interferers,
                         const MacConfig& mac, const ChannelConfig& ch) {
  const ExtendedDelay d = route_delay_fixed(route, interferers, mac, ch);
  if (!d.is_finite()) return 0.0;
  return (route.back() - route.front()) / d.slots;
}

double expected_capture_poisson_field(double r, double mu, const MacConfig& mac,
                                      const ChannelConfig& ch, num::Tolerance tol) {
  check(mac);
  check(ch);
  if (!(r > 0.0)) throw std::invalid_argument("expected_capture_poisson_field: r must be > 0");
  if (!(mu >= 0.0)) throw std::invalid_argument("expected_capture_poisson_field: mu must be >= 0");
  const double base = mac.p * (1.0 - mac.p) * noise_factor(r, ch);
  if (mu == 0.0 || mac.p_prime == 0.0) return base;
  // Campbell average of -log of the product of interference factors:
  // integrate (1 - factor) over the plane in polar coordinates.
  const double beta = ch.beta, T = ch.T, pp = mac.p_prime;
  const double integral = num::integrate_semi_infinite(
      [&](double s) { return s * pp / (std::pow(s / r, beta) / T + 1.0); }, 0.0, tol);
  return base * std::exp(-mu * 2.0 * std::acos(-1.0) * integral);
}

double expected_delay_factor_poisson_field(double r, double mu, const MacConfig& mac,
                                           const ChannelConfig& ch) {
  check(ch);
  if (!(r >= 0.0)) throw std::invalid_argument("expected_delay_factor_poisson_field: r must be >= 0");
  if (!(mu >= 0.0)) throw std::invalid_argument("expected_delay_factor_poisson_field: mu must be >= 0");
  const double pp = mac.p_prime;
  if (!(pp >= 0.0 && pp < 1.0))
    throw std::invalid_argument("expected_delay_factor_poisson_field: needs p_prime in [0,1)");
  if (r == 0.0 || mu == 0.0 || pp == 0.0) return 1.0;
  const double beta = ch.beta, T = ch.T;
  const double pi = std::acos(-1.0);
  const double exponent = 2.0 * pi * pi * mu * pp * std::pow(T, 2.0 / beta) * r * r /
                          (beta * std::pow(1.0 - pp, 1.0 - 2.0 / beta) * std::sin(2.0 * pi / beta));
  return std::exp(exponent);
}

double expected_delay_factor_poisson_line(double r, double nu, double lambda_prime,
                                          const MacConfig& mac, const ChannelConfig& ch,
                                          num::Tolerance tol) {
  check(ch);
  if (!(r >= 0.0)) throw std::invalid_argument("expected_delay_factor_poisson_line: r must be >= 0");
  if (!(nu >= 0.0 && lambda_prime >= 0.0))
    throw std::invalid_argument("expected_delay_factor_poisson_line: intensities must be >= 0");
  const double pp = mac.p_prime;
  if (!(pp >= 0.0 && pp < 1.0))
    throw std::invalid_argument("expected_delay_factor_poisson_line: needs p_prime in [0,1)");
  if (r == 0.0 || nu == 0.0 || lambda_prime == 0.0 || pp == 0.0) return 1.0;
  const double beta = ch.beta, T = ch.T;
  // Coordinates scaled by the hop length r; the per-line inner integral is the
  // expected -log of that line's factor product, then the outer integral
  // averages over line offsets.
  auto inner = [&](double s) {
    return num::integrate_semi_infinite(
        [&](double t) {
          return pp / (std::pow(s * s + t * t, 0.5 * beta) / T + 1.0 - pp);
        },
        0.0, tol);
  };
  const double outer = num::integrate_semi_infinite(
      [&](double s) { return std::expm1(2.0 * lambda_prime * r * inner(s)); }, 0.0, tol);
  return std::exp(2.0 * nu * r * outer);
}

}  // namespace alohar
