#pragma once

// Closed forms and quadrature-based expectations for nearest-neighbor
// relaying on a Poisson line network under slotted Aloha: per-hop capture
// probabilities, mean local delay with its phase transition, asymptotic
// speed, density of progress and its optimizer, finite-distance end-to-end
// delay, constant-noise variants, and the periodic-grid (lattice) stabilizer.

#include <functional>
#include <optional>

#include "alohar/model.hpp"
#include "alohar/numerics.hpp"

namespace alohar {

// Dimensionless constants of the capture geometry for one channel. They enter
// every closed form; the delay constant is additionally memoized per
// (p, T, beta) across instances, with reads safe from concurrent threads.
class ShapeConstants {
 public:
  explicit ShapeConstants(const ChannelConfig& ch);

  const ChannelConfig& channel() const { return ch_; }

  // Tail integral of u -> 1/(u^beta + 1) from a to infinity.
  double tail_integral(double a) const;
  // Interference weight of nearest-neighbor capture (receiver at a Poisson
  // gap): T^{1/beta} * (tail_integral(T^{-1/beta}) + tail_integral(0)).
  double nn_constant() const { return c_nn_; }
  // Interference weight of nearest-receiver capture: 2 T^{1/beta} * tail_integral(0).
  double nr_constant() const { return c_nr_; }
  // Delay tail weight: T^{1/beta} times the sum of the two tail integrals of
  // u -> 1/(u^beta + 1 - p), from T^{-1/beta} and from 0. The mean local
  // delay is finite exactly when p * delay_constant(p) < 1.
  double delay_constant(double p) const;

 private:
  ChannelConfig ch_;
  double c_nn_ = 0.0;
  double c_nr_ = 0.0;
};

// Probability that the typical node, given that it transmits this slot,
// delivers to its nearest forward neighbor: the receiver's listening coin and
// the interferers' coins are averaged, the sender's own transmit coin is not
// (the per-slot joint success probability is p times this). Honors ch.W
// through the noise-averaged integral form; exact closed form at W = 0.
double capture_nn(const PoissonRouteConfig& cfg);

// Same for transmission to the nearest forward receiver (nearest node that
// listens this slot). Always at least capture_nn.
double capture_nr(const PoissonRouteConfig& cfg);

// Laplace transform theta -> E[exp(-theta * W)] of a noise law, as a function
// of hop length r and transform argument theta (r lets the law depend on
// local geometry; the constant law ignores it).
using NoiseLaplace = std::function<double(double r, double theta)>;

NoiseLaplace constant_noise_laplace(double w);

// Nearest-neighbor capture probability under an arbitrary noise law given by
// its Laplace transform. Tight default tolerance so the W = 0 case matches
// the closed form to better than 1e-10.
double capture_nn_noise(const PoissonRouteConfig& cfg, const NoiseLaplace& noise,
                        num::Tolerance tol = {1e-12, 1e-16, 2000});

// Mean delay until the typical node first delivers to its current nearest
// forward neighbor, averaged over fading, MAC and the network. Infinite when
// p * delay_constant(p) >= 1, and for any W > 0 (constant ambient noise makes
// arbitrarily long Poisson gaps dominate the mean).
ExtendedDelay mean_local_delay_nn(const PoissonRouteConfig& cfg);

// The MAC probability at which the mean local delay turns infinite, found by
// bisection on p * delay_constant(p) = 1; empty when no transition occurs
// below p = 1.
std::optional<double> critical_p(const ChannelConfig& ch, num::Tolerance tol = {});

// Asymptotic speed of a packet over long distances: lambda-free progress per
// mean delay, p(1-p)(1 - p*delay_constant(p)) / lambda. Zero at or above the
// phase transition and for W > 0.
double long_distance_speed(const PoissonRouteConfig& cfg);

// Expected per-slot progress density of the typical hop,
// p(1-p) / (1 + p*nn_constant())^2. Independent of lambda.
double density_of_progress(const PoissonRouteConfig& cfg);

struct SpeedOptimum {
  double p = 0.0;
  double speed = 0.0;
};

// MAC probability maximizing long_distance_speed, by golden section below the
// phase transition.
SpeedOptimum optimize_speed(const PoissonRouteConfig& cfg, num::Tolerance tol = {});

struct ProgressOptimum {
  double p = 0.0;        // numeric argmax (authoritative)
  double density = 0.0;  // density at p
  // Stationarity closed form 1 / (2 + nn_constant()); agrees with p.
  double p_stationary = 0.0;
  // An alternate closed form in circulation, (c+1-sqrt(c^2-1))/(2c) with
  // c = nn_constant(); kept for comparison, it lands below the true argmax.
  double p_alternate = 0.0;
  double density_alternate = 0.0;
};

ProgressOptimum optimize_progress_density(const PoissonRouteConfig& cfg, num::Tolerance tol = {});

// Mean end-to-end delay from a node at 0 to a node at distance M > 0 with
// Poisson relays between and around them, every relay forwarding to its
// nearest forward neighbor. Exact expectation over routes, fading and MAC;
// optional external interferer fields and ambient noise multiply every hop.
// Finite for 0 < p < 1 but can overflow to +inf past the noise cliff, which
// is reported as an infinite delay rather than an error.
ExtendedDelay end_to_end_delay(double m, const PoissonRouteConfig& cfg,
                               const InterfererSpec& ifs = {}, num::Tolerance tol = {});

// M divided by the mean end-to-end delay; 0 when that delay is infinite.
double end_to_end_speed(double m, const PoissonRouteConfig& cfg, const InterfererSpec& ifs = {},
                        num::Tolerance tol = {});

// Which terms of the lattice delay carry the noise and external-field
// inflation factors: `uniform` applies the full per-hop kernel everywhere
// (the default); `partial` reproduces an alternate bookkeeping that applies
// them only to a subset of terms, kept for comparison.
enum class LatticeTermMode { uniform, partial };

// Normalization of lattice speed: mean hop progress of the combined process
// (1/(lambda + 1/delta), the default) or of the Poisson route alone.
enum class LatticeSpeedNorm { combined, route_only };

// Delay decomposition for a route stabilized by an independent periodic relay
// grid of spacing delta: the typical node is a Poisson node with probability
// weight_route and a grid node with weight_grid, and each case splits by
// whether the nearest forward node is Poisson or grid. mean_slots already
// includes the 1/(p(1-p)) MAC factor; the four terms do not.
struct LatticeDelayTerms {
  double weight_route = 0.0;
  double weight_grid = 0.0;
  double route_to_grid = 0.0;
  double route_to_route = 0.0;
  double grid_to_route = 0.0;
  double grid_to_grid = 0.0;
  double mean_slots = 0.0;
};

LatticeDelayTerms lattice_delay_terms(const LatticeRouteConfig& cfg, const InterfererSpec& ifs = {},
                                      LatticeTermMode mode = LatticeTermMode::uniform,
                                      num::Tolerance tol = {});

// Mean local delay of the typical node of the grid-stabilized route. Finite
// for every finite delta, any W >= 0 and 0 < p < 1: the grid caps hop length.
ExtendedDelay lattice_mean_local_delay(const LatticeRouteConfig& cfg,
                                       const InterfererSpec& ifs = {},
                                       LatticeTermMode mode = LatticeTermMode::uniform,
                                       num::Tolerance tol = {});

// Mean progress per mean delay of the grid-stabilized route.
double lattice_speed(const LatticeRouteConfig& cfg, const InterfererSpec& ifs = {},
                     LatticeSpeedNorm norm = LatticeSpeedNorm::combined,
                     LatticeTermMode mode = LatticeTermMode::uniform, num::Tolerance tol = {});

}  // namespace alohar
