#pragma once

// Shared model vocabulary: channel and MAC parameters, geometry containers,
// route descriptions, interferer field descriptions, and delays on the
// extended line [1, +inf]. Distances are in meters, time in slots, transmit
// power is normalized to 1.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace alohar {

// Path loss l(r) = (A*r)^beta, Rayleigh block fading with unit mean, capture
// threshold T on the SINR, constant ambient noise power W.
struct ChannelConfig {
  double A = 1.0;     // path-loss scale [1/m]
  double beta = 4.0;  // path-loss exponent; beta > 2 keeps planar sums finite
  double T = 10.0;    // capture threshold [1]
  double W = 0.0;     // ambient noise power [1]

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

// Slotted Aloha medium-access probabilities: p drives route nodes, p_prime
// drives external interferer fields.
struct MacConfig {
  double p = 0.15;
  double p_prime = 0.15;

  friend bool operator==(const MacConfig&, const MacConfig&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

using Route1D = std::vector<double>;        // strictly increasing positions [m]
using Interferers2D = std::vector<Point2>;  // planar interferer positions [m]

// Delay in slots, where +inf is an ordinary outcome (a phase transition), not
// an error. Finite values are at least 1: success costs one slot.
struct ExtendedDelay {
  double slots = std::numeric_limits<double>::infinity();

  static ExtendedDelay infinite() { return {}; }
  static ExtendedDelay from_success_prob(double prob) {
    if (!(prob > 0.0)) return infinite();
    return {1.0 / prob};
  }
  bool is_finite() const { return std::isfinite(slots); }

  friend bool operator==(const ExtendedDelay&, const ExtendedDelay&) = default;
};

// Stationary route: homogeneous Poisson relays of intensity lambda on a line.
struct PoissonRouteConfig {
  double lambda = 0.01;  // relay intensity [1/m]
  MacConfig mac;
  ChannelConfig ch;

  friend bool operator==(const PoissonRouteConfig&, const PoissonRouteConfig&) = default;
};

// Poisson route augmented with an independent periodic relay grid of spacing
// delta (uniformly random phase).
struct LatticeRouteConfig {
  PoissonRouteConfig base;
  double delta = 500.0;  // grid spacing [m]

  friend bool operator==(const LatticeRouteConfig&, const LatticeRouteConfig&) = default;
};

enum class InterfererKind { none, poisson_field, poisson_line };

// External planar interferers, all transmitting with probability p_prime of
// the ambient MacConfig: either a homogeneous planar Poisson field of
// intensity mu, or a Poisson line process of line intensity nu carrying 1D
// Poisson node processes of intensity lambda_prime. The mean number of nodes
// per unit area of the line variant is nu*lambda_prime.
struct InterfererSpec {
  InterfererKind kind = InterfererKind::none;
  double mu = 1e-4;            // planar node intensity [1/m^2]
  double nu = 0.01;            // mean line length per unit area [1/m]
  double lambda_prime = 0.01;  // node intensity along each line [1/m]

  friend bool operator==(const InterfererSpec&, const InterfererSpec&) = default;
};

inline void check(const ChannelConfig& ch) {
  if (!(ch.A > 0.0)) throw std::invalid_argument("channel: A must be > 0");
  if (!(ch.beta > 2.0)) throw std::invalid_argument("channel: beta must be > 2");
  if (!(ch.T > 0.0)) throw std::invalid_argument("channel: T must be > 0");
  if (!(ch.W >= 0.0)) throw std::invalid_argument("channel: W must be >= 0");
}

inline void check(const MacConfig& mac) {
  if (!(mac.p >= 0.0 && mac.p <= 1.0)) throw std::invalid_argument("mac: p must lie in [0,1]");
  if (!(mac.p_prime >= 0.0 && mac.p_prime <= 1.0))
    throw std::invalid_argument("mac: p_prime must lie in [0,1]");
}

inline void check(const PoissonRouteConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("route: lambda must be > 0");
  check(cfg.mac);
  check(cfg.ch);
}

inline void check(const LatticeRouteConfig& cfg) {
  check(cfg.base);
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("route: delta must be > 0");
}

inline void check(const InterfererSpec& ifs) {
  switch (ifs.kind) {
    case InterfererKind::none:
      return;
    case InterfererKind::poisson_field:
      if (!(ifs.mu >= 0.0)) throw std::invalid_argument("interferers: mu must be >= 0");
      return;
    case InterfererKind::poisson_line:
      if (!(ifs.nu >= 0.0)) throw std::invalid_argument("interferers: nu must be >= 0");
      if (!(ifs.lambda_prime >= 0.0))
        throw std::invalid_argument("interferers: lambda_prime must be >= 0");
      return;
  }
  throw std::invalid_argument("interferers: unknown kind");
}

}  // namespace alohar
