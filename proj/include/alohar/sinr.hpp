#pragma once

// Capture and delay for one fixed transmitter-receiver geometry, and exact
// expectations of the same quantities over random planar interferer fields.
//
// With Rayleigh fading, capture of a hop of length r against an interferer at
// distance s from the receiver succeeds with the product form
//   success = mac factors * noise_factor(r) * prod_z interference_factor(s_z, r),
// where each factor lies in (0, 1]. The per-slot success probability and the
// mean delay 1/success are exact, not bounds.

#include <functional>

#include "alohar/model.hpp"
#include "alohar/numerics.hpp"

namespace alohar {

// Path loss (A*r)^beta.
double path_loss(double r, const ChannelConfig& ch);

// Probability factor contributed by an interferer at distance |s| from the
// receiver of a hop of length r, when the interferer transmits independently
// with probability p: 1 - p / ((1/T)(|s|/r)^beta + 1). Lies in [1-p, 1] and
// depends on (s, r) only through |s|/r.
double interference_factor(double s, double r, double p, const ChannelConfig& ch);

// Same factor for an interferer that transmits in every slot:
// 1 / (1 + T (r/|s|)^beta). Vanishes as s -> 0.
double sure_interference_factor(double s, double r, const ChannelConfig& ch);

// Factor from constant ambient noise: exp(-T * W * (A*r)^beta).
double noise_factor(double r, const ChannelConfig& ch);

// Per-slot probability that tx delivers to rx against the fixed interferers,
// including both MAC coin flips: p(1-p) * noise * prod of interference
// factors. Coincident tx and rx is a degenerate geometry and throws.
double capture_prob_fixed(Point2 tx, Point2 rx, const Interferers2D& interferers,
                          const MacConfig& mac, const ChannelConfig& ch);

// Mean number of slots until the first success; +inf when the per-slot
// probability is zero (p = 0 or p = 1), never an error.
ExtendedDelay local_delay_fixed(Point2 tx, Point2 rx, const Interferers2D& interferers,
                                const MacConfig& mac, const ChannelConfig& ch);

// Sum of per-hop mean delays along a strictly increasing route; hop k sees
// the external interferers plus every other route node. Needs >= 2 nodes.
ExtendedDelay route_delay_fixed(const Route1D& route, const Interferers2D& interferers,
                                const MacConfig& mac, const ChannelConfig& ch);

// End-to-end distance divided by route delay; 0 when the delay is infinite.
double route_speed_fixed(const Route1D& route, const Interferers2D& interferers,
                         const MacConfig& mac, const ChannelConfig& ch);

// Capture probability of a hop of length r averaged over a planar Poisson
// field of intensity mu whose nodes transmit with probability p_prime:
// p(1-p) * noise(r) * exp(-mu * integral of (1 - interference_factor)).
double expected_capture_poisson_field(double r, double mu, const MacConfig& mac,
                                      const ChannelConfig& ch, num::Tolerance tol = {});

// Mean delay inflation factor E[prod 1/interference_factor] of the same
// field; closed form, >= 1, equal to 1 at r = 0. Diverges as p_prime -> 1,
// which is rejected.
double expected_delay_factor_poisson_field(double r, double mu, const MacConfig& mac,
                                           const ChannelConfig& ch);

// Mean delay inflation factor when interferers sit on a Poisson line process
// (line intensity nu, nodes of intensity lambda_prime on each line). Nested
// quadrature; >= the homogeneous-field value at matched node intensity
// mu = nu * lambda_prime.
double expected_delay_factor_poisson_line(double r, double nu, double lambda_prime,
                                          const MacConfig& mac, const ChannelConfig& ch,
                                          num::Tolerance tol = {});

}  // namespace alohar
