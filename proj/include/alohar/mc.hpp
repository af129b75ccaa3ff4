#pragma once

// Monte Carlo companion to the closed forms: samples routes, interferer
// fields, MAC coin flips and Rayleigh fades, and estimates every analytic
// quantity empirically with a standard error. Replications run in parallel
// under one substream per replication, so results are bit-identical for a
// given (seed, config) regardless of thread count.

#include <cstdint>
#include <random>

#include "alohar/model.hpp"

namespace alohar::mc {

// Master seed; every draw of a run is a deterministic function of it.
struct RngSeed {
  std::uint64_t value = 1;
};

// Truncation half-widths for sampled geometry, in meters. Zero means choose
// automatically: routes default to 50 mean gaps, planar fields to
// 30 * max(mean gap, hop) * T^{1/beta}, and delay estimators widen both per
// sample so that the unsampled tail of the log product stays below 1e-4.
struct SimWindow {
  double half_width_1d = 0.0;
  double half_width_2d = 0.0;

  friend bool operator==(const SimWindow&, const SimWindow&) = default;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

// Delay estimates carry robust companions (the mean may not exist) and a
// nonconvergence diagnostic. growth_half and growth_full are the relative
// changes of the running mean across the last two sample-count doublings;
// max_share is the largest single sample's share of the total. diverged is
// raised when the mean is non-finite, either growth exceeds 10%, or one
// sample carries more than half of the sum.
struct DelayEstimate {
  Estimate overall;
  double median = 0.0;
  double trimmed_mean = 0.0;  // mean of the central 80%
  double growth_half = 0.0;
  double growth_full = 0.0;
  double max_share = 0.0;
  bool diverged = false;
};

// slot: play actual slots (MAC coins + fades) and count successes.
// semi_analytic: sample geometry only and average the exact per-geometry
// success probability; same target, far lower variance.
enum class CaptureMode { slot, semi_analytic };

// Slot-played delays are capped at 10^7 slots per sample; censored counts
// how many samples hit the cap (their delay enters at the cap value).
struct SlotDelayEstimate {
  Estimate est;
  std::uint64_t censored = 0;
};

// Homogeneous Poisson points on [-half_width, half_width], sorted.
Route1D sample_poisson_route(double lambda, double half_width, std::mt19937_64& rng);

// Homogeneous planar Poisson points of intensity mu on the centered square of
// the given half-width.
Interferers2D sample_poisson_field(double mu, double half_width, std::mt19937_64& rng);

// Doubly stochastic field: lines with uniform angle and Poisson(nu) signed
// offsets (length per unit area nu), carrying 1D Poisson(lambda_prime) points
// each, clipped to the centered square. Mean point intensity nu*lambda_prime.
Interferers2D sample_poisson_line_field(double nu, double lambda_prime, double half_width,
                                        std::mt19937_64& rng);

// Per-slot success probability of the typical node toward its nearest forward
// neighbor, MAC factors included: the mean of the exact per-geometry success
// (semi_analytic) or the frequency of played-slot successes (slot).
Estimate estimate_capture_nn(const PoissonRouteConfig& cfg, CaptureMode mode, std::uint64_t n,
                             SimWindow window = {}, RngSeed seed = {});

// Same toward the nearest forward node that listens in the current slot.
Estimate estimate_capture_nr(const PoissonRouteConfig& cfg, CaptureMode mode, std::uint64_t n,
                             SimWindow window = {}, RngSeed seed = {});

// Mean local delay of the typical node (expected slots to deliver to its
// nearest forward neighbor, geometry averaged). Samples the forward gap and
// the interferer configuration by importance sampling (exponentially tilted
// gap mixture plus a tilted route law), so the heavy tail near the phase
// transition and past the noise cliff is actually visited; the estimate is
// unbiased for any tilt. Optional external field interferers surround the
// receiver. The divergence diagnostic is the deliverable above the phase
// transition or for W > 0, where the true mean is infinite.
DelayEstimate estimate_mean_local_delay(const PoissonRouteConfig& cfg,
                                        const InterfererSpec& ifs = {}, std::uint64_t n = 10000,
                                        SimWindow window = {}, RngSeed seed = {});

// Mean total delay of a packet relayed hop by hop from a node at 0 to a node
// at m > 0 across a sampled Poisson route (plus optional external fields);
// every route node interferes with every hop.
Estimate simulate_end_to_end(double m, const PoissonRouteConfig& cfg,
                             const InterfererSpec& ifs = {}, std::uint64_t n = 10000,
                             SimWindow window = {}, RngSeed seed = {});

// Ratio estimator of the long-run packet speed: distance of the k-th relay
// over the summed per-hop mean delays, averaged over n_routes sampled routes.
// Slightly biased at small k; the bias vanishes as k grows.
Estimate simulate_long_distance_speed(const PoissonRouteConfig& cfg, std::uint64_t k_hops,
                                      std::uint64_t n_routes, SimWindow window = {},
                                      RngSeed seed = {});

// Mean local delay of the typical node of the superposition of a Poisson
// route and an independent periodic grid of spacing delta, sampled with the
// exact typical-node mixture (route node with weight lambda/(lambda + 1/delta),
// grid node otherwise, uniform grid phase). Hop length is capped by delta, so
// the estimate stays finite for any W >= 0.
DelayEstimate simulate_lattice_local_delay(const LatticeRouteConfig& cfg,
                                           const InterfererSpec& ifs = {}, std::uint64_t n = 10000,
                                           SimWindow window = {}, RngSeed seed = {});

// Capture probability of one hop of length r with interferers drawn from a
// planar field (poisson_field or poisson_line) instead of the route,
// MAC factors of the hop included.
Estimate estimate_capture_field(double r, const InterfererSpec& ifs, const MacConfig& mac,
                                const ChannelConfig& ch, std::uint64_t n,
                                SimWindow window = {}, RngSeed seed = {});

// Mean delay inflation factor E[prod 1/interference_factor] of a hop of
// length r against a sampled planar field; no MAC prefactors.
Estimate estimate_field_delay_factor(double r, const InterfererSpec& ifs, const MacConfig& mac,
                                     const ChannelConfig& ch, std::uint64_t n,
                                     SimWindow window = {}, RngSeed seed = {});

// Played-slot success frequency for one fixed geometry: per slot, draw the
// MAC coins of tx, rx and every interferer and all Rayleigh fades, and test
// the capture inequality directly. Binomial standard error.
Estimate slot_capture_frequency(Point2 tx, Point2 rx, const Interferers2D& interferers,
                                const MacConfig& mac, const ChannelConfig& ch,
                                std::uint64_t n_slots, RngSeed seed = {});

// Played-slot delay for one fixed geometry: slots until first success,
// averaged over n independent packets.
SlotDelayEstimate slot_local_delay(Point2 tx, Point2 rx, const Interferers2D& interferers,
                                   const MacConfig& mac, const ChannelConfig& ch, std::uint64_t n,
                                   RngSeed seed = {});

}  // namespace alohar::mc
