#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <optional>

#include "alohar/analytic.hpp"
#include "alohar/model.hpp"
#include "alohar/parallel.hpp"
#include "alohar/sinr.hpp"

using namespace alohar;

namespace {
const PoissonRouteConfig kCfg{};  // lambda=0.01, p=0.15, A=1, beta=4, T=10, W=0

PoissonRouteConfig with_p(double p) {
  PoissonRouteConfig cfg = kCfg;
  cfg.mac.p = p;
  return cfg;
}
}

TEST_CASE("shape constants hit independently computed values") {
  const ShapeConstants sc(kCfg.ch);
  // beta = 4 tail integral from 0 is pi / (4 sin(pi/4))
  CHECK(sc.tail_integral(0.0) == doctest::Approx(1.1107207345395915).epsilon(1e-10));
  CHECK(sc.tail_integral(std::pow(10.0, -0.25)) ==
        doctest::Approx(0.5590416083638334).epsilon(1e-10));
  CHECK(sc.nn_constant() == doctest::Approx(2.969303994043512).epsilon(1e-10));
  CHECK(sc.nr_constant() == doctest::Approx(3.9503436250701274).epsilon(1e-10));
  CHECK(sc.delay_constant(0.1) == doctest::Approx(3.1873302903547587).epsilon(1e-10));
  CHECK(sc.delay_constant(0.15) == doctest::Approx(3.311959503419273).epsilon(1e-10));
}

TEST_CASE("nearest-neighbor capture closed form and limits") {
  const ShapeConstants sc(kCfg.ch);
  for (double p : {0.05, 0.15, 0.3, 0.6}) {
    CHECK(capture_nn(with_p(p)) ==
          doctest::Approx((1.0 - p) / (1.0 + p * sc.nn_constant())).epsilon(1e-12));
  }
  CHECK(capture_nn(with_p(1e-12)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(capture_nn(with_p(1.0)) == 0.0);
}

TEST_CASE("nearest-receiver capture dominates nearest-neighbor capture") {
  const ShapeConstants sc(kCfg.ch);
  for (double p : {0.05, 0.15, 0.3, 0.6}) {
    const double nr = capture_nr(with_p(p));
    CHECK(nr == doctest::Approx((1.0 - p) / (1.0 + p * (sc.nr_constant() - 1.0))).epsilon(1e-12));
    CHECK(nr >= capture_nn(with_p(p)));
  }
}

TEST_CASE("noise-averaged capture reduces to the closed form at W = 0") {
  for (double p : {0.05, 0.15, 0.3}) {
    const PoissonRouteConfig cfg = with_p(p);
    CHECK(std::abs(capture_nn_noise(cfg, constant_noise_laplace(0.0)) - capture_nn(cfg)) <=
          1e-10);
  }
  // positive noise strictly hurts
  CHECK(capture_nn_noise(kCfg, constant_noise_laplace(1e-11)) < capture_nn(kCfg));
  CHECK_THROWS(constant_noise_laplace(-1.0));
}

TEST_CASE("captures are invariant to lambda and A at matched dimensionless shape") {
  const double ref_nn = capture_nn(kCfg);
  const double ref_nr = capture_nr(kCfg);
  for (double lambda : {0.001, 0.1}) {
    for (double a : {0.5, 2.0}) {
      PoissonRouteConfig cfg = kCfg;
      cfg.lambda = lambda;
      cfg.ch.A = a;
      CHECK(capture_nn(cfg) == doctest::Approx(ref_nn).epsilon(1e-12));
      CHECK(capture_nr(cfg) == doctest::Approx(ref_nr).epsilon(1e-12));
    }
  }
}

TEST_CASE("mean local delay: anchors and the phase transition") {
  CHECK(mean_local_delay_nn(with_p(0.1)).slots ==
        doctest::Approx(16.309481575747352).epsilon(1e-10));
  CHECK(mean_local_delay_nn(with_p(0.15)).slots ==
        doctest::Approx(15.586332623063123).epsilon(1e-10));

  const std::optional<double> pc = critical_p(kCfg.ch);
  REQUIRE(pc.has_value());
  CHECK(*pc == doctest::Approx(0.27215996575444446).epsilon(1e-9));
  CHECK(mean_local_delay_nn(with_p(0.9 * *pc)).slots ==
        doctest::Approx(44.389941844592414).epsilon(1e-9));
  CHECK(!mean_local_delay_nn(with_p(*pc + 1e-6)).is_finite());
  CHECK(!mean_local_delay_nn(with_p(0.5)).is_finite());

  // any constant ambient noise blows up the Poisson-gap mean
  PoissonRouteConfig noisy = kCfg;
  noisy.ch.W = 1e-11;
  CHECK(!mean_local_delay_nn(noisy).is_finite());

  // degenerate MAC
  CHECK(!mean_local_delay_nn(with_p(0.0)).is_finite());
  CHECK(!mean_local_delay_nn(with_p(1.0)).is_finite());
}

TEST_CASE("phase transition is self-consistent on a second channel") {
  ChannelConfig ch;
  ch.T = 1.0;
  ch.beta = 3.0;
  const std::optional<double> pc = critical_p(ch);
  REQUIRE(pc.has_value());
  const ShapeConstants sc(ch);
  CHECK(*pc * sc.delay_constant(*pc) == doctest::Approx(1.0).epsilon(1e-6));
  PoissonRouteConfig cfg = kCfg;
  cfg.ch = ch;
  cfg.mac.p = 0.95 * *pc;
  CHECK(mean_local_delay_nn(cfg).is_finite());
  cfg.mac.p = 1.05 * *pc;
  CHECK(!mean_local_delay_nn(cfg).is_finite());
}

TEST_CASE("speed: anchor, reciprocal identity, lambda scaling, unimodal optimum") {
  CHECK(long_distance_speed(kCfg) == doctest::Approx(6.415877449710641).epsilon(1e-10));

  for (double p : {0.05, 0.1, 0.15, 0.2, 0.25}) {
    const PoissonRouteConfig cfg = with_p(p);
    const double v = long_distance_speed(cfg);
    const double l = mean_local_delay_nn(cfg).slots;
    CHECK(v * cfg.lambda * l == doctest::Approx(1.0).epsilon(1e-10));
  }

  PoissonRouteConfig dense = kCfg;
  dense.lambda = 0.02;
  CHECK(long_distance_speed(dense) ==
        doctest::Approx(0.5 * long_distance_speed(kCfg)).epsilon(1e-12));

  // above the transition nothing moves
  CHECK(long_distance_speed(with_p(0.3)) == 0.0);

  const SpeedOptimum opt = optimize_speed(kCfg);
  CHECK(opt.p == doctest::Approx(0.13290018342127616).epsilon(1e-6));
  CHECK(opt.speed >= long_distance_speed(with_p(opt.p - 0.01)));
  CHECK(opt.speed >= long_distance_speed(with_p(opt.p + 0.01)));
}

TEST_CASE("density of progress and its optimizer") {
  const ShapeConstants sc(kCfg.ch);
  const double c = sc.nn_constant();
  for (double p : {0.1, 0.2, 0.3}) {
    CHECK(density_of_progress(with_p(p)) ==
          doctest::Approx(p * (1.0 - p) / ((1.0 + p * c) * (1.0 + p * c))).epsilon(1e-12));
  }

  const ProgressOptimum opt = optimize_progress_density(kCfg);
  CHECK(opt.p_stationary == doctest::Approx(1.0 / (2.0 + c)).epsilon(1e-12));
  CHECK(opt.p_stationary == doctest::Approx(0.20123542475941425).epsilon(1e-10));
  CHECK(opt.p == doctest::Approx(opt.p_stationary).epsilon(1e-6));
  CHECK(opt.density == doctest::Approx(0.06298333420044408).epsilon(1e-10));
  CHECK(opt.p_alternate ==
        doctest::Approx((c + 1.0 - std::sqrt(c * c - 1.0)) / (2.0 * c)).epsilon(1e-12));
  CHECK(opt.p_alternate == doctest::Approx(0.19759781517928418).epsilon(1e-10));
  CHECK(opt.density_alternate == doctest::Approx(density_of_progress(with_p(opt.p_alternate)))
                                     .epsilon(1e-12));
  CHECK(opt.density_alternate < opt.density);
}

TEST_CASE("end-to-end delay: anchors, short-distance limit, monotonicity") {
  CHECK(end_to_end_delay(0.01, kCfg).slots == doctest::Approx(7.844451283).epsilon(1e-7));
  CHECK(end_to_end_delay(100.0, kCfg).slots == doctest::Approx(21.978331888).epsilon(1e-7));
  CHECK(end_to_end_delay(500.0, kCfg).slots == doctest::Approx(86.503412558).epsilon(1e-7));
  CHECK(end_to_end_delay(1000.0, kCfg).slots == doctest::Approx(168.113096028).epsilon(1e-7));
  CHECK(end_to_end_delay(2000.0, kCfg).slots == doctest::Approx(326.530760599).epsilon(1e-7));

  // vanishing distance costs exactly the two MAC coins
  CHECK(end_to_end_delay(1e-6, kCfg).slots ==
        doctest::Approx(1.0 / (kCfg.mac.p * (1.0 - kCfg.mac.p))).epsilon(1e-6));

  // longer trips take longer
  double prev = 0.0;
  for (double m : {10.0, 100.0, 500.0, 1000.0, 2000.0}) {
    const double d = end_to_end_delay(m, kCfg).slots;
    CHECK(d > prev);
    prev = d;
  }

  // ambient noise inflates the delay, monotonically in W
  PoissonRouteConfig n13 = kCfg, n12 = kCfg;
  n13.ch.W = 1e-13;
  n12.ch.W = 1e-12;
  const double d0 = end_to_end_delay(1000.0, kCfg).slots;
  const double d13 = end_to_end_delay(1000.0, n13).slots;
  const double d12 = end_to_end_delay(1000.0, n12).slots;
  CHECK(d0 < d13);
  CHECK(d13 < d12);
  CHECK(std::isfinite(d12));
}

TEST_CASE("end-to-end delay under external interferer fields") {
  InterfererSpec none;
  InterfererSpec field;
  field.kind = InterfererKind::poisson_field;
  field.mu = 0.0;
  const double base = end_to_end_delay(1000.0, kCfg, none).slots;
  CHECK(std::abs(end_to_end_delay(1000.0, kCfg, field).slots - base) <= 1e-10 * base);

  field.mu = 1e-4;
  const double with_field = end_to_end_delay(1000.0, kCfg, field).slots;
  CHECK(with_field > base);
  field.mu = 2e-4;
  CHECK(end_to_end_delay(1000.0, kCfg, field).slots > with_field);

  // line process at a matched planar intensity, sparse enough on each line
  // that every hop factor stays representable
  field.mu = 1e-6;
  const double sparse_field = end_to_end_delay(1000.0, kCfg, field).slots;
  InterfererSpec line;
  line.kind = InterfererKind::poisson_line;
  line.nu = 0.01;
  line.lambda_prime = 1e-4;
  const double with_line = end_to_end_delay(1000.0, kCfg, line).slots;
  CHECK(std::isfinite(with_line));
  // same mean node intensity, more clustered: at least as slow
  CHECK(with_line >= sparse_field * (1.0 - 1e-9));
  line.lambda_prime = 2e-4;
  CHECK(end_to_end_delay(1000.0, kCfg, line).slots > with_line);

  // packing the same lines densely makes the factor for a nearby line blow up
  // exponentially in the hop length, so the truncated mean overflows
  line.lambda_prime = 0.01;
  CHECK(!end_to_end_delay(1000.0, kCfg, line).is_finite());
}

TEST_CASE("end-to-end speed and the noise cliff") {
  const double d = end_to_end_delay(1000.0, kCfg).slots;
  CHECK(end_to_end_speed(1000.0, kCfg) == doctest::Approx(1000.0 / d).epsilon(1e-12));

  PoissonRouteConfig noisy = kCfg;
  noisy.ch.W = 1e-11;
  // short trips still complete; far past the cliff the mean overflows
  CHECK(end_to_end_delay(500.0, noisy).is_finite());
  CHECK(!end_to_end_delay(5000.0, noisy).is_finite());
  CHECK(end_to_end_speed(5000.0, noisy) == 0.0);
}

TEST_CASE("lattice delay decomposition is internally consistent") {
  const LatticeRouteConfig cfg{kCfg, 500.0};
  const LatticeDelayTerms t = lattice_delay_terms(cfg);
  CHECK(t.weight_route + t.weight_grid == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.weight_route ==
        doctest::Approx(cfg.base.lambda / (cfg.base.lambda + 1.0 / cfg.delta)).epsilon(1e-12));
  const double p = cfg.base.mac.p;
  const double recombined = (t.weight_route * (t.route_to_grid + t.route_to_route) +
                             t.weight_grid * (t.grid_to_route + t.grid_to_grid)) /
                            (p * (1.0 - p));
  CHECK(t.mean_slots == doctest::Approx(recombined).epsilon(1e-10));
  CHECK(lattice_mean_local_delay(cfg).slots == doctest::Approx(t.mean_slots).epsilon(1e-12));
}

TEST_CASE("a sparse grid leaves the Poisson route delay almost unchanged") {
  const LatticeRouteConfig cfg{kCfg, 1e6};
  CHECK(lattice_mean_local_delay(cfg).slots ==
        doctest::Approx(mean_local_delay_nn(kCfg).slots).epsilon(5e-3));
}

TEST_CASE("the grid rescues the delay from ambient noise") {
  LatticeRouteConfig cfg{kCfg, 500.0};
  cfg.base.ch.W = 1e-11;
  CHECK(!mean_local_delay_nn(cfg.base).is_finite());
  const ExtendedDelay d = lattice_mean_local_delay(cfg);
  CHECK(d.is_finite());
  CHECK(d.slots > lattice_mean_local_delay({kCfg, 500.0}).slots);
  CHECK(lattice_speed(cfg) > 0.0);
}

TEST_CASE("lattice term bookkeeping modes agree exactly when nothing is inflated") {
  const LatticeRouteConfig cfg{kCfg, 500.0};
  CHECK(lattice_mean_local_delay(cfg, {}, LatticeTermMode::uniform).slots ==
        doctest::Approx(lattice_mean_local_delay(cfg, {}, LatticeTermMode::partial).slots)
            .epsilon(1e-12));

  LatticeRouteConfig noisy = cfg;
  noisy.base.ch.W = 1e-11;
  CHECK(lattice_mean_local_delay(noisy, {}, LatticeTermMode::uniform).slots !=
        doctest::Approx(lattice_mean_local_delay(noisy, {}, LatticeTermMode::partial).slots)
            .epsilon(1e-6));
}

TEST_CASE("lattice speed normalizations differ by the hop-progress ratio") {
  const LatticeRouteConfig cfg{kCfg, 500.0};
  const double combined = lattice_speed(cfg, {}, LatticeSpeedNorm::combined);
  const double route_only = lattice_speed(cfg, {}, LatticeSpeedNorm::route_only);
  // combined mean hop 1/(lambda + 1/delta) vs route mean hop 1/lambda
  const double ratio = cfg.base.lambda / (cfg.base.lambda + 1.0 / cfg.delta);
  CHECK(combined == doctest::Approx(route_only * ratio).epsilon(1e-12));
  CHECK(combined < route_only);
}

TEST_CASE("memoized delay constant is stable under concurrent readers") {
  const ShapeConstants sc(kCfg.ch);
  const double serial1 = sc.delay_constant(0.12);
  const double serial2 = sc.delay_constant(0.22);
  auto values = parallel_map(16, [&](std::size_t i) {
    return sc.delay_constant(i % 2 == 0 ? 0.12 : 0.22);
  });
  for (std::size_t i = 0; i < values.size(); ++i)
    CHECK(values[i] == (i % 2 == 0 ? serial1 : serial2));
}
