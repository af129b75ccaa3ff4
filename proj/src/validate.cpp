#include "alohar/validate.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alohar/analytic.hpp"
#include "alohar/mc.hpp"
#include "alohar/model.hpp"
#include "alohar/sinr.hpp"

namespace alohar {

namespace {

mc::RngSeed check_seed(const RunConfig& cfg, std::uint64_t ordinal) {
  return {cfg.seed + 0x9e3779b97f4a7c15ULL * (1000 + ordinal)};
}

// Standard 3 sigma comparison of an MC estimate against an analytic target.
CheckResult mc_check(std::string name, double expected, const mc::Estimate& est,
                     double extra_rel_tol = 0.0) {
  CheckResult c;
  c.name = std::move(name);
  c.expected = expected;
  c.observed = est.mean;
  c.sigma = est.std_error;
  if (!std::isfinite(est.mean) || !std::isfinite(expected)) {
    c.z = std::numeric_limits<double>::infinity();
    c.pass = false;
    return c;
  }
  c.z = c.sigma > 0.0 ? (c.observed - c.expected) / c.sigma : 0.0;
  const double slack = 3.0 * c.sigma + extra_rel_tol * std::abs(expected);
  c.pass = std::abs(c.observed - c.expected) <= slack;
  return c;
}

CheckResult predicate_check(std::string name, bool ok) {
  CheckResult c;
  c.name = std::move(name);
  c.expected = 1.0;
  c.observed = ok ? 1.0 : 0.0;
  c.pass = ok;
  return c;
}

void finish(SuiteResult& r) {
  r.pass = true;
  for (const CheckResult& c : r.checks) r.pass = r.pass && c.pass;
}

// Three pinned geometries exercising zero, one and five interferers and both
// noise settings, checked at the slot level against the product closed form.
SuiteResult suite_fixed(const RunConfig& cfg) {
  SuiteResult r{"fixed", {}, false};
  MacConfig mac{0.25, 0.25};
  const Point2 tx{0.0, 0.0};
  const Point2 rx{100.0, 0.0};
  const Interferers2D none;
  const Interferers2D one{{50.0, 80.0}};
  const Interferers2D five{{150.0, 40.0}, {-60.0, 90.0}, {30.0, -120.0},
                           {200.0, -50.0}, {-140.0, -70.0}};
  struct Case {
    const char* name;
    const Interferers2D* ifs;
    double w;
  };
  const Case cases[] = {{"capture_fixed_empty_w0", &none, 0.0},
                        {"capture_fixed_one_w1e-11", &one, 1e-11},
                        {"capture_fixed_five_w1e-11", &five, 1e-11}};
  std::uint64_t k = 0;
  for (const Case& cs : cases) {
    ChannelConfig ch = cfg.ch;
    ch.W = cs.w;
    const double exact = capture_prob_fixed(tx, rx, *cs.ifs, mac, ch);
    const mc::Estimate est =
        mc::slot_capture_frequency(tx, rx, *cs.ifs, mac, ch, 200000, check_seed(cfg, k++));
    r.checks.push_back(mc_check(cs.name, exact, est));
  }
  ChannelConfig ch = cfg.ch;
  ch.W = 1e-11;
  const ExtendedDelay exact_delay = local_delay_fixed(tx, rx, five, mac, ch);
  const mc::SlotDelayEstimate d =
      mc::slot_local_delay(tx, rx, five, mac, ch, 4000, check_seed(cfg, k++));
  r.checks.push_back(mc_check("delay_fixed_five_w1e-11", exact_delay.slots, d.est));
  r.checks.push_back(predicate_check("delay_fixed_uncensored", d.censored == 0));
  finish(r);
  return r;
}

SuiteResult suite_capture(const RunConfig& cfg) {
  SuiteResult r{"capture", {}, false};
  std::uint64_t k = 100;
  for (double p : {0.05, 0.1, 0.3}) {
    PoissonRouteConfig rc = cfg.route();
    rc.mac.p = p;
    const std::string tag = format_double(p);
    r.checks.push_back(mc_check(
        "capture_nn_semi_p" + tag, p * capture_nn(rc),
        mc::estimate_capture_nn(rc, mc::CaptureMode::semi_analytic, 30000, cfg.window,
                                check_seed(cfg, k++))));
    r.checks.push_back(mc_check(
        "capture_nr_semi_p" + tag, p * capture_nr(rc),
        mc::estimate_capture_nr(rc, mc::CaptureMode::semi_analytic, 30000, cfg.window,
                                check_seed(cfg, k++))));
  }
  {
    PoissonRouteConfig rc = cfg.route();
    rc.mac.p = 0.1;
    r.checks.push_back(mc_check(
        "capture_nn_slot_p0.1", 0.1 * capture_nn(rc),
        mc::estimate_capture_nn(rc, mc::CaptureMode::slot, 40000, cfg.window,
                                check_seed(cfg, k++))));
    r.checks.push_back(mc_check(
        "capture_nr_slot_p0.1", 0.1 * capture_nr(rc),
        mc::estimate_capture_nr(rc, mc::CaptureMode::slot, 40000, cfg.window,
                                check_seed(cfg, k++))));
  }
  bool ordered = true;
  for (int i = 1; i <= 50; ++i) {
    PoissonRouteConfig rc = cfg.route();
    rc.mac.p = 0.01 * static_cast<double>(i);
    ordered = ordered && capture_nr(rc) >= capture_nn(rc) - 1e-12;
  }
  r.checks.push_back(predicate_check("capture_nr_dominates_nn_50pt", ordered));
  finish(r);
  return r;
}

SuiteResult suite_local_delay(const RunConfig& cfg) {
  SuiteResult r{"local-delay", {}, false};
  std::uint64_t k = 200;
  for (double p : {0.1, 0.15}) {
    PoissonRouteConfig rc = cfg.route();
    rc.mac.p = p;
    const ExtendedDelay exact = mean_local_delay_nn(rc);
    const mc::DelayEstimate est =
        mc::estimate_mean_local_delay(rc, {}, 20000, cfg.window, check_seed(cfg, k++));
    const std::string tag = format_double(p);
    r.checks.push_back(mc_check("local_delay_p" + tag, exact.slots, est.overall));
    r.checks.push_back(predicate_check("local_delay_p" + tag + "_converged", !est.diverged));
  }
  const double pc = critical_p(cfg.ch).value();
  {
    PoissonRouteConfig rc = cfg.route();
    rc.mac.p = 1.1 * pc;
    const mc::DelayEstimate est =
        mc::estimate_mean_local_delay(rc, {}, 10000, cfg.window, check_seed(cfg, k++));
    r.checks.push_back(predicate_check("local_delay_supercritical_flag", est.diverged));
  }
  {
    PoissonRouteConfig rc = cfg.route();
    rc.ch.W = 1e-11;
    const mc::DelayEstimate est =
        mc::estimate_mean_local_delay(rc, {}, 10000, cfg.window, check_seed(cfg, k++));
    r.checks.push_back(predicate_check("local_delay_noise_cliff_flag", est.diverged));
  }
  finish(r);
  return r;
}

SuiteResult suite_e2e(const RunConfig& cfg) {
  SuiteResult r{"e2e", {}, false};
  std::uint64_t k = 300;
  const PoissonRouteConfig rc = cfg.route();
  for (double m : {100.0, 1000.0}) {
    const ExtendedDelay exact = end_to_end_delay(m, rc);
    const std::uint64_t n = m <= 100.0 ? 3000 : 2000;
    const mc::Estimate est = mc::simulate_end_to_end(m, rc, {}, n, cfg.window, check_seed(cfg, k++));
    r.checks.push_back(mc_check("e2e_delay_m" + format_double(m), exact.slots, est));
  }
  // Ratio estimator carries O(1/k_hops) bias, so allow 10% on top of 3 sigma.
  const mc::Estimate speed =
      mc::simulate_long_distance_speed(rc, 300, 200, cfg.window, check_seed(cfg, k++));
  r.checks.push_back(mc_check("long_distance_speed_k300", long_distance_speed(rc), speed, 0.10));
  finish(r);
  return r;
}

SuiteResult suite_fields(const RunConfig& cfg) {
  SuiteResult r{"fields", {}, false};
  std::uint64_t k = 400;
  const double rr = cfg.hop_r;
  MacConfig mac = cfg.mac;
  {
    InterfererSpec ifs;
    ifs.kind = InterfererKind::poisson_field;
    ifs.mu = 1e-4;
    r.checks.push_back(mc_check(
        "field_delay_factor_poisson", expected_delay_factor_poisson_field(rr, ifs.mu, mac, cfg.ch),
        mc::estimate_field_delay_factor(rr, ifs, mac, cfg.ch, 20000, cfg.window,
                                        check_seed(cfg, k++))));
    r.checks.push_back(mc_check(
        "field_capture_poisson", expected_capture_poisson_field(rr, ifs.mu, mac, cfg.ch),
        mc::estimate_capture_field(rr, ifs, mac, cfg.ch, 50000, cfg.window, check_seed(cfg, k++))));
  }
  {
    InterfererSpec ifs;
    ifs.kind = InterfererKind::poisson_line;
    ifs.nu = 0.01;
    ifs.lambda_prime = 0.01;
    r.checks.push_back(mc_check(
        "field_delay_factor_line",
        expected_delay_factor_poisson_line(rr, ifs.nu, ifs.lambda_prime, mac, cfg.ch),
        mc::estimate_field_delay_factor(rr, ifs, mac, cfg.ch, 20000, cfg.window,
                                        check_seed(cfg, k++))));
  }
  bool dominated = true;
  const double pairs[][2] = {{50.0, 1e-5}, {100.0, 1e-4}, {150.0, 2e-4}, {75.0, 5e-5}, {120.0, 1e-4}};
  for (const auto& pr : pairs) {
    const double ep = expected_delay_factor_poisson_field(pr[0], pr[1], mac, cfg.ch);
    const double el =
        expected_delay_factor_poisson_line(pr[0], pr[1] / 0.01, 0.01, mac, cfg.ch);
    dominated = dominated && el >= ep * (1.0 - 1e-6);
  }
  r.checks.push_back(predicate_check("line_dominates_field_5pt", dominated));
  finish(r);
  return r;
}

SuiteResult suite_lattice(const RunConfig& cfg) {
  SuiteResult r{"lattice", {}, false};
  std::uint64_t k = 500;
  for (double w : {0.0, 1e-11}) {
    LatticeRouteConfig lc = cfg.lattice();
    lc.base.ch.W = w;
    const ExtendedDelay exact = lattice_mean_local_delay(lc, cfg.ifs, cfg.lattice_terms);
    const std::uint64_t n = w > 0.0 ? 30000 : 10000;
    const mc::DelayEstimate est =
        mc::simulate_lattice_local_delay(lc, cfg.ifs, n, cfg.window, check_seed(cfg, k++));
    const std::string tag = w > 0.0 ? "w1e-11" : "w0";
    r.checks.push_back(mc_check("lattice_delay_" + tag, exact.slots, est.overall));
    r.checks.push_back(predicate_check("lattice_delay_" + tag + "_converged", !est.diverged));
  }
  finish(r);
  return r;
}

}  // namespace

const std::vector<std::string>& all_validation_suites() {
  static const std::vector<std::string> names{"fixed", "capture", "local-delay",
                                              "e2e", "fields", "lattice"};
  return names;
}

SuiteResult run_validation_suite(const std::string& suite, const RunConfig& cfg) {
  if (suite == "fixed") return suite_fixed(cfg);
  if (suite == "capture") return suite_capture(cfg);
  if (suite == "local-delay") return suite_local_delay(cfg);
  if (suite == "e2e") return suite_e2e(cfg);
  if (suite == "fields") return suite_fields(cfg);
  if (suite == "lattice") return suite_lattice(cfg);
  throw std::invalid_argument("unknown validation suite: " + suite);
}

std::string format_suite_report(const SuiteResult& result) {
  std::ostringstream out;
  out << "suite " << result.suite << "\n";
  for (const CheckResult& c : result.checks) {
    out << "  " << (c.pass ? "PASS" : "FAIL") << " " << c.name
        << "  expected=" << format_double(c.expected) << " observed=" << format_double(c.observed);
    if (c.sigma > 0.0)
      out << " sigma=" << format_double(c.sigma) << " z=" << format_double(c.z);
    out << "\n";
  }
  out << "suite " << result.suite << ": " << (result.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace alohar
