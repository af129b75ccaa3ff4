#pragma once

// Deterministic numerical kernels shared by the analytic layer: adaptive
// Gauss-Kronrod quadrature on finite and semi-infinite intervals, nested 2D
// integrals, truncated two-sided lattice sums, bracketed bisection, and
// golden-section maximization. Pure functions, no shared state.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace alohar::num {

struct Tolerance {
  double rel = 1e-8;          // relative tolerance on the result
  double abs = 1e-12;         // absolute floor (wins when the result is ~0)
  int max_subdivisions = 2000;
};

struct Bracket {
  double lo = 0.0;
  double hi = 1.0;
};

inline void check(const Tolerance& tol) {
  if (!(tol.rel > 0.0) || !(tol.abs >= 0.0) || tol.max_subdivisions < 1)
    throw std::invalid_argument("numerics: tolerance must satisfy rel > 0, abs >= 0, max_subdivisions >= 1");
}

// Raised when an adaptive scheme exhausts its budget; carries the best
// estimate and its error bound so callers can degrade deliberately.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& msg, double best, double bound)
      : std::runtime_error(msg), best_(best), bound_(bound) {}
  double best_estimate() const { return best_; }
  double error_bound() const { return bound_; }

 private:
  double best_;
  double bound_;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule; nodes are the
// positive half on [-1,1], node 7 is the center.
inline constexpr double kGkNode[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double kGkWeight[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double kGaussWeight[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

enum class PanelState { ok, pos_inf, neg_inf };

struct Panel {
  double a, b;
  double value;  // K15 estimate
  double err;    // |K15 - G7|
  PanelState state;
};

// One K15/G7 evaluation over [a,b]. A +-inf node value short-circuits the
// panel (the integral of a nonnegative unbounded integrand is its limit);
// NaN is always an error.
template <class F>
Panel eval_panel(F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double k15 = 0.0, g7 = 0.0;
  int n_pos_inf = 0, n_neg_inf = 0;
  auto account = [&](double v, int i) {
    if (std::isnan(v))
      throw QuadratureError("integrand returned NaN", 0.0, std::numeric_limits<double>::infinity());
    if (std::isinf(v)) {
      (v > 0 ? n_pos_inf : n_neg_inf)++;
      return;
    }
    k15 += kGkWeight[i] * v;
    if (i % 2 == 1) g7 += kGaussWeight[i / 2] * v;
  };
  account(f(mid), 7);
  for (int i = 0; i < 7; ++i) {
    account(f(mid - half * kGkNode[i]), i);
    account(f(mid + half * kGkNode[i]), i);
  }
  if (n_pos_inf && n_neg_inf)
    throw QuadratureError("integrand returned both +inf and -inf", 0.0,
                          std::numeric_limits<double>::infinity());
  Panel p{a, b, k15 * half, std::abs(k15 - g7) * half, PanelState::ok};
  if (n_pos_inf) p.state = PanelState::pos_inf;
  if (n_neg_inf) p.state = PanelState::neg_inf;
  return p;
}

}  // namespace detail

// Adaptive quadrature of f over [a,b]: worst-error panel is split first until
// the summed error bound meets max(tol.abs, tol.rel*|I|).
template <class F>
double integrate_finite(F&& f, double a, double b, Tolerance tol = {}) {
  check(tol);
  if (!(a <= b)) throw std::invalid_argument("integrate_finite: interval needs a <= b");
  if (a == b) return 0.0;
  using detail::Panel;
  using detail::PanelState;
  auto worse = [](const Panel& x, const Panel& y) { return x.err < y.err; };
  std::vector<Panel> heap;
  Panel first = detail::eval_panel(f, a, b);
  if (first.state == PanelState::pos_inf) return std::numeric_limits<double>::infinity();
  if (first.state == PanelState::neg_inf) return -std::numeric_limits<double>::infinity();
  heap.push_back(first);
  double total = first.value, toterr = first.err;
  while (toterr > std::max(tol.abs, tol.rel * std::abs(total))) {
    if (static_cast<int>(heap.size()) >= tol.max_subdivisions)
      throw QuadratureError("integrate_finite: subdivision budget exhausted", total, toterr);
    std::pop_heap(heap.begin(), heap.end(), worse);
    Panel p = heap.back();
    heap.pop_back();
    const double m = 0.5 * (p.a + p.b);
    if (m <= p.a || m >= p.b)  // interval at double resolution; accept as is
      return total;
    Panel l = detail::eval_panel(f, p.a, m);
    if (l.state == PanelState::pos_inf) return std::numeric_limits<double>::infinity();
    if (l.state == PanelState::neg_inf) return -std::numeric_limits<double>::infinity();
    Panel r = detail::eval_panel(f, m, p.b);
    if (r.state == PanelState::pos_inf) return std::numeric_limits<double>::infinity();
    if (r.state == PanelState::neg_inf) return -std::numeric_limits<double>::infinity();
    total += l.value + r.value - p.value;
    toterr += l.err + r.err - p.err;
    heap.push_back(l);
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(r);
    std::push_heap(heap.begin(), heap.end(), worse);
  }
  return total;
}

// Integral of f over [a, inf) through the substitution u = a + x/(1-x), which
// maps [a, inf) onto [0, 1). Suited to smooth power-law tails decaying faster
// than u^-2; a non-integrable tail keeps the transformed error bound large and
// surfaces as the subdivision-budget error.
template <class F>
double integrate_semi_infinite(F&& f, double a, Tolerance tol = {}) {
  auto g = [&f, a](double x) {
    const double om = 1.0 - x;
    const double u = a + x / om;
    return f(u) / (om * om);
  };
  return integrate_finite(g, 0.0, 1.0, tol);
}

// Nested integral of f(s,t) over the quarter plane s,t in [0, inf), inner in
// t. An inner failure is rethrown naming the outer coordinate.
template <class F>
double integrate_2d_nested(F&& f, Tolerance tol = {}) {
  auto outer = [&f, tol](double s) {
    try {
      return integrate_semi_infinite([&f, s](double t) { return f(s, t); }, 0.0, tol);
    } catch (const QuadratureError& e) {
      throw QuadratureError("inner integral failed at outer coordinate s=" + std::to_string(s) +
                                ": " + e.what(),
                            e.best_estimate(), e.error_bound());
    }
  };
  return integrate_semi_infinite(outer, 0.0, tol);
}

struct LatticeSum {
  double value = 0.0;
  long truncation = 0;  // largest |n| summed
};

// Two-sided sum of g(n) over n != 0 for terms decaying at least like
// |n|^-decay with decay > 1. Truncated at N once the tail bound
// (|g(N)|+|g(-N)|) * N/(decay-1) falls below tol.abs; when decay is not
// supplied it is estimated from the last doubling.
template <class G>
LatticeSum lattice_log_sum(G&& g, Tolerance tol = {}, double decay = 0.0) {
  check(tol);
  double sum = 0.0;
  long upto = 0;
  double prev_edge = std::numeric_limits<double>::infinity();
  for (long block = 8;; block *= 2) {
    for (long n = upto + 1; n <= block; ++n) sum += g(n) + g(-n);
    upto = block;
    const double edge = std::abs(g(block)) + std::abs(g(-block));
    if (edge == 0.0) return {sum, upto};
    double alpha = decay;
    if (!(alpha > 1.0) && prev_edge > edge && std::isfinite(prev_edge))
      alpha = std::log2(prev_edge / edge);
    prev_edge = edge;
    if (alpha > 1.0) {
      const double bound = edge * static_cast<double>(block) / (alpha - 1.0);
      if (bound <= tol.abs) return {sum, upto};
      if (block >= (1L << 24))
        throw QuadratureError("lattice_log_sum: tail bound not reached by n=" + std::to_string(block),
                              sum, bound);
    } else if (block >= 1024) {
      throw QuadratureError("lattice_log_sum: terms not decaying", sum,
                            std::numeric_limits<double>::infinity());
    }
  }
}

// Bisection on a sign-changing bracket; terminates when the bracket width is
// at most tol.abs.
template <class F>
double find_root(F&& f, Bracket br, Tolerance tol = {}) {
  check(tol);
  double lo = br.lo, hi = br.hi;
  if (!(lo < hi)) throw std::invalid_argument("find_root: bracket needs lo < hi");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(flo * fhi < 0.0)) throw std::invalid_argument("find_root: no sign change over bracket");
  for (int it = 0; it < 2000 && hi - lo > tol.abs; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

struct Peak {
  double argmax = 0.0;
  double max = 0.0;
};

// Golden-section maximization of a unimodal f; ties move toward the lower
// argument. On a non-unimodal f this converges to some local optimum.
template <class F>
Peak maximize_unimodal(F&& f, Bracket br, Tolerance tol = {}) {
  check(tol);
  double lo = br.lo, hi = br.hi;
  if (!(lo < hi)) throw std::invalid_argument("maximize_unimodal: bracket needs lo < hi");
  constexpr double invphi = 0.6180339887498949;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 500 && hi - lo > tol.abs; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = f(d);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, f(x)};
}

}  // namespace alohar::num
