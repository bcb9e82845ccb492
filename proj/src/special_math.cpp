#include "stsp/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stsp::math {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Gauss-Legendre abscissae/weights on [-1,1], orders 8 and 16 (symmetric).
constexpr double kGL8X[4] = {0.1834346424956498, 0.5255324099163290,
                             0.7966664774136267, 0.9602898564975363};
constexpr double kGL8W[4] = {0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};
constexpr double kGL16X[8] = {0.0950125098376374, 0.2816035507792589,
                              0.4580167776572274, 0.6178762444026438,
                              0.7554044083550030, 0.8656312023878318,
                              0.9445750230732326, 0.9894009349916499};
constexpr double kGL16W[8] = {0.1894506104550685, 0.1826034150449236,
                              0.1691565193950025, 0.1495959888165767,
                              0.1246289712555339, 0.0951585116824928,
                              0.0622535239386479, 0.0271524594117541};

// log of sum_i w_i * (b-a)/2 * exp(g(m + h x_i)) over the symmetric pairs.
template <int Half>
double panel_log_sum(const std::function<double(double)>& g, double a,
                     double b, const double (&xs)[Half],
                     const double (&ws)[Half], long& evals) {
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  double vals[2 * Half];
  double mx = kNegInf;
  for (int i = 0; i < Half; ++i) {
    const double lw = std::log(ws[i]);
    double v1 = g(m - h * xs[i]) + lw;
    double v2 = g(m + h * xs[i]) + lw;
    vals[2 * i] = v1;
    vals[2 * i + 1] = v2;
    mx = std::max(mx, std::max(v1, v2));
  }
  evals += 2 * Half;
  if (mx == kNegInf) return kNegInf;
  if (std::isnan(mx))
    throw NumericalError("adaptive quadrature: integrand returned NaN");
  double s = 0.0;
  for (double v : vals) s += std::exp(v - mx);
  return mx + std::log(s) + std::log(h);
}

double tol_from_order(int order) {
  double t = std::pow(10.0, -(4.0 + order / 32.0));
  return std::clamp(t, 1e-13, 1e-6);
}

// Symmetric tridiagonal QL with implicit shifts, accumulating only the first
// row of the eigenvector matrix (all that Golub-Welsch weights need).
// d: diagonal, e: subdiagonal (e[i] couples i and i+1), z: starts as e_0.
void tql_first_row(std::vector<double>& d, std::vector<double>& e,
                   std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  if (n == 1) return;
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0, m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd)
          break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw NumericalError("gauss_laguerre: eigenvalue QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          double bb = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * bb;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - bb;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double mx = std::max(a, b);
  return mx + std::log1p(std::exp(std::min(a, b) - mx));
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be > 0");
  return std::lgamma(x);
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("log_beta: arguments must be > 0");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

QuadratureRule gauss_laguerre(int order) {
  if (order < 1 || order > 512)
    throw ConfigError("gauss_laguerre: order must lie in [1, 512]");
  // Jacobi matrix of the monic Laguerre recurrence: a_k = 2k+1, b_k = k^2.
  std::vector<double> d(order), e(order > 1 ? order - 1 : 0), z(order, 0.0);
  for (int i = 0; i < order; ++i) d[i] = 2.0 * i + 1.0;
  for (int i = 0; i + 1 < order; ++i) e[i] = i + 1.0;
  z[0] = 1.0;
  tql_first_row(d, e, z);

  std::vector<int> idx(order);
  for (int i = 0; i < order; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = d[idx[i]];
    rule.weights[i] = z[idx[i]] * z[idx[i]];  // first moment of e^{-s} is 1
  }
  return rule;
}

double quadrature(const QuadratureRule& rule,
                  const std::function<double(double)>& f) {
  double s = 0.0;
  for (int i = 0; i < rule.order; ++i) s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

double log_adaptive_01(const std::function<double(double)>& g, double rel_tol,
                       int max_depth) {
  struct Panel {
    double a, b;
    int depth;
  };
  std::vector<Panel> stack;
  stack.reserve(256);
  // Dyadic seed panels toward both endpoints; [2^-60, 1-2^-60] covered once.
  for (int j = 59; j >= 1; --j)
    stack.push_back({std::ldexp(1.0, -(j + 1)), std::ldexp(1.0, -j), 0});
  for (int j = 1; j <= 59; ++j)
    stack.push_back({1.0 - std::ldexp(1.0, -j), 1.0 - std::ldexp(1.0, -(j + 1)), 0});

  long evals = 0;
  const long budget = 6'000'000;

  // First pass: a coarse total, so per-panel error estimates can be judged
  // against the global scale instead of panel-local noise.
  double total_hint = kNegInf;
  for (const Panel& p : stack)
    total_hint =
        log_add(total_hint, panel_log_sum<8>(g, p.a, p.b, kGL16X, kGL16W, evals));

  double acc = kNegInf;
  const double log_tol = std::log(rel_tol);
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    if (evals > budget)
      throw NumericalError("adaptive quadrature: evaluation budget exceeded");
    double i8 = panel_log_sum<4>(g, p.a, p.b, kGL8X, kGL8W, evals);
    double i16 = panel_log_sum<8>(g, p.a, p.b, kGL16X, kGL16W, evals);
    double log_err;
    if (i8 == kNegInf && i16 == kNegInf)
      log_err = kNegInf;
    else if (i8 == kNegInf)
      log_err = i16;
    else if (i16 == kNegInf)
      log_err = i8;
    else {
      double d = std::fabs(std::expm1(i8 - i16));
      log_err = d > 0.0 ? i16 + std::log(d) : kNegInf;
    }
    const double scale = std::max(total_hint, acc);
    bool pair_ok = i8 != kNegInf && i16 != kNegInf &&
                   std::fabs(i16 - i8) <= 0.25 * rel_tol;
    bool err_ok = log_err <= scale + log_tol - 7.0;
    if (log_err == kNegInf || pair_ok || err_ok || p.depth >= max_depth) {
      acc = log_add(acc, i16);
    } else {
      double mid = 0.5 * (p.a + p.b);
      stack.push_back({p.a, mid, p.depth + 1});
      stack.push_back({mid, p.b, p.depth + 1});
    }
  }
  return acc;
}

double log_power_integral_01(double beta,
                             const std::function<double(double)>& log_rest,
                             double rel_tol, int max_depth) {
  if (!(beta > -1.0))
    throw std::domain_error("log_power_integral_01: beta must be > -1");
  if (beta < 0.5) {
    // y = t^p with p = 1/(1+beta) turns y^beta dy into p dt exactly.
    const double p = 1.0 / (1.0 + beta);
    auto g = [&](double t) { return log_rest(std::pow(t, p)); };
    return std::log(p) + log_adaptive_01(g, rel_tol, max_depth);
  }
  auto g = [&](double y) { return beta * std::log(y) + log_rest(y); };
  return log_adaptive_01(g, rel_tol, max_depth);
}

double log_exp_weighted_integral(const std::function<double(double)>& log_f,
                                 double rel_tol) {
  auto g = [&](double y) { return log_f(-std::log1p(-y)); };
  return log_adaptive_01(g, rel_tol);
}

double i_integral_closed(double r, long k, double alpha) {
  long ri = std::llround(r);
  if (std::fabs(r - ri) > 1e-9 || ri < 1)
    throw std::invalid_argument("i_integral_closed: r must be a positive integer");
  if (k < 0) throw std::domain_error("i_integral_closed: k must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("i_integral_closed: alpha must lie in (0,1)");
  const long terms = ri * k;
  double b = 1.0 / (1.0 - alpha);  // B(1-alpha, 1)
  double acc = 0.0;
  for (long i = 1; i <= terms; ++i) {
    acc += b;
    b *= static_cast<double>(i) / (static_cast<double>(i) + 1.0 - alpha);
  }
  return acc;
}

namespace {

double log_i_integrand_rest(double y, double rk) {
  // log of (1 - (1-y)^{rk}) / y
  if (y < 1e-280) return std::log(rk);
  double u = rk * std::log1p(-y);
  return std::log(-std::expm1(u)) - std::log(y);
}

}  // namespace

double i_integral_quadrature(double r, long k, double alpha,
                             const QuadratureRule& rule) {
  if (k < 0) throw std::domain_error("i_integral: k must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("i_integral: alpha must lie in (0,1)");
  if (!(r > 0.0)) throw std::domain_error("i_integral: r must be > 0");
  if (k == 0) return 0.0;
  const double rk = r * static_cast<double>(k);
  auto lr = [rk](double y) { return log_i_integrand_rest(y, rk); };
  return std::exp(log_power_integral_01(-alpha, lr, tol_from_order(rule.order)));
}

double i_integral(double r, long k, double alpha, const QuadratureRule& rule) {
  if (std::fabs(r - std::llround(r)) < 1e-9 && std::llround(r) >= 1)
    return i_integral_closed(static_cast<double>(std::llround(r)), k, alpha);
  return i_integral_quadrature(r, k, alpha, rule);
}

double i_integral(double r, long k, double alpha) {
  if (std::fabs(r - std::llround(r)) < 1e-9 && std::llround(r) >= 1)
    return i_integral_closed(static_cast<double>(std::llround(r)), k, alpha);
  if (k == 0) return 0.0;
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("i_integral: alpha must lie in (0,1)");
  const double rk = r * static_cast<double>(k);
  auto lr = [rk](double y) { return log_i_integrand_rest(y, rk); };
  return std::exp(log_power_integral_01(-alpha, lr, 1e-10));
}

double i_tilde(double r, long n, double alpha, const QuadratureRule& rule) {
  if (n < 0) throw std::domain_error("i_tilde: n must be >= 0");
  long ri = std::llround(r);
  if (std::fabs(r - ri) < 1e-9 && ri >= 1) {
    // sum_{i = rn+1}^{r(n+1)} B(1-alpha, i), iterated to avoid cancellation
    long start = ri * n + 1;
    double b = std::exp(log_beta(1.0 - alpha, static_cast<double>(start)));
    double acc = 0.0;
    for (long i = start; i < start + ri; ++i) {
      acc += b;
      b *= static_cast<double>(i) / (static_cast<double>(i) + 1.0 - alpha);
    }
    return acc;
  }
  // integrand: (1-(1-y)^r)/y * (1-y)^{rn} * y^{-alpha}
  const double rn = r * static_cast<double>(n);
  auto lr = [r, rn](double y) {
    if (y < 1e-280) return std::log(r);
    double u = r * std::log1p(-y);
    return std::log(-std::expm1(u)) - std::log(y) + rn * std::log1p(-y);
  };
  return std::exp(
      log_power_integral_01(-alpha, lr, tol_from_order(rule.order)));
}

double log_f_integral(long n, long q, double r, double alpha,
                      const QuadratureRule& rule) {
  if (q < 1)
    throw ConfigError("f_integral: divergent integral, q must be >= 1");
  if (n < 1) throw std::domain_error("f_integral: n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("f_integral: alpha must lie in (0,1)");
  if (!(r > 0.0)) throw std::domain_error("f_integral: r must be > 0");
  const double rn = r * static_cast<double>(n);
  const double qd = static_cast<double>(q);
  const double logr = std::log(r);
  auto lr = [rn, qd, logr](double y) {
    if (y < 1e-280) return qd * logr;
    double l1 = std::log1p(-y);
    return qd * (logr + std::log(-l1) - std::log(y)) + rn * l1;
  };
  return log_power_integral_01(qd - 1.0 - alpha, lr, tol_from_order(rule.order));
}

double f_integral(long n, long q, double r, double alpha,
                  const QuadratureRule& rule) {
  return std::exp(log_f_integral(n, q, r, alpha, rule));
}

}  // namespace stsp::math
