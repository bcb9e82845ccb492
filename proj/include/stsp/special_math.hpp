#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace stsp {

// Thrown when inputs describe an impossible or unsupported configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a numerical routine cannot deliver its accuracy contract.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace math {

/// Gauss-Laguerre rule: integrates f against the weight e^{-s} on (0, inf)
/// as sum_i weights[i] * f(nodes[i]). Exact for polynomials of degree
/// <= 2*order - 1; weights sum to 1.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Hyperparameters of the Stable scaled-process priors: stability index
/// alpha in (0,1), tilt order c > 0, total mass theta > 0 and score
/// dispersion r > 0.
struct StableParams {
  double alpha;
  double c;
  double theta;
  double r;

  StableParams(double alpha_, double c_, double theta_, double r_)
      : alpha(alpha_), c(c_), theta(theta_), r(r_) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("StableParams: alpha must lie in (0,1)");
    if (!(c > 0.0)) throw std::invalid_argument("StableParams: c must be > 0");
    if (!(theta > 0.0))
      throw std::invalid_argument("StableParams: theta must be > 0");
    if (!(r > 0.0)) throw std::invalid_argument("StableParams: r must be > 0");
  }
};

/// log Gamma(x) for x > 0. Throws std::domain_error on x <= 0.
double log_gamma(double x);

/// log B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// Gauss-Laguerre nodes/weights by Golub-Welsch, 1 <= order <= 512.
QuadratureRule gauss_laguerre(int order);

/// sum_i rule.weights[i] * f(rule.nodes[i])
double quadrature(const QuadratureRule& rule,
                  const std::function<double(double)>& f);

/// I(r, k) = int (1 - e^{-rsk}) (1 - e^{-s})^{-1-alpha} e^{-s} ds.
/// Dispatches to the closed-form Beta sum when r is integral, otherwise to
/// the adaptive quadrature path. rule.order scales the quadrature effort.
double i_integral(double r, long k, double alpha, const QuadratureRule& rule);
double i_integral(double r, long k, double alpha);

/// Closed form sum_{i=1}^{rk} B(1 - alpha, i); requires integral r.
double i_integral_closed(double r, long k, double alpha);

/// Quadrature evaluation of I(r, k), valid for any r > 0.
double i_integral_quadrature(double r, long k, double alpha,
                             const QuadratureRule& rule);

/// One-step increment I(r, n+1) - I(r, n), evaluated without cancellation.
double i_tilde(double r, long n, double alpha, const QuadratureRule& rule);

/// F(n, q, r, alpha) = int e^{-rsn} e^{-s} (1 - e^{-s})^{-1-alpha} (rs)^q ds,
/// finite for q >= 1. log_f_integral is the overflow-safe form used by the
/// marginal likelihoods (F grows like Gamma(q)).
double f_integral(long n, long q, double r, double alpha,
                  const QuadratureRule& rule);
double log_f_integral(long n, long q, double r, double alpha,
                      const QuadratureRule& rule);

/// log of int_0^1 y^beta exp(log_rest(y)) dy for beta > -1, with the
/// endpoint singularity removed by the substitution y = t^{1/(1+beta)}.
/// log_rest must be bounded above on (0,1); -inf values are fine.
double log_power_integral_01(double beta,
                             const std::function<double(double)>& log_rest,
                             double rel_tol = 1e-10, int max_depth = 30);

/// log of int_0^1 exp(g(y)) dy by adaptive Gauss-Legendre with dyadic
/// refinement toward both endpoints; accumulation is log-sum-exp.
double log_adaptive_01(const std::function<double(double)>& g,
                       double rel_tol = 1e-10, int max_depth = 30);

/// log of int_0^inf f(u) e^{-u} du via the exact map u = -log(1-y).
double log_exp_weighted_integral(const std::function<double(double)>& log_f,
                                 double rel_tol = 1e-10);

/// Numerically stable log(exp(a) + exp(b)).
double log_add(double a, double b);

}  // namespace math
}  // namespace stsp
