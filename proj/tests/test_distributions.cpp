#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "stsp/distributions.hpp"
#include "stsp/special_math.hpp"

using namespace stsp;
using namespace stsp::dist;

namespace {

// |sample mean - mu| < 4 SE and |sample var - var| < 4 SE(var)
void check_moments(const std::vector<double>& xs, double mean, double var) {
  auto m = oracle::moments(xs);
  CHECK(std::fabs(m.mean - mean) < 4.0 * m.se);
  double v = m.sd * m.sd;
  double m4 = 0.0;
  for (double x : xs) {
    double d = x - m.mean;
    m4 += d * d * d * d;
  }
  m4 /= m.n;
  double se_var = std::sqrt(std::max(m4 - v * v, 1e-300) / m.n);
  CHECK(std::fabs(v - var) < 4.0 * se_var);
}

}  // namespace

TEST_CASE("negbin_logpmf closed-form values") {
  CHECK(negbin_logpmf({1.0, 0.5}, 0) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-13));
  double expect = std::log(4.0 * 0.0625 * 0.421875);
  CHECK(negbin_logpmf({2.0, 0.25}, 3) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(negbin_logpmf({2.0, 0.25}, -1) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("negbin matches its gamma-Poisson mixture") {
  // lambda ~ Gamma(a, b), X | lambda ~ Poisson(lambda) => NB(a, b/(1+b))
  double a = 2.5, b = 1.5;
  NegBinLaw law{a, b / (1.0 + b)};
  for (long k = 0; k <= 10; ++k) {
    double ref = std::exp(oracle::log_exp_sinh_0inf([&](double lam) {
      return poisson_logpmf(lam, k) + a * std::log(b) +
             (a - 1.0) * std::log(lam) - b * lam - std::lgamma(a);
    }));
    CHECK(std::exp(negbin_logpmf(law, k)) == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("negbin pmf normalizes and has the stated mean") {
  NegBinLaw law{3.7, 0.35};
  long hi = negbin_quantile(law, 1.0 - 1e-12);
  double total = 0.0, mean = 0.0;
  for (long k = 0; k <= hi; ++k) {
    double p = std::exp(negbin_logpmf(law, k));
    total += p;
    mean += k * p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mean == doctest::Approx(negbin_mean(law)).epsilon(1e-8));
}

TEST_CASE("quantiles bracket their laws") {
  NegBinLaw law{5.0, 0.4};
  long lo = negbin_quantile(law, 0.025), hi = negbin_quantile(law, 0.975);
  CHECK(lo < hi);
  CHECK(lo <= static_cast<long>(negbin_mean(law)));
  CHECK(hi >= static_cast<long>(negbin_mean(law)));
  CHECK(poisson_quantile({0.0}, 0.975) == 0);
  CHECK(negbin_quantile({5.0, 1.0}, 0.975) == 0);
}

TEST_CASE("gamma sampler moments") {
  Rng rng(2024, 1);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = rng.gamma(1.0, 1.0);
  auto m = oracle::moments(xs);
  CHECK(std::fabs(m.mean - 1.0) < 0.02);  // exponential
  for (auto& x : xs) x = rng.gamma(3.7, 2.2);
  check_moments(xs, 3.7 / 2.2, 3.7 / (2.2 * 2.2));
  // shape < 1 branch
  for (auto& x : xs) x = rng.gamma(0.4, 1.3);
  check_moments(xs, 0.4 / 1.3, 0.4 / (1.3 * 1.3));
}

TEST_CASE("beta sampler moments") {
  Rng rng(99, 0);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = rng.beta(2.0, 3.0);
  double mean = 2.0 / 5.0;
  double var = 2.0 * 3.0 / (25.0 * 6.0);
  check_moments(xs, mean, var);
}

TEST_CASE("poisson sampler moments and degenerate case") {
  Rng rng(7, 3);
  for (int i = 0; i < 1000; ++i) CHECK(rng.poisson(0.0) == 0);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = static_cast<double>(rng.poisson(4.2));
  check_moments(xs, 4.2, 4.2);
  for (auto& x : xs) x = static_cast<double>(rng.poisson(137.0));  // PTRS branch
  check_moments(xs, 137.0, 137.0);
}

TEST_CASE("negbin sampler matches analytic mean") {
  // p from alpha = 0.3, r = 10, first observation: p = 1/(1 + 0.3 I(10,1))
  double I1 = math::i_integral(10.0, 1, 0.3);
  NegBinLaw law{60.0, 1.0 / (1.0 + 0.3 * I1)};
  Rng rng(5150, 0);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = static_cast<double>(rng.negbin(law));
  double p = law.success_prob;
  check_moments(xs, negbin_mean(law), law.size * (1.0 - p) / (p * p));
}

TEST_CASE("identical seeds give identical streams") {
  Rng a(123, 7), b(123, 7), c(123, 8);
  bool all_same = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    double xa = a.gamma(2.0, 1.0) + a.uniform01() + a.poisson(3.0);
    double xb = b.gamma(2.0, 1.0) + b.uniform01() + b.poisson(3.0);
    double xc = c.gamma(2.0, 1.0) + c.uniform01() + c.poisson(3.0);
    all_same = all_same && (xa == xb);
    any_diff = any_diff || (xa != xc);
  }
  CHECK(all_same);
  CHECK(any_diff);
}

TEST_CASE("h-sampler envelope bound holds for r >= 1") {
  // 1 - (1-y)^r <= r y on (0,1)
  Rng rng(1, 0);
  for (double r : {1.0, 2.0, 10.0}) {
    for (int i = 0; i < 2000; ++i) {
      double y = rng.uniform01();
      double ratio = -std::expm1(r * std::log1p(-y)) / (r * y);
      CHECK(ratio > 0.0);
      CHECK(ratio <= 1.0 + 1e-12);
    }
  }
}

namespace {

// exact mass of the new-trait rate density on s-intervals, via the y-space
// integrand (1 - (1-y)^r) y^{-1-a} (1-y)^{rn} on [ya, yb]
double h_target_mass(double r, long n, double alpha, double y_lo, double y_hi) {
  return oracle::tanh_sinh_01([&](double t, double) {
    double y = y_lo + (y_hi - y_lo) * t;
    if (y <= 0.0 || y >= 1.0) return 0.0;
    double l1 = std::log1p(-y);
    double le = std::log(-std::expm1(r * l1)) +
                (-1.0 - alpha) * std::log(y) + r * n * l1;
    return (y_hi - y_lo) * std::exp(le);
  });
}

}  // namespace

TEST_CASE("h-sampler histogram matches the normalized target") {
  const double r = 10.0, alpha = 0.3;
  const long n = 3;
  math::StableParams params(alpha, 60.0, 1.0, r);
  Rng rng(31337, 0);
  const int N = 100'000;
  std::vector<double> s_edges = {0.0,  0.005, 0.01, 0.02, 0.035, 0.06,
                                 0.1,  0.15,  0.25, 0.4,  0.7,   1e9};
  std::vector<double> counts(s_edges.size() - 1, 0.0);
  for (int i = 0; i < N; ++i) {
    double s = sample_h_new_trait(n, params, rng);
    CHECK(s > 0.0);
    auto it = std::upper_bound(s_edges.begin(), s_edges.end(), s);
    counts[static_cast<size_t>(it - s_edges.begin()) - 1] += 1.0;
  }
  double norm = h_target_mass(r, n, alpha, 0.0, 1.0);
  double sup = 0.0;
  for (size_t b = 0; b + 1 < s_edges.size(); ++b) {
    double y_lo = -std::expm1(-s_edges[b]);
    double y_hi = -std::expm1(-std::min(s_edges[b + 1], 700.0));
    double exact = h_target_mass(r, n, alpha, y_lo, y_hi) / norm;
    sup = std::max(sup, std::fabs(counts[b] / N - exact));
  }
  CHECK(sup < 0.02);
}

TEST_CASE("h-sampler with r=1, n=0 has Beta-transform law") {
  // target prop to (1 - e^{-s})^{-alpha} e^{-s}: Y = 1 - e^{-s} ~ Beta(1-a, 1),
  // so F(s) = (1 - e^{-s})^{1-alpha} exactly
  const double alpha = 0.45;
  math::StableParams params(alpha, 1.0, 1.0, 1.0);
  Rng rng(808, 2);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = sample_h_new_trait(0, params, rng);
  std::sort(xs.begin(), xs.end());
  for (double p : {0.25, 0.5, 0.75}) {
    double q = xs[static_cast<size_t>(p * xs.size())];
    double F = std::pow(-std::expm1(-q), 1.0 - alpha);
    CHECK(std::fabs(F - p) < 0.01);
  }
}

TEST_CASE("h-sampler concentrates near zero for large n") {
  const double r = 10.0;
  const long n = 1000;
  math::StableParams params(0.3, 60.0, 1.0, r);
  Rng rng(4242, 0);
  std::vector<double> xs(20'000);
  for (auto& x : xs) x = sample_h_new_trait(n, params, rng);
  std::sort(xs.begin(), xs.end());
  double q99 = xs[static_cast<size_t>(0.99 * xs.size())];
  CHECK(q99 < 10.0 / (r * n + 1.0));
}

TEST_CASE("h-sampler accepts r < 1") {
  math::StableParams params(0.5, 1.0, 1.0, 0.4);
  Rng rng(5, 5);
  std::vector<double> xs(50'000);
  for (auto& x : xs) x = sample_h_new_trait(2, params, rng);
  std::vector<double> s_edges = {0.0, 0.05, 0.15, 0.3, 0.6, 1.0, 2.0, 1e9};
  std::vector<double> counts(s_edges.size() - 1, 0.0);
  for (double s : xs) {
    auto it = std::upper_bound(s_edges.begin(), s_edges.end(), s);
    counts[static_cast<size_t>(it - s_edges.begin()) - 1] += 1.0;
  }
  double norm = h_target_mass(0.4, 2, 0.5, 0.0, 1.0);
  for (size_t b = 0; b + 1 < s_edges.size(); ++b) {
    double y_lo = -std::expm1(-s_edges[b]);
    double y_hi = -std::expm1(-std::min(s_edges[b + 1], 700.0));
    double exact = h_target_mass(0.4, 2, 0.5, y_lo, y_hi) / norm;
    CHECK(std::fabs(counts[b] / xs.size() - exact) < 0.02);
  }
}

TEST_CASE("zero-truncated score sampler") {
  Rng rng(2718, 0);
  const double s = 1.0, r = 10.0;
  const int N = 100'000;
  std::vector<long> counts(40, 0);
  for (int i = 0; i < N; ++i) {
    long a = sample_score_given_rate(s, r, rng);
    CHECK(a >= 1);
    if (a < static_cast<long>(counts.size())) ++counts[a];
  }
  NegBinLaw law{r, std::exp(-s)};
  double truncation = -std::expm1(negbin_logpmf(law, 0) * 1.0);
  // truncation = 1 - pmf(0)
  truncation = 1.0 - std::exp(negbin_logpmf(law, 0));
  for (long k = 1; k <= 20; ++k) {
    double exact = std::exp(negbin_logpmf(law, k)) / truncation;
    double emp = static_cast<double>(counts[k]) / N;
    double se = std::sqrt(exact * (1.0 - exact) / N);
    CHECK(std::fabs(emp - exact) < 4.0 * se + 1e-12);
  }
}

TEST_CASE("zero-truncated sampler at tiny rates stays exact") {
  Rng rng(1234, 9);
  const double s = 1e-6, r = 10.0;  // display probability ~ 1e-5
  // Pr(A = 1 | A >= 1) -> 1 as s -> 0
  NegBinLaw law{r, std::exp(-s)};
  double p1 = std::exp(negbin_logpmf(law, 1)) /
              (1.0 - std::exp(negbin_logpmf(law, 0)));
  long ones = 0;
  const int N = 20'000;
  for (int i = 0; i < N; ++i)
    if (sample_score_given_rate(s, r, rng) == 1) ++ones;
  double se = std::sqrt(p1 * (1.0 - p1) / N);
  CHECK(std::fabs(static_cast<double>(ones) / N - p1) < 4.0 * se + 1e-6);
}

TEST_CASE("truncated pmf approaches untruncated as s grows") {
  const double s = 5.0, r = 10.0;
  NegBinLaw law{r, std::exp(-s)};
  double pi0 = std::exp(negbin_logpmf(law, 0));
  for (long k = 1; k <= 10; ++k) {
    double truncated = std::exp(negbin_logpmf(law, k)) / (1.0 - pi0);
    double full = std::exp(negbin_logpmf(law, k));
    CHECK(std::fabs(truncated - full) <= 1e-15);
  }
}

TEST_CASE("grid sampler") {
  Rng rng(55, 0);
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> single{ninf, -2.0, ninf};
  for (int i = 0; i < 200; ++i) CHECK(sample_grid_pmf(single, rng) == 1);

  std::vector<double> uniform{0.5, 0.5, 0.5, 0.5};  // unnormalized
  std::vector<int> counts(4, 0);
  const int N = 100'000;
  for (int i = 0; i < N; ++i) ++counts[sample_grid_pmf(uniform, rng)];
  for (int c : counts)
    CHECK(std::fabs(c / static_cast<double>(N) - 0.25) < 0.006);

  std::vector<double> degenerate{ninf, ninf};
  CHECK_THROWS_AS(sample_grid_pmf(degenerate, rng), ConfigError);
}
