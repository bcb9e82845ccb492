#include "stsp/distributions.hpp"

#include <cmath>
#include <limits>

namespace stsp::dist {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0xda3e39cb94b95bdbULL * (stream + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  gen_.seed(seq);
}

double Rng::uniform01() {
  for (;;) {
    double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::normal() {
  for (;;) {
    double u = 2.0 * uniform01() - 1.0;
    double v = 2.0 * uniform01() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0)
      return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma sampler: shape and rate must be > 0");
  if (shape < 1.0) {
    // boost a Gamma(shape+1) draw down
    double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform01(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform01();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
      return d * v / rate;
  }
}

double Rng::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("beta sampler: parameters must be > 0");
  for (;;) {
    double x = gamma(a, 1.0);
    double y = gamma(b, 1.0);
    if (x + y > 0.0) return x / (x + y);
  }
}

long Rng::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean))
    throw std::invalid_argument("poisson sampler: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // inversion by sequential search
    double p = std::exp(-mean), cum = p, u = uniform01();
    long k = 0;
    while (u > cum && k < 2000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
    }
    return k;
  }
  // PTRS transformed rejection (Hormann), exact for mean >= 10
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = uniform01() - 0.5;
    double v = uniform01();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0))
      return static_cast<long>(kf);
  }
}

long Rng::negbin(const NegBinLaw& law) {
  if (!(law.size > 0.0) || !(law.success_prob > 0.0) ||
      law.success_prob > 1.0)
    throw std::invalid_argument("negbin sampler: invalid parameters");
  if (law.success_prob == 1.0) return 0;
  double rate = law.success_prob / (1.0 - law.success_prob);
  return poisson(gamma(law.size, rate));
}

double negbin_logpmf(const NegBinLaw& law, long k) {
  if (!(law.size > 0.0) || !(law.success_prob > 0.0) ||
      law.success_prob > 1.0)
    throw std::invalid_argument("negbin_logpmf: invalid parameters");
  if (k < 0) return kNegInf;
  if (law.success_prob == 1.0) return k == 0 ? 0.0 : kNegInf;
  double kd = static_cast<double>(k);
  return std::lgamma(kd + law.size) - std::lgamma(law.size) -
         std::lgamma(kd + 1.0) + law.size * std::log(law.success_prob) +
         kd * std::log1p(-law.success_prob);
}

double poisson_logpmf(double mean, long k) {
  if (mean < 0.0) throw std::invalid_argument("poisson_logpmf: mean < 0");
  if (k < 0) return kNegInf;
  if (mean == 0.0) return k == 0 ? 0.0 : kNegInf;
  double kd = static_cast<double>(k);
  return kd * std::log(mean) - mean - std::lgamma(kd + 1.0);
}

namespace {

template <typename LogPmf>
long quantile_by_summation(LogPmf&& logpmf, double prob) {
  if (!(prob >= 0.0 && prob < 1.0))
    throw std::invalid_argument("quantile: prob must lie in [0, 1)");
  double cum = 0.0;
  for (long k = 0; k < 100'000'000; ++k) {
    cum += std::exp(logpmf(k));
    if (cum >= prob) return k;
  }
  throw NumericalError("quantile: pmf summation did not reach target");
}

}  // namespace

long negbin_quantile(const NegBinLaw& law, double prob) {
  if (law.success_prob == 1.0) return 0;
  return quantile_by_summation(
      [&](long k) { return negbin_logpmf(law, k); }, prob);
}

long poisson_quantile(const PoissonLaw& law, double prob) {
  if (law.mean == 0.0) return 0;
  return quantile_by_summation(
      [&](long k) { return poisson_logpmf(law.mean, k); }, prob);
}

double sample_h_new_trait(long n, const math::StableParams& params, Rng& rng) {
  if (n < 0) throw std::invalid_argument("sample_h_new_trait: n must be >= 0");
  const double r = params.r;
  const double a = 1.0 - params.alpha;
  const double rn = r * static_cast<double>(n);
  const bool wide = r >= 1.0;
  const double beta_b = wide ? rn + 1.0 : rn + r;
  for (long iter = 0; iter < 10'000'000; ++iter) {
    double y = rng.beta(a, beta_b);
    if (y <= 0.0 || y >= 1.0) continue;
    double l1 = std::log1p(-y);
    double num = -std::expm1(r * l1);  // 1 - (1-y)^r
    double den = wide ? r * y : r * y * std::exp((r - 1.0) * l1);
    double accept = num / den;
    if (rng.uniform01() <= accept) return -l1;
  }
  throw NumericalError("sample_h_new_trait: rejection sampler stalled");
}

long sample_score_given_rate(double s, double r, Rng& rng) {
  if (!(s > 0.0)) throw std::invalid_argument("sample_score_given_rate: s must be > 0");
  if (!(r > 0.0)) throw std::invalid_argument("sample_score_given_rate: r must be > 0");
  const double p = std::exp(-s);
  const double display_prob = -std::expm1(-s * r);  // 1 - p^r
  if (display_prob >= 0.05) {
    NegBinLaw law{r, p};
    for (long iter = 0; iter < 10'000'000; ++iter) {
      long k = rng.negbin(law);
      if (k >= 1) return k;
    }
    throw NumericalError("sample_score_given_rate: rejection stalled");
  }
  // small display probability: inverse-CDF walk on the truncated pmf,
  // which is then concentrated at tiny values
  double u = rng.uniform01() * display_prob;
  double pmf = r * std::exp(-s * r) * (-std::expm1(-s));  // k = 1
  double cum = pmf;
  long k = 1;
  while (u > cum && k < 10'000'000) {
    pmf *= (static_cast<double>(k) + r) / (static_cast<double>(k) + 1.0) *
           (-std::expm1(-s));
    ++k;
    cum += pmf;
  }
  return k;
}

std::size_t sample_grid_pmf(std::span<const double> logpmf, Rng& rng) {
  if (logpmf.empty())
    throw ConfigError("sample_grid_pmf: empty table");
  double mx = kNegInf;
  for (double v : logpmf) mx = std::max(mx, v);
  if (mx == kNegInf)
    throw ConfigError("sample_grid_pmf: all table entries are -inf");
  double total = 0.0;
  for (double v : logpmf) total += std::exp(v - mx);
  double u = rng.uniform01() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < logpmf.size(); ++i) {
    cum += std::exp(logpmf[i] - mx);
    if (u <= cum) return i;
  }
  return logpmf.size() - 1;
}

}  // namespace stsp::dist
