#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "stsp/special_math.hpp"

namespace stsp::dist {

/// Pr(X = k) = C(k + size - 1, k) * p^size * (1-p)^k with p = success_prob;
/// mean = size (1-p)/p. This is the convention produced by mixing a
/// Poisson(lambda) over lambda ~ Gamma(size, rate b) with p = b/(1+b).
struct NegBinLaw {
  double size;
  double success_prob;
};

struct GammaLaw {
  double shape;
  double rate;  // mean = shape / rate
};

struct PoissonLaw {
  double mean;
};

/// Deterministic random stream. The generator is std::mt19937_64 (fully
/// specified by the C++ standard), seeded via a splitmix64 expansion of
/// (seed, stream); uniforms use the top 53 bits of each output. Identical
/// (seed, stream) pairs give bit-identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return gen_(); }
  double uniform01();  // strictly inside (0, 1)
  double normal();     // Marsaglia polar, spare discarded
  double gamma(double shape, double rate);  // Marsaglia-Tsang
  double beta(double a, double b);          // ratio of two gammas
  long poisson(double mean);                // inversion below 30, else PTRS
  long negbin(const NegBinLaw& law);        // gamma-Poisson mixture

 private:
  std::mt19937_64 gen_;
};

double negbin_logpmf(const NegBinLaw& law, long k);
double poisson_logpmf(double mean, long k);

inline double negbin_mean(const NegBinLaw& law) {
  return law.size * (1.0 - law.success_prob) / law.success_prob;
}

/// Smallest k with Pr(X <= k) >= prob, by pmf summation.
long negbin_quantile(const NegBinLaw& law, double prob);
long poisson_quantile(const PoissonLaw& law, double prob);

/// Latent rate H of a newly created trait after n observations, with density
/// proportional to (1 - e^{-rs}) (1 - e^{-s})^{-1-alpha} e^{-s(rn+1)}.
/// Exact rejection in y = 1 - e^{-s}: propose Beta(1-alpha, rn+1) for r >= 1
/// (bound 1-(1-y)^r <= ry), Beta(1-alpha, rn+r) for r < 1
/// (bound 1-(1-y)^r <= ry (1-y)^{r-1}).
double sample_h_new_trait(long n, const math::StableParams& params, Rng& rng);

/// Zero-truncated score draw: NegBin(size = r, success_prob = e^{-s})
/// conditioned on being >= 1.
long sample_score_given_rate(double s, double r, Rng& rng);

/// Exact categorical draw from an unnormalized log-pmf table.
/// Throws ConfigError if every entry is -inf.
std::size_t sample_grid_pmf(std::span<const double> logpmf, Rng& rng);

}  // namespace stsp::dist
