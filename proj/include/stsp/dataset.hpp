#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stsp/special_math.hpp"

namespace stsp {

enum class ScoreKind { count, binary, real };

/// One trait column: the observations displaying it and their scores.
/// Scores are strictly positive; zeros are implicit.
struct TraitRecord {
  std::string id;
  std::vector<std::pair<long, double>> entries;  // (obs index, score)
  std::optional<double> atom_param;  // spike-and-slab location eta
};

/// Sparse observation-by-trait score matrix.
struct TraitDataset {
  long n_obs = 0;
  ScoreKind kind = ScoreKind::count;
  std::vector<TraitRecord> traits;

  void validate() const;
};

/// Sufficient statistics of a count/binary dataset for the marginal
/// likelihoods. Sums over traits and scores are accumulated through ordered
/// histograms, so permuting observations or traits reproduces bit-identical
/// marginals.
struct SuffStats {
  long n = 0;
  long k_n = 0;
  std::vector<long> m;  // per-trait occurrence counts
  std::vector<long> q;  // per-trait score totals
  double r = 1.0;       // dispersion the binomial sums were built with
  double log_binom_sum = 0.0;      // sum log C(a + r - 1, a), NB score model
  double log_factorial_sum = 0.0;  // sum log a!, Poisson score model
  std::map<long, long> q_hist;     // q value -> number of traits
  std::map<long, long> score_hist; // score value -> number of entries

  /// Binomial-coefficient sum for a different dispersion, from score_hist.
  double binom_sum_for(double new_r) const;
};

/// Exact sufficient statistics; requires count or binary scores.
SuffStats suff_stats(const TraitDataset& data, double r);

}  // namespace stsp
