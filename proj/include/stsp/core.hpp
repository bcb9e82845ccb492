#pragma once

#include "stsp/dataset.hpp"
#include "stsp/distributions.hpp"
#include "stsp/special_math.hpp"

namespace stsp {

/// Exact log-marginal of a count dataset under the negative-binomial score
/// model. theta cancels and never enters; the normalizing power uses
/// 1 + alpha I(r, n).
double log_marginal_nb(const SuffStats& stats, const math::StableParams& p);

/// Log-marginal under the Poisson(r s) score model; per-trait factors are
/// the F integrals evaluated at the rule's accuracy.
double log_marginal_poisson(const SuffStats& stats,
                            const math::StableParams& p,
                            const math::QuadratureRule& rule);

/// Log-marginal of real-valued scores under the Gaussian spike-and-slab
/// score model (r is fixed to 1 in this model; p.r is ignored). Every trait
/// must carry an atom_param.
double log_marginal_spike_slab(const TraitDataset& data,
                               const math::StableParams& p,
                               const math::QuadratureRule& rule);

/// Log-marginal of a binary dataset under the stable-Beta scaled process.
/// Unlike the NB/Poisson models, theta does not cancel here.
double log_marginal_sbsp(const SuffStats& stats, const math::StableParams& p);

/// Law of Delta^{-alpha} given the data: Gamma(c + k_n, theta(1 + alpha I(r,n))).
dist::GammaLaw posterior_tilt(const SuffStats& stats,
                              const math::StableParams& p);

/// Number of unseen traits displayed by m further observations:
/// NegBin(c + k_n, (1 + alpha I(r,n)) / (1 + alpha I(r,n+m))).
dist::NegBinLaw unseen_traits_law(const SuffStats& stats,
                                  const math::StableParams& p, long m);

/// Truncated predictive pmf of the score a previously seen trait (totals q_l
/// over n observations) receives from the next observation:
///   Pr(A = k) = C(k+r-1, k) B(r(n+1)+1, q_l+k-alpha) / B(rn+1, q_l-alpha).
/// tail_mass reports the probability beyond grid_max; callers grow the grid
/// until it is below their tolerance.
struct PredictiveTable {
  std::vector<double> log_pmf;  // entries 0..grid_max
  double tail_mass = 0.0;
};

PredictiveTable predictive_old_trait_pmf(long q_l, long n,
                                         const math::StableParams& p,
                                         int grid_max);

}  // namespace stsp
