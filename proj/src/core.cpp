#include "stsp/core.hpp"

#include <algorithm>
#include <cmath>

namespace stsp {

using math::i_integral;
using math::log_beta;
using math::log_gamma;

double log_marginal_nb(const SuffStats& stats, const math::StableParams& p) {
  const double a = p.alpha, c = p.c;
  const double kd = static_cast<double>(stats.k_n);
  const double I = i_integral(p.r, stats.n, a);
  double lm = log_gamma(c + kd) - log_gamma(c) + kd * std::log(a) -
              (c + kd) * std::log1p(a * I);
  const double rn1 = p.r * static_cast<double>(stats.n) + 1.0;
  for (const auto& [q, cnt] : stats.q_hist)
    lm += cnt * log_beta(rn1, static_cast<double>(q) - a);
  lm += stats.binom_sum_for(p.r);
  return lm;
}

double log_marginal_poisson(const SuffStats& stats,
                            const math::StableParams& p,
                            const math::QuadratureRule& rule) {
  const double a = p.alpha, c = p.c;
  const double kd = static_cast<double>(stats.k_n);
  const double I = i_integral(p.r, stats.n, a, rule);
  double lm = log_gamma(c + kd) - log_gamma(c) + kd * std::log(a) -
              (c + kd) * std::log1p(a * I);
  for (const auto& [q, cnt] : stats.q_hist)
    lm += cnt * math::log_f_integral(stats.n, q, p.r, a, rule);
  lm -= stats.log_factorial_sum;
  return lm;
}

double log_marginal_spike_slab(const TraitDataset& data,
                               const math::StableParams& p,
                               const math::QuadratureRule& rule) {
  if (data.kind != ScoreKind::real)
    throw ConfigError("log_marginal_spike_slab: needs real-valued scores");
  data.validate();
  const double a = p.alpha, c = p.c;
  const long n = data.n_obs;
  const double kd = static_cast<double>(data.traits.size());
  // pi_A(s) = 1 - e^{-s}: same I as the count models at r = 1
  const double I = i_integral(1.0, n, a);
  double lm = log_gamma(c + kd) - log_gamma(c) + kd * std::log(a) -
              (c + kd) * std::log1p(a * I);
  const double tol =
      std::clamp(std::pow(10.0, -(4.0 + rule.order / 32.0)), 1e-13, 1e-6);
  for (const auto& t : data.traits) {
    if (!t.atom_param)
      throw ConfigError("log_marginal_spike_slab: trait '" + t.id +
                        "' is missing its atom_param");
    const double eta = *t.atom_param;
    const double ml = static_cast<double>(t.entries.size());
    double ss = 0.0;
    for (const auto& [obs, y] : t.entries) {
      (void)obs;
      ss += (y - eta) * (y - eta);
    }
    // G = (2 pi)^{m/2} int (1-y)^{n-m} y^{m-1-a} L^{m/2} e^{-L ss/2} dy,
    // with L = -log(1-y)
    const double nm = static_cast<double>(n) - ml;
    auto log_rest = [ml, nm, ss](double y) {
      double l1 = std::log1p(-y);
      double L = -l1;
      return 0.5 * ml * std::log(L) + nm * l1 - 0.5 * ss * L;
    };
    lm += 0.5 * ml * std::log(2.0 * M_PI) +
          math::log_power_integral_01(ml - 1.0 - a, log_rest, tol);
  }
  return lm;
}

double log_marginal_sbsp(const SuffStats& stats, const math::StableParams& p) {
  for (long l = 0; l < stats.k_n; ++l)
    if (stats.q[l] != stats.m[l])
      throw ConfigError("log_marginal_sbsp: needs binary data (q_l = m_l)");
  const double a = p.alpha, c = p.c, theta = p.theta;
  const double kd = static_cast<double>(stats.k_n);
  const double nd = static_cast<double>(stats.n);
  const double gamma0 = a * i_integral(1.0, stats.n, a);
  double lm = kd * std::log(a) + (c + 1.0) * std::log(theta) -
              (kd + c + 1.0) * std::log(theta + gamma0) +
              log_gamma(kd + c + 1.0) - log_gamma(c + 1.0);
  for (const auto& [mval, cnt] : stats.q_hist)
    lm += cnt * (log_gamma(static_cast<double>(mval) - a) +
                 log_gamma(nd - static_cast<double>(mval) + 1.0) -
                 log_gamma(nd - a + 1.0));
  return lm;
}

dist::GammaLaw posterior_tilt(const SuffStats& stats,
                              const math::StableParams& p) {
  const double I = i_integral(p.r, stats.n, p.alpha);
  return {p.c + static_cast<double>(stats.k_n),
          p.theta * (1.0 + p.alpha * I)};
}

dist::NegBinLaw unseen_traits_law(const SuffStats& stats,
                                  const math::StableParams& p, long m) {
  if (m < 0) throw std::invalid_argument("unseen_traits_law: m must be >= 0");
  const double In = i_integral(p.r, stats.n, p.alpha);
  const double Inm = i_integral(p.r, stats.n + m, p.alpha);
  return {p.c + static_cast<double>(stats.k_n),
          (1.0 + p.alpha * In) / (1.0 + p.alpha * Inm)};
}

PredictiveTable predictive_old_trait_pmf(long q_l, long n,
                                         const math::StableParams& p,
                                         int grid_max) {
  if (q_l < 1)
    throw std::invalid_argument("predictive_old_trait_pmf: q_l must be >= 1");
  if (n < 1)
    throw std::invalid_argument("predictive_old_trait_pmf: n must be >= 1");
  if (grid_max < 0)
    throw std::invalid_argument("predictive_old_trait_pmf: grid_max < 0");
  const double a = p.alpha, r = p.r;
  const double qd = static_cast<double>(q_l);
  const double rn1 = r * static_cast<double>(n) + 1.0;
  const double rn2 = r * static_cast<double>(n + 1) + 1.0;

  PredictiveTable table;
  table.log_pmf.resize(static_cast<size_t>(grid_max) + 1);
  table.log_pmf[0] = log_beta(rn2, qd - a) - log_beta(rn1, qd - a);
  for (long k = 0; k < grid_max; ++k) {
    double kd = static_cast<double>(k);
    double ratio = (kd + r) / (kd + 1.0) * (qd + kd - a) / (rn2 + qd + kd - a);
    table.log_pmf[k + 1] = table.log_pmf[k] + std::log(ratio);
  }
  double total = 0.0;
  for (double lp : table.log_pmf) total += std::exp(lp);
  table.tail_mass = std::max(0.0, 1.0 - total);
  return table;
}

}  // namespace stsp
