#include "stsp/dataset.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace stsp {

void TraitDataset::validate() const {
  std::set<std::string> ids;
  for (const auto& t : traits) {
    if (t.entries.empty())
      throw ConfigError("TraitDataset: trait '" + t.id + "' has no entries");
    if (!ids.insert(t.id).second)
      throw ConfigError("TraitDataset: duplicate trait id '" + t.id + "'");
    std::set<long> seen;
    for (const auto& [obs, score] : t.entries) {
      if (obs < 0 || obs >= n_obs)
        throw ConfigError("TraitDataset: observation index out of range");
      if (!seen.insert(obs).second)
        throw ConfigError("TraitDataset: repeated observation in trait '" +
                          t.id + "'");
      if (!(score > 0.0))
        throw ConfigError("TraitDataset: scores must be > 0");
      if (kind != ScoreKind::real &&
          (score != std::floor(score) || score > 9e15))
        throw ConfigError("TraitDataset: count scores must be integers");
      if (kind == ScoreKind::binary && score != 1.0)
        throw ConfigError("TraitDataset: binary scores must equal 1");
    }
  }
}

double SuffStats::binom_sum_for(double new_r) const {
  if (new_r == r) return log_binom_sum;
  double s = 0.0;
  for (const auto& [a, cnt] : score_hist) {
    double ad = static_cast<double>(a);
    s += cnt * (std::lgamma(ad + new_r) - std::lgamma(ad + 1.0) -
                std::lgamma(new_r));
  }
  return s;
}

SuffStats suff_stats(const TraitDataset& data, double r) {
  if (data.kind == ScoreKind::real)
    throw ConfigError("suff_stats: real-valued scores need the spike-and-slab "
                      "model, not a count model");
  data.validate();
  SuffStats st;
  st.n = data.n_obs;
  st.k_n = static_cast<long>(data.traits.size());
  st.r = std::numeric_limits<double>::quiet_NaN();  // set after the sums
  st.m.reserve(data.traits.size());
  st.q.reserve(data.traits.size());
  for (const auto& t : data.traits) {
    long ql = 0;
    for (const auto& [obs, score] : t.entries) {
      (void)obs;
      long a = static_cast<long>(score);
      ql += a;
      ++st.score_hist[a];
    }
    st.m.push_back(static_cast<long>(t.entries.size()));
    st.q.push_back(ql);
    ++st.q_hist[ql];
  }
  st.log_binom_sum = st.binom_sum_for(r);
  st.r = r;
  for (const auto& [a, cnt] : st.score_hist)
    st.log_factorial_sum += cnt * std::lgamma(static_cast<double>(a) + 1.0);
  return st;
}

}  // namespace stsp
