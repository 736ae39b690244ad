#include "stabletrees/chain.hpp"

#include <cmath>
#include <stdexcept>

namespace stabletrees {

AlphaParam make_alpha(double alpha) {
  if (!(alpha > 1.0) || alpha > 2.0)
    throw std::invalid_argument("alpha must lie in (1,2]");
  return AlphaParam{alpha, 1.0 - 1.0 / alpha, alpha == 2.0};
}

BetaParams beta_step_params(double alpha, long p) {
  make_alpha(alpha);
  if (p < 1) throw std::invalid_argument("beta_step_params: p must be >= 1");
  if (alpha == 2.0) return BetaParams{2.0 * static_cast<double>(p), 1.0};
  return BetaParams{((p + 1) * alpha - 2.0) / (alpha - 1.0),
                    1.0 / (alpha - 1.0)};
}

double ChainState::regenerate(long k) const {
  if (k < 1 || k > p)
    throw std::invalid_argument("ChainState::regenerate: k out of range");
  if (static_cast<std::size_t>(k - 1) > factors.size())
    throw std::logic_error("ChainState::regenerate: history not retained");
  double v = m1;
  for (long i = 1; i < k; ++i) v /= factors[static_cast<std::size_t>(i - 1)];
  return v;
}

long chain_horizon(long n_trunc, long p_max) {
  long horizon = n_trunc > 0 ? n_trunc : default_n_trunc();
  if (p_max >= horizon) horizon = p_max + min_n_trunc();
  return horizon;
}

ChainState chain_init(double alpha, RngStream& rng, long n_trunc,
                      bool keep_history) {
  make_alpha(alpha);
  if (n_trunc <= 0) n_trunc = default_n_trunc();
  ChainState s;
  s.alpha = alpha;
  s.p = 1;
  s.keep_history = keep_history;
  if (alpha == 2.0) {
    s.m = s.m1 = sample_ml_half(1, rng);  // exact, no ladder needed
    return s;
  }
  if (n_trunc < 2)
    throw std::invalid_argument("chain_init: n_trunc must be >= 2");
  s.trunc_warning = n_trunc < min_n_trunc();
  // same product as sample_m1, but the factors are retained because the
  // later divisions must reuse them
  const double ia = 1.0 / alpha;
  const double n = static_cast<double>(n_trunc);
  const double log_pref = std::lgamma(1.0 - ia) + std::lgamma(n + 1.0 - ia) -
                          std::lgamma(2.0 - ia) - std::lgamma(n + 1.0 - 2.0 * ia);
  const double b = 1.0 / (alpha - 1.0);
  s.factors.resize(static_cast<std::size_t>(n_trunc - 1));
  double prod = 1.0;
  for (long i = 1; i < n_trunc; ++i) {
    const double a = ((i + 1) * alpha - 2.0) / (alpha - 1.0);
    const double f = sample_beta(a, b, rng);
    s.factors[static_cast<std::size_t>(i - 1)] = f;
    prod *= f;
  }
  s.m = s.m1 = std::exp(log_pref) * prod;
  return s;
}

void chain_step(ChainState& state, RngStream& rng) {
  if (state.alpha == 2.0) {
    const double m_next =
        std::sqrt(state.m * state.m + 4.0 * rng.exponential());
    if (state.keep_history) state.factors.push_back(state.m / m_next);
    state.m = m_next;
    state.p += 1;
    return;
  }
  const std::size_t idx = static_cast<std::size_t>(state.p - 1);
  double beta;
  if (idx < state.factors.size()) {
    beta = state.factors[idx];
  } else {
    // ladder exhausted; fresh draws keep the chain increasing but the
    // marginals past the horizon are no longer trustworthy
    const BetaParams bp = beta_step_params(state.alpha, state.p);
    beta = sample_beta(bp.a, bp.b, rng);
    state.factors.push_back(beta);
    state.trunc_warning = true;
  }
  state.m /= beta;  // beta < 1 strictly, so the chain strictly increases
  state.p += 1;
}

std::vector<std::pair<long, double>> chain_trajectory(double alpha, long p_max,
                                                      RngStream& rng,
                                                      long n_trunc) {
  if (p_max < 1) throw std::invalid_argument("chain_trajectory: p_max >= 1");
  std::vector<std::pair<long, double>> out;
  out.reserve(static_cast<std::size_t>(p_max));
  ChainState s = chain_init(alpha, rng, chain_horizon(n_trunc, p_max));
  out.emplace_back(s.p, s.m);
  while (s.p < p_max) {
    chain_step(s, rng);
    out.emplace_back(s.p, s.m);
  }
  return out;
}

std::vector<double> normalized_chain(double alpha, long p_max, RngStream& rng) {
  make_alpha(alpha);
  if (p_max < 1) throw std::invalid_argument("normalized_chain: p_max >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p_max));
  double m = 1.0;
  out.push_back(m);
  for (long p = 1; p < p_max; ++p) {
    const BetaParams bp = beta_step_params(alpha, p);
    m /= sample_beta(bp.a, bp.b, rng);
    out.push_back(m);
  }
  return out;
}

double transition_density_brownian(double m, double m_next) {
  if (!(m > 0.0) || !(m_next >= m))
    throw std::domain_error(
        "transition_density_brownian: need 0 < m <= m_next");
  return 0.5 * m_next * std::exp(-(m_next * m_next - m * m) / 4.0);
}

}  // namespace stabletrees
