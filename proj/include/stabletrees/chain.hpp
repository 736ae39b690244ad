#pragma once

#include <utility>
#include <vector>

#include "stabletrees/distributions.hpp"
#include "stabletrees/rng.hpp"

namespace stabletrees {

// stability index alpha in (1,2]; alpha == 2 is the Brownian case
struct AlphaParam {
  double alpha;
  double beta_index;  // 1 - 1/alpha
  bool is_brownian;
};

AlphaParam make_alpha(double alpha);  // throws std::invalid_argument

struct BetaParams {
  double a;
  double b;
};

// parameters of the backward factor beta_p with M_p = M_{p+1} * beta_p:
//   Beta( ((p+1) alpha - 2)/(alpha - 1), 1/(alpha - 1) ),   p >= 1.
// At alpha == 2 this is Beta(2p, 1).
BetaParams beta_step_params(double alpha, long p);

// The increasing chain M_p ~ ML(1 - 1/alpha, p - 1/alpha).  The whole
// process lives on one ladder of independent factors beta_1, beta_2, ...:
// M_1 is the a.s. limit of C_n prod_{i<n} beta_i and M_{p+1} = M_p / beta_p
// divides the *same* beta_p back out (beta_p is independent of M_{p+1},
// not of M_p, so stepping with a fresh Beta draw would skew every marginal
// beyond p = 1).  For alpha < 2, chain_init therefore draws the ladder up
// front, truncated at n_trunc, and chain_step consumes it; a step past the
// horizon falls back to fresh draws and flags trunc_warning.  For
// alpha = 2 the chain is exact: M_1 = 2 sqrt(Gamma(1)) and
// M_{p+1} = sqrt(M_p^2 + 4 Exp(1)).
struct ChainState {
  double alpha = 2.0;
  long p = 1;
  double m = 0.0;
  double m1 = 0.0;
  bool keep_history = false;  // alpha == 2: record the implied factors
  bool trunc_warning = false;
  std::vector<double> factors;  // the ladder (alpha < 2); consumed at index p-1

  // recompute M_k (1 <= k <= p) by replaying the stored divisions in
  // order; bit-identical to the forward computation
  double regenerate(long k) const;
};

ChainState chain_init(double alpha, RngStream& rng, long n_trunc = 0,
                      bool keep_history = false);
void chain_step(ChainState& state, RngStream& rng);

// truncation horizon that keeps at least the configured tail length past
// the deepest index a run will visit (0 picks the environment default)
long chain_horizon(long n_trunc, long p_max);

// (p, M_p) for p = 1..p_max
std::vector<std::pair<long, double>> chain_trajectory(double alpha, long p_max,
                                                      RngStream& rng,
                                                      long n_trunc = 0);

// normalized chain: Mbar_1 = 1, Mbar_{p+1} = Mbar_p / beta_p
std::vector<double> normalized_chain(double alpha, long p_max, RngStream& rng);

// alpha == 2 transition density p(m, m') = (m'/2) exp(-(m'^2 - m^2)/4)
// for 0 < m <= m'; throws std::domain_error outside the domain
double transition_density_brownian(double m, double m_next);

}  // namespace stabletrees
