#pragma once

#include <vector>

#include "stabletrees/rng.hpp"

namespace stabletrees {

// library defaults, overridable through the environment
long default_n_trunc();   // STABLETREES_N_TRUNC, default 100000
long min_n_trunc();       // STABLETREES_MIN_N_TRUNC, default 10000
double default_alpha_level();  // STABLETREES_ALPHA_LEVEL, default 0.01

// Parameters of the generalized Mittag-Leffler law ML(beta, theta):
// the law on (0, inf) whose k-th moment is
//   Gamma(theta+1) Gamma(theta/beta + k + 1)
//   -----------------------------------------
//   Gamma(theta/beta + 1) Gamma(theta + k beta + 1)
struct MlParams {
  double beta;
  double theta;
};

// validated constructor: beta in (0,1], theta > -beta
MlParams ml_params(double beta, double theta);

// k-th moment of ML(beta, theta), k >= 0; evaluated in log space.
// Throws std::range_error if the result is not representable.
double ml_moment(const MlParams& p, int k);

// Gamma(shape) with unit scale, Marsaglia-Tsang; shape > 0
double sample_gamma(double shape, RngStream& rng);

// Beta(a, b) with a > 0, b >= 0.  By convention Beta(a, 0) == 1 exactly
// (weak limit); otherwise the draw lies strictly inside (0,1).
double sample_beta(double a, double b, RngStream& rng);

// Dirichlet via normalized Gammas; params all > 0, size >= 1
std::vector<double> sample_dirichlet(const std::vector<double>& params,
                                     RngStream& rng);

// exact ML(1/2, p - 1/2) draw: 2 sqrt(Gamma(p)), integer p >= 1
double sample_ml_half(int p, RngStream& rng);

// exact ML(1/2, theta) draw for any theta > -1/2: 2 sqrt(Gamma(theta + 1/2))
double sample_ml_half_theta(double theta, RngStream& rng);

struct M1Result {
  double value;
  bool below_min_trunc;  // n_trunc was under the configured minimum
};

// Approximate ML(1-1/alpha, 1-1/alpha) draw (the chain's M_1) by the
// truncated product of n_trunc - 1 Beta factors with the deterministic
// martingale prefactor
//   C_n = Gamma(1-1/a) Gamma(n+1-1/a) / (Gamma(2-1/a) Gamma(n+1-2/a)),
// asymptotically (a/(a-1)) n^{1/a}.  The prefactor keeps the first moment
// exact at every truncation; relative bias of the k-th moment decays like
// ~0.22 k(k-1) / n_trunc.  alpha == 2 dispatches to the exact sampler.
M1Result sample_m1(double alpha, long n_trunc, RngStream& rng);

}  // namespace stabletrees
