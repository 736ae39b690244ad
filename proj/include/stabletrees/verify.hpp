#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stabletrees/distributions.hpp"
#include "stabletrees/linebreaking.hpp"
#include "stabletrees/stats.hpp"

namespace stabletrees {

// Knobs shared by the verification suites.  n_trunc == 0 lets each check
// pick its own truncation: checks whose statistic is provably independent
// of the overall scale factor (shape laws, matched-truncation identities)
// use a short product, so the suite stays fast without losing exactness.
struct VerifyOptions {
  std::vector<double> alphas{1.5};
  std::size_t n_samples = 100000;
  long n_trunc = 0;
  std::uint64_t seed = 1;
  double alpha_level = default_alpha_level();
  double shape_floor = 1e-3;  // below this shape probability, conditioning is starved
};

// --- exact checks -----------------------------------------------------------

// closed-form shape probabilities vs the transition-product enumeration,
// compared signature by signature (relative tolerance 1e-10); also asserts
// both tables sum to 1 within 1e-12
TestReport check_shape_formula(double alpha, int p);

// --- Monte Carlo checks -----------------------------------------------------

// chi-square of simulated shape frequencies against the exact enumeration
TestReport check_shape_montecarlo(double alpha, int p, Algorithm alg,
                                  const VerifyOptions& opt);

// Conditionally on the shape, the edge lengths are a Dirichlet(1,...,1)
// split of M_p * B, B ~ Beta(|t|, (p alpha - 1)/(alpha - 1) - |t|).
// Two-sample KS on the total length and on the root-edge coordinate of
// trees grown until the target signature appears.  Returns {total, coord}
// reports; both come back inconclusive if the shape is too rare.
std::vector<TestReport> check_lengths_given_shape(double alpha, int p,
                                                  const std::string& signature,
                                                  const VerifyOptions& opt);

// Two-sample KS of the grown total length L_p against the independent
// mixture M_p * (prod beta_j + sum_i B_i (1 - beta_i) prod_{j>i} beta_j).
TestReport check_total_length_mixture(double alpha, long p,
                                      const VerifyOptions& opt);

// Identities for Dirichlet vectors, Beta factors and ML variables used by
// the length distributions: the Gamma-product characterization of ML, the
// size-biased-pick law, the rescaled-subvector law, and the two
// branch-insertion recursions (vertex and edge cases).  Exact samplers on
// both sides; one report per tested marginal.
std::vector<TestReport> check_dirichlet_identities(const VerifyOptions& opt);

// M ~ ML(beta, theta), Z ~ Dir(theta_1/beta, ..., theta_n/beta) gives
// M * Z =d (X_i^beta M^(i))_i with X ~ Dir(theta_1,...,theta_n) and
// M^(i) ~ ML(beta, theta_i) independent.  beta = 1/2 runs on exact
// samplers; beta = 1 - 1/alpha runs through the truncated product with
// the same truncation on both sides (which cancels exactly); other
// parameters are rejected.
std::vector<TestReport> check_lengths_masses(double beta, double theta,
                                             const std::vector<double>& thetas,
                                             const VerifyOptions& opt);

// alpha = 2: the increments of M_p^2/4 are iid Exp(1).  KS per increment
// plus a consecutive-increment correlation bound.
std::vector<TestReport> check_brownian_reduction(int p_max,
                                                 const VerifyOptions& opt);

// empirical E[M_p^k] against the closed-form moment, one z-test per (p, k)
std::vector<TestReport> check_ml_moments(double alpha, int p_max, int k_max,
                                         const VerifyOptions& opt);

// the decision harness itself: rejection rate of a true-null KS test at
// nominal 1% stays within 1% +/- 0.5% over many repetitions
TestReport check_calibration(const VerifyOptions& opt);

// --- suites -----------------------------------------------------------------

// suite in {shapes, lengths, mixture, dirichlet, brownian, all}
std::vector<TestReport> run_suite(const std::string& suite,
                                  const VerifyOptions& opt);
std::vector<std::string> suite_names();

// true when no report is a hard failure (inconclusive counts as pass)
bool all_passed(const std::vector<TestReport>& reports);

}  // namespace stabletrees
