#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace stabletrees {

// Survival function of the Kolmogorov distribution, Q(lam) = 2 sum (-1)^{j-1} exp(-2 j^2 lam^2).
double kolmogorov_q(double lam);

struct KsResult {
  double stat = 0.0;    // sup-norm distance D
  double pvalue = 1.0;  // asymptotic, with the usual small-sample correction
  std::size_t n1 = 0;
  std::size_t n2 = 0;  // 0 for one-sample tests
};

// Two-sample Kolmogorov-Smirnov. Inputs need not be sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS against a continuous CDF.
KsResult ks_vs_cdf(std::vector<double> a, const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double stat = 0.0;
  double pvalue = 1.0;
  std::size_t dof = 0;
  std::size_t n = 0;            // total count
  double min_expected = 0.0;    // smallest expected cell count
  std::size_t pooled_cells = 0; // cells merged into "other"
};

// Goodness of fit for counts against given probabilities. Cells whose expected
// count falls below `min_expected` are pooled into a single residual cell.
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& counts,
                               const std::vector<double>& probs,
                               double min_expected = 5.0);

// Keyed variant: every key present in either map becomes a cell.
ChiSquareResult chi_square_gof(const std::map<std::string, std::uint64_t>& counts,
                               const std::map<std::string, double>& probs,
                               double min_expected = 5.0);

struct MomentZResult {
  double sample_mean = 0.0;
  double expected = 0.0;
  double z = 0.0;       // (mean - expected) / se
  double se = 0.0;      // sqrt(var / n), var estimated from the sample
  double pvalue = 1.0;  // two-sided normal
  std::size_t n = 0;
};

// z-test of a sample mean against a known expectation. The standard error is
// estimated from the sample itself unless `known_var >= 0` is supplied.
MomentZResult moment_z(const std::vector<double>& sample, double expected,
                       double known_var = -1.0);

// Running scalar accumulator so large samples never need to be stored when
// only a mean test is wanted.
class MeanAccumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  MomentZResult test(double expected, double known_var = -1.0) const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Normal tail helpers.
double normal_sf(double z);        // P(Z > z)
double normal_two_sided(double z); // 2 P(Z > |z|)

// One verification check, serializable to a JSON object (one line of a JSONL report).
struct TestReport {
  std::string name;
  std::string kind;  // "ks", "chi2", "moment", "exact"
  double stat = 0.0;
  double pvalue = 1.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  bool inconclusive = false;  // could not decide (e.g. conditioning starved); not a failure
  bool reran = false;    // failed once at level alpha, retried on a fresh stream
  std::string detail;    // free-form context (parameters, tolerances)

  // verdict is "pass", "fail" or "inconclusive"
  std::string verdict() const { return inconclusive ? "inconclusive" : pass ? "pass" : "fail"; }
  std::string to_json() const;
};

// Decide pass/fail for a p-value test with one independent retry: a test fails
// only if two runs on different streams both fall below `alpha_level`.
// `run` receives the stream offset (0 for the first attempt, 1 for the retry).
TestReport run_with_retry(const std::string& name, const std::string& kind,
                          double alpha_level, std::uint64_t seed,
                          const std::function<TestReport(std::uint64_t)>& run);

}  // namespace stabletrees
