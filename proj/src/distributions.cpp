#include "stabletrees/distributions.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace stabletrees {

namespace {

long env_long(const char* name, long fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const long parsed = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || parsed <= 0) return fallback;
  return parsed;
}

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const double parsed = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(parsed > 0.0) || parsed >= 1.0) return fallback;
  return parsed;
}

}  // namespace

long default_n_trunc() { return env_long("STABLETREES_N_TRUNC", 100000); }
long min_n_trunc() { return env_long("STABLETREES_MIN_N_TRUNC", 10000); }
double default_alpha_level() {
  return env_double("STABLETREES_ALPHA_LEVEL", 0.01);
}

MlParams ml_params(double beta, double theta) {
  if (!(beta > 0.0) || beta > 1.0)
    throw std::invalid_argument("ml_params: beta must lie in (0,1]");
  if (!(theta > -beta))
    throw std::invalid_argument("ml_params: need theta > -beta");
  return MlParams{beta, theta};
}

double ml_moment(const MlParams& p, int k) {
  if (k < 0) throw std::invalid_argument("ml_moment: k must be >= 0");
  if (k == 0) return 1.0;
  const double r = p.theta / p.beta;
  const double log_m = std::lgamma(p.theta + 1.0) + std::lgamma(r + k + 1.0) -
                       std::lgamma(r + 1.0) -
                       std::lgamma(p.theta + k * p.beta + 1.0);
  if (!std::isfinite(log_m) || log_m > 709.0)
    throw std::range_error("ml_moment: result not representable");
  return std::exp(log_m);
}

// Marsaglia-Tsang (2000) with the boost X * U^{1/a} for shape < 1.
double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0))
    throw std::invalid_argument("sample_gamma: shape must be > 0");
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(rng.uniform_pos(), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      return boost * d * v;
  }
}

double sample_beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0)) throw std::invalid_argument("sample_beta: a must be > 0");
  if (b < 0.0) throw std::invalid_argument("sample_beta: b must be >= 0");
  if (b == 0.0) return 1.0;
  for (int attempt = 0; attempt < 256; ++attempt) {
    double r;
    if (a == 1.0) {
      r = 1.0 - std::pow(rng.uniform_pos(), 1.0 / b);
    } else if (b == 1.0) {
      r = std::pow(rng.uniform_pos(), 1.0 / a);
    } else {
      const double x = sample_gamma(a, rng);
      const double y = sample_gamma(b, rng);
      r = x / (x + y);
    }
    if (r > 0.0 && r < 1.0) return r;  // keep the draw strictly interior
  }
  throw std::runtime_error("sample_beta: failed to produce an interior draw");
}

std::vector<double> sample_dirichlet(const std::vector<double>& params,
                                     RngStream& rng) {
  if (params.empty())
    throw std::invalid_argument("sample_dirichlet: empty parameter vector");
  std::vector<double> g(params.size());
  double s = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] > 0.0))
      throw std::invalid_argument("sample_dirichlet: parameters must be > 0");
    g[i] = sample_gamma(params[i], rng);
    s += g[i];
  }
  for (auto& x : g) x /= s;
  return g;
}

double sample_ml_half(int p, RngStream& rng) {
  if (p < 1) throw std::invalid_argument("sample_ml_half: p must be >= 1");
  return 2.0 * std::sqrt(sample_gamma(static_cast<double>(p), rng));
}

double sample_ml_half_theta(double theta, RngStream& rng) {
  if (!(theta > -0.5))
    throw std::invalid_argument("sample_ml_half_theta: need theta > -1/2");
  return 2.0 * std::sqrt(sample_gamma(theta + 0.5, rng));
}

M1Result sample_m1(double alpha, long n_trunc, RngStream& rng) {
  if (!(alpha > 1.0) || alpha > 2.0)
    throw std::invalid_argument("sample_m1: alpha must lie in (1,2]");
  if (n_trunc < 2) throw std::invalid_argument("sample_m1: n_trunc must be >= 2");
  const bool warn = n_trunc < min_n_trunc();
  if (alpha == 2.0) {
    // ML(1/2, 1/2) is exact; no truncation involved
    return M1Result{sample_ml_half(1, rng), false};
  }
  const double ia = 1.0 / alpha;
  const double n = static_cast<double>(n_trunc);
  const double log_pref = std::lgamma(1.0 - ia) + std::lgamma(n + 1.0 - ia) -
                          std::lgamma(2.0 - ia) - std::lgamma(n + 1.0 - 2.0 * ia);
  const double b = 1.0 / (alpha - 1.0);
  // the running product stays within [n^{-1/alpha}, 1]; no underflow risk
  double prod = 1.0;
  for (long i = 1; i < n_trunc; ++i) {
    const double a = ((i + 1) * alpha - 2.0) / (alpha - 1.0);
    prod *= sample_beta(a, b, rng);
  }
  return M1Result{std::exp(log_pref) * prod, warn};
}

}  // namespace stabletrees
