#include "stabletrees/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stabletrees {

double kolmogorov_q(double lam) {
  if (lam <= 0.0) return 1.0;
  if (lam < 0.2) return 1.0;  // series converges slowly; Q is 1 to 14 digits anyway
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lam * lam);
    sum += sign * term;
    if (term < 1e-16 * std::abs(sum) || term < 1e-300) break;
    sign = -sign;
  }
  const double q = 2.0 * sum;
  return std::min(1.0, std::max(0.0, q));
}

namespace {

// Asymptotic p-value with the Stephens small-sample correction.
double ks_pvalue(double d, double ne) {
  const double sq = std::sqrt(ne);
  return kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n1 = a.size(), n2 = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < n1 && j < n2) {
    const double x = std::min(a[i], b[j]);
    while (i < n1 && a[i] <= x) ++i;
    while (j < n2 && b[j] <= x) ++j;
    const double fa = static_cast<double>(i) / n1;
    const double fb = static_cast<double>(j) / n2;
    d = std::max(d, std::abs(fa - fb));
  }
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    (static_cast<double>(n1) + static_cast<double>(n2));
  KsResult r;
  r.stat = d;
  r.pvalue = ks_pvalue(d, ne);
  r.n1 = n1;
  r.n2 = n2;
  return r;
}

KsResult ks_vs_cdf(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw std::invalid_argument("ks_vs_cdf: empty sample");
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(a[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(f - lo), std::abs(hi - f)));
  }
  KsResult r;
  r.stat = d;
  r.pvalue = ks_pvalue(d, static_cast<double>(n));
  r.n1 = n;
  r.n2 = 0;
  return r;
}

namespace {

ChiSquareResult chi_square_from_cells(std::vector<std::uint64_t> counts,
                                      std::vector<double> expected,
                                      double min_expected) {
  // Pool low-expectation cells into one residual cell.
  std::vector<std::uint64_t> c;
  std::vector<double> e;
  std::uint64_t pooled_c = 0;
  double pooled_e = 0.0;
  std::size_t pooled_cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (expected[i] < min_expected) {
      pooled_c += counts[i];
      pooled_e += expected[i];
      ++pooled_cells;
    } else {
      c.push_back(counts[i]);
      e.push_back(expected[i]);
    }
  }
  if (pooled_cells > 0) {
    c.push_back(pooled_c);
    e.push_back(pooled_e);
  }
  // If the pooled cell is itself tiny, merge it into the last regular cell.
  while (c.size() > 1 && e.back() < min_expected) {
    e[e.size() - 2] += e.back();
    c[c.size() - 2] += c.back();
    e.pop_back();
    c.pop_back();
  }
  if (c.size() < 2) throw std::invalid_argument("chi_square: fewer than two usable cells");

  double stat = 0.0;
  double min_e = e[0];
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double diff = static_cast<double>(c[i]) - e[i];
    stat += diff * diff / e[i];
    min_e = std::min(min_e, e[i]);
    total += c[i];
  }
  const std::size_t dof = c.size() - 1;
  ChiSquareResult r;
  r.stat = stat;
  r.dof = dof;
  r.n = static_cast<std::size_t>(total);
  r.min_expected = min_e;
  r.pooled_cells = pooled_cells;
  r.pvalue = boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat);
  return r;
}

}  // namespace

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& counts,
                               const std::vector<double>& probs,
                               double min_expected) {
  if (counts.size() != probs.size() || counts.empty())
    throw std::invalid_argument("chi_square: size mismatch");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  double psum = 0.0;
  for (auto p : probs) {
    if (p < 0.0) throw std::invalid_argument("chi_square: negative probability");
    psum += p;
  }
  if (std::abs(psum - 1.0) > 1e-9)
    throw std::invalid_argument("chi_square: probabilities sum to " + std::to_string(psum));
  std::vector<double> expected(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    expected[i] = probs[i] * static_cast<double>(total);
  return chi_square_from_cells(counts, std::move(expected), min_expected);
}

ChiSquareResult chi_square_gof(const std::map<std::string, std::uint64_t>& counts,
                               const std::map<std::string, double>& probs,
                               double min_expected) {
  std::vector<std::uint64_t> c;
  std::vector<double> p;
  // union of keys, in map order so the cell layout is deterministic
  auto it = counts.begin();
  auto jt = probs.begin();
  auto push = [&](std::uint64_t cnt, double prob) {
    c.push_back(cnt);
    p.push_back(prob);
  };
  while (it != counts.end() || jt != probs.end()) {
    if (jt == probs.end() || (it != counts.end() && it->first < jt->first)) {
      push(it->second, 0.0);  // observed a shape the law gives zero mass: certain failure
      ++it;
    } else if (it == counts.end() || jt->first < it->first) {
      push(0, jt->second);
      ++jt;
    } else {
      push(it->second, jt->second);
      ++it;
      ++jt;
    }
  }
  // A zero-probability cell with observations is an automatic reject.
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (p[i] == 0.0 && c[i] > 0) {
      ChiSquareResult r;
      r.stat = std::numeric_limits<double>::infinity();
      r.pvalue = 0.0;
      r.dof = c.size() - 1;
      std::uint64_t tot = 0;
      for (auto x : c) tot += x;
      r.n = static_cast<std::size_t>(tot);
      return r;
    }
  }
  // Drop impossible, unobserved cells and renormalize guard.
  std::vector<std::uint64_t> c2;
  std::vector<double> p2;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (p[i] > 0.0) {
      c2.push_back(c[i]);
      p2.push_back(p[i]);
    }
  }
  return chi_square_gof(c2, p2, min_expected);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

MomentZResult moment_z(const std::vector<double>& sample, double expected, double known_var) {
  MeanAccumulator acc;
  for (double x : sample) acc.add(x);
  return acc.test(expected, known_var);
}

MomentZResult MeanAccumulator::test(double expected, double known_var) const {
  if (n_ < 2) throw std::invalid_argument("moment_z: need at least two observations");
  MomentZResult r;
  r.n = n_;
  r.sample_mean = mean_;
  r.expected = expected;
  const double var = known_var >= 0.0 ? known_var : variance();
  r.se = std::sqrt(var / static_cast<double>(n_));
  r.z = r.se > 0.0 ? (mean_ - expected) / r.se : 0.0;
  r.pvalue = normal_two_sided(r.z);
  return r;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string TestReport::to_json() const {
  std::ostringstream os;
  os << "{\"name\":\"" << json_escape(name) << "\",\"kind\":\"" << json_escape(kind)
     << "\",\"stat\":" << fmt_double(stat) << ",\"pvalue\":" << fmt_double(pvalue)
     << ",\"n\":" << n << ",\"seed\":" << seed << ",\"verdict\":\"" << verdict()
     << "\",\"reran\":" << (reran ? "true" : "false") << ",\"detail\":\""
     << json_escape(detail) << "\"}";
  return os.str();
}

TestReport run_with_retry(const std::string& name, const std::string& kind,
                          double alpha_level, std::uint64_t seed,
                          const std::function<TestReport(std::uint64_t)>& run) {
  TestReport first = run(0);
  first.name = name;
  first.kind = kind;
  first.seed = seed;
  first.pass = first.pvalue >= alpha_level;
  if (first.pass || first.inconclusive) return first;
  // One independent retry on a fresh stream; both must fail to reject.
  TestReport second = run(1);
  second.name = name;
  second.kind = kind;
  second.seed = seed;
  second.reran = true;
  second.pass = second.pvalue >= alpha_level;
  if (!second.detail.empty()) second.detail += "; ";
  second.detail += "first attempt p=" + fmt_double(first.pvalue);
  return second;
}

}  // namespace stabletrees
