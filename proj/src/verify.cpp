#include "stabletrees/verify.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

#include "stabletrees/chain.hpp"
#include "stabletrees/shape_law.hpp"

namespace stabletrees {

namespace {

// Fixed short truncations for checks where the product length provably does
// not matter.  Shape statistics never see the overall scale factor (it
// cancels from every selection probability), and two-sided identities built
// from the same truncated scale factor on both sides match exactly at any
// truncation, because the scale-free parts agree in law and the common
// factor cancels from the comparison.
constexpr long kShapeTrunc = 64;
constexpr long kMatchedTrunc = 512;
// Moment checks do see the truncation: the k-th moment carries a relative
// bias of about 0.22 k(k-1)/n_trunc, i.e. < 7e-4 for k <= 3 at 2000, well
// inside the 5-standard-error tolerance at the suite's sample sizes.
constexpr long kMomentTrunc = 2000;

long pick_trunc(const VerifyOptions& opt, long fallback) {
  return opt.n_trunc > 0 ? opt.n_trunc : fallback;
}

std::uint64_t name_stream(const std::string& name, std::uint64_t attempt) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h + attempt * 0x9e3779b97f4a7c15ull;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double gamma_cdf(double a, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(a, x);
}

double exp_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

using Gen = std::function<double(RngStream&)>;

// KS of n fresh draws against a fixed CDF, wrapped in the retry harness
TestReport one_sample_ks(const std::string& name, const VerifyOptions& opt,
                         const Gen& gen, const std::function<double(double)>& cdf,
                         const std::string& detail) {
  return run_with_retry(name, "ks", opt.alpha_level, opt.seed,
                        [&](std::uint64_t attempt) {
                          RngStream rng(opt.seed, name_stream(name, attempt));
                          std::vector<double> xs(opt.n_samples);
                          for (auto& x : xs) x = gen(rng);
                          const KsResult k = ks_vs_cdf(xs, cdf);
                          TestReport r;
                          r.stat = k.stat;
                          r.pvalue = k.pvalue;
                          r.n = opt.n_samples;
                          r.detail = detail;
                          return r;
                        });
}

// two-sample KS between independently generated sides
TestReport two_sample_ks(const std::string& name, const VerifyOptions& opt,
                         const Gen& gen_a, const Gen& gen_b,
                         const std::string& detail) {
  return run_with_retry(name, "ks", opt.alpha_level, opt.seed,
                        [&](std::uint64_t attempt) {
                          RngStream ra(opt.seed, name_stream(name + "#a", attempt));
                          RngStream rb(opt.seed, name_stream(name + "#b", attempt));
                          std::vector<double> xa(opt.n_samples), xb(opt.n_samples);
                          for (auto& x : xa) x = gen_a(ra);
                          for (auto& x : xb) x = gen_b(rb);
                          const KsResult k = ks_two_sample(std::move(xa), std::move(xb));
                          TestReport r;
                          r.stat = k.stat;
                          r.pvalue = k.pvalue;
                          r.n = opt.n_samples;
                          r.detail = detail;
                          return r;
                        });
}

TestReport inconclusive_report(const std::string& name, const std::string& kind,
                               std::uint64_t seed, const std::string& why) {
  TestReport r;
  r.name = name;
  r.kind = kind;
  r.seed = seed;
  r.inconclusive = true;
  r.detail = why;
  return r;
}

}  // namespace

TestReport check_shape_formula(double alpha, int p) {
  const std::string name = "shape_formula_a" + fmt(alpha) + "_p" + std::to_string(p);
  const ShapeTable by_enum = enumerate_shape_law(alpha, p);
  const ShapeTable by_formula = shape_formula_law(alpha, p);

  double sum_enum = 0.0, sum_formula = 0.0;
  for (const auto& [sig, prob] : by_enum) sum_enum += prob;
  for (const auto& [sig, prob] : by_formula) sum_formula += prob;

  double max_rel = 0.0;
  bool keys_ok = by_enum.size() == by_formula.size();
  for (const auto& [sig, prob] : by_enum) {
    auto it = by_formula.find(sig);
    if (it == by_formula.end()) {
      keys_ok = false;
      continue;
    }
    const double ref = std::max(std::abs(prob), 1e-300);
    max_rel = std::max(max_rel, std::abs(it->second - prob) / ref);
  }
  const bool sums_ok =
      std::abs(sum_enum - 1.0) <= 1e-12 && std::abs(sum_formula - 1.0) <= 1e-12;

  TestReport r;
  r.name = name;
  r.kind = "exact";
  r.stat = max_rel;
  r.n = by_enum.size();
  r.pass = keys_ok && sums_ok && max_rel <= 1e-10;
  r.pvalue = r.pass ? 1.0 : 0.0;
  r.detail = "alpha=" + fmt(alpha) + " p=" + std::to_string(p) + " shapes=" +
             std::to_string(by_enum.size()) + " sum_enum=" + fmt(sum_enum) +
             " sum_formula=" + fmt(sum_formula) + " tol=1e-10";
  return r;
}

TestReport check_shape_montecarlo(double alpha, int p, Algorithm alg,
                                  const VerifyOptions& opt) {
  const std::string name =
      "shape_sim_" + algorithm_name(alg) + "_a" + fmt(alpha) + "_p" + std::to_string(p);
  const ShapeTable law = enumerate_shape_law(alpha, p);
  const long trunc = pick_trunc(opt, kShapeTrunc);

  return run_with_retry(name, "chi2", opt.alpha_level, opt.seed,
                        [&](std::uint64_t attempt) {
                          const std::uint64_t base = name_stream(name, attempt);
                          std::map<std::string, std::uint64_t> counts;
                          GrowthConfig cfg;
                          cfg.alpha = alpha;
                          cfg.p_target = p;
                          cfg.algorithm = alg;
                          cfg.seed = opt.seed;
                          cfg.n_trunc = trunc;
                          for (std::size_t i = 0; i < opt.n_samples; ++i) {
                            cfg.stream = base + 1 + i;
                            ++counts[grow(cfg).tree.shape()];
                          }
                          TestReport r;
                          std::size_t dof = 0;
                          if (law.size() < 2) {
                            // single reachable shape: every draw must hit it
                            const std::uint64_t hits =
                                counts.count(law.begin()->first)
                                    ? counts.at(law.begin()->first)
                                    : 0;
                            r.stat = static_cast<double>(opt.n_samples - hits);
                            r.pvalue = hits == opt.n_samples ? 1.0 : 0.0;
                          } else {
                            const ChiSquareResult c = chi_square_gof(counts, law);
                            r.stat = c.stat;
                            r.pvalue = c.pvalue;
                            dof = c.dof;
                          }
                          r.n = opt.n_samples;
                          r.detail = "alpha=" + fmt(alpha) + " p=" + std::to_string(p) +
                                     " algorithm=" + algorithm_name(alg) +
                                     " dof=" + std::to_string(dof) +
                                     " n_trunc=" + std::to_string(trunc);
                          return r;
                        });
}

std::vector<TestReport> check_lengths_given_shape(double alpha, int p,
                                                  const std::string& signature,
                                                  const VerifyOptions& opt) {
  const std::string base_name =
      "lengths_shape_a" + fmt(alpha) + "_p" + std::to_string(p) + "_" + signature;
  const std::string name_total = base_name + "_total";
  const std::string name_coord = base_name + "_coord";
  const long trunc = pick_trunc(opt, kMatchedTrunc);

  const ShapeTable law = enumerate_shape_law(alpha, p);
  const auto it = law.find(signature);
  const double prob = it == law.end() ? 0.0 : it->second;
  if (prob < opt.shape_floor) {
    const std::string why = "shape probability " + fmt(prob) + " below floor " +
                            fmt(opt.shape_floor) + "; conditioning starved";
    return {inconclusive_report(name_total, "ks", opt.seed, why),
            inconclusive_report(name_coord, "ks", opt.seed, why)};
  }

  struct Pass {
    std::vector<double> tot_a, coord_a, tot_b, coord_b;
    bool starved = false;
  };

  // One sampling pass at the given attempt.  The conditioned side grows
  // normalized trees, so the rejection loop stays cheap.  An accepted
  // replicate is divided by its own M-bar_p (lengths over M_p are
  // independent of M_p; lengths over M_1 are *not* independent of M_1)
  // and rescaled by an independent chain draw to stage p.  The direct
  // side uses the same truncation for its scale, which makes the
  // comparison exact at any truncation.
  auto sample_pass = [&](std::uint64_t attempt) {
    Pass out;
    RngStream scale_rng(opt.seed, name_stream(base_name + "#scale", attempt));
    RngStream direct_rng(opt.seed, name_stream(base_name + "#direct", attempt));
    const std::uint64_t grow_base = name_stream(base_name + "#grow", attempt);

    const std::size_t want = opt.n_samples;
    const std::size_t max_tries =
        want * static_cast<std::size_t>(std::ceil(20.0 / prob)) + 1000;
    std::size_t edges = 0;
    GrowthConfig cfg;
    cfg.alpha = alpha;
    cfg.p_target = p;
    cfg.algorithm = Algorithm::NormalizedI;
    cfg.seed = opt.seed;
    std::uint64_t tries = 0;
    while (out.tot_a.size() < want && tries < max_tries) {
      cfg.stream = grow_base + 1 + tries;
      ++tries;
      const GrowthResult g = grow(cfg);
      if (g.tree.shape() != signature) continue;
      ChainState sc = chain_init(alpha, scale_rng, trunc);
      for (long q = 1; q < p; ++q) chain_step(sc, scale_rng);
      const double scale = sc.m / g.m_final;
      out.tot_a.push_back(scale * g.tree.total_length());
      double root_len = 0.0;
      for (std::size_t e = 0; e < g.tree.edge_count(); ++e) {
        if (g.tree.edge(e).parent == 0) {
          root_len = g.tree.edge(e).length;
          break;
        }
      }
      out.coord_a.push_back(scale * root_len);
      edges = g.tree.edge_count();
    }
    if (out.tot_a.size() < want) {
      out.starved = true;
      return out;
    }

    const double c = (p * alpha - 1.0) / (alpha - 1.0);
    for (std::size_t i = 0; i < want; ++i) {
      ChainState s = chain_init(alpha, direct_rng, trunc);
      for (int q = 1; q < p; ++q) chain_step(s, direct_rng);
      const double b = sample_beta(static_cast<double>(edges),
                                   c - static_cast<double>(edges), direct_rng);
      const double total = s.m * b;
      const double d1 =
          edges > 1 ? sample_beta(1.0, static_cast<double>(edges - 1), direct_rng) : 1.0;
      out.tot_b.push_back(total);
      out.coord_b.push_back(total * d1);
    }
    return out;
  };

  const std::string detail = "alpha=" + fmt(alpha) + " p=" + std::to_string(p) +
                             " shape=" + signature + " prob=" + fmt(prob) +
                             " n_trunc=" + std::to_string(trunc);

  Pass pass0 = sample_pass(0);
  if (pass0.starved) {
    const std::string why = detail + "; rejection budget exhausted";
    return {inconclusive_report(name_total, "ks", opt.seed, why),
            inconclusive_report(name_coord, "ks", opt.seed, why)};
  }

  auto make_report = [&](const std::string& name, const KsResult& k) {
    TestReport r;
    r.name = name;
    r.kind = "ks";
    r.seed = opt.seed;
    r.stat = k.stat;
    r.pvalue = k.pvalue;
    r.n = opt.n_samples;
    r.pass = k.pvalue >= opt.alpha_level;
    r.detail = detail;
    return r;
  };

  TestReport total = make_report(name_total, ks_two_sample(pass0.tot_a, pass0.tot_b));
  TestReport coord = make_report(name_coord, ks_two_sample(pass0.coord_a, pass0.coord_b));
  if (!total.pass || !coord.pass) {
    // one shared retry on fresh streams; only the failing statistic is re-judged
    Pass pass1 = sample_pass(1);
    if (!pass1.starved) {
      if (!total.pass) {
        const double p0 = total.pvalue;
        total = make_report(name_total, ks_two_sample(pass1.tot_a, pass1.tot_b));
        total.reran = true;
        total.detail += "; first attempt p=" + fmt(p0);
      }
      if (!coord.pass) {
        const double p0 = coord.pvalue;
        coord = make_report(name_coord, ks_two_sample(pass1.coord_a, pass1.coord_b));
        coord.reran = true;
        coord.detail += "; first attempt p=" + fmt(p0);
      }
    }
  }
  return {total, coord};
}

TestReport check_total_length_mixture(double alpha, long p, const VerifyOptions& opt) {
  const std::string name = "total_length_mixture_a" + fmt(alpha) + "_p" + std::to_string(p);
  const long trunc = pick_trunc(opt, kMatchedTrunc);

  return run_with_retry(
      name, "ks", opt.alpha_level, opt.seed, [&](std::uint64_t attempt) {
        // grown side
        const std::uint64_t grow_base = name_stream(name + "#grow", attempt);
        std::vector<double> grown(opt.n_samples);
        GrowthConfig cfg;
        cfg.alpha = alpha;
        cfg.p_target = p;
        cfg.algorithm = Algorithm::I;
        cfg.seed = opt.seed;
        cfg.n_trunc = trunc;
        for (std::size_t i = 0; i < opt.n_samples; ++i) {
          cfg.stream = grow_base + 1 + i;
          grown[i] = grow(cfg).tree.total_length();
        }

        // mixture side: M_p independent of the bracket's own Beta factors
        RngStream rng(opt.seed, name_stream(name + "#mix", attempt));
        std::vector<double> mixed(opt.n_samples);
        std::vector<double> betas(p > 1 ? p - 1 : 0), bs(p > 1 ? p - 1 : 0);
        for (std::size_t i = 0; i < opt.n_samples; ++i) {
          ChainState s = chain_init(alpha, rng, trunc);
          for (long q = 1; q < p; ++q) chain_step(s, rng);
          for (long j = 0; j < p - 1; ++j) {
            const BetaParams bp = beta_step_params(alpha, j + 1);
            betas[j] = sample_beta(bp.a, bp.b, rng);
            bs[j] = sample_beta(1.0, (2.0 - alpha) / (alpha - 1.0), rng);
          }
          double bracket = 0.0, suffix = 1.0;
          for (long j = p - 2; j >= 0; --j) {
            bracket += bs[j] * (1.0 - betas[j]) * suffix;
            suffix *= betas[j];
          }
          bracket += suffix;
          mixed[i] = s.m * bracket;
        }

        const KsResult k = ks_two_sample(std::move(grown), std::move(mixed));
        TestReport r;
        r.stat = k.stat;
        r.pvalue = k.pvalue;
        r.n = opt.n_samples;
        r.detail = "alpha=" + fmt(alpha) + " p=" + std::to_string(p) +
                   " n_trunc=" + std::to_string(trunc);
        return r;
      });
}

namespace {

// shared generators for the Dirichlet recursion identities (p = 2, k = 3)
struct InsertVertexDraw {
  double c1, c4, c5;  // coords 1, 4 (new) and 5 (merged) of the output vector
};

InsertVertexDraw draw_insert_vertex(double alpha, double a1, RngStream& rng) {
  const double b = sample_beta(1.0, (2.0 - alpha) / (alpha - 1.0), rng);
  const double bp =
      sample_beta((3.0 * alpha - 2.0) / (alpha - 1.0), 1.0 / (alpha - 1.0), rng);
  const std::vector<double> d = sample_dirichlet({1.0, 1.0, 1.0, a1}, rng);
  return {bp * d[0], (1.0 - bp) * b, bp * d[3] + (1.0 - bp) * (1.0 - b)};
}

struct InsertEdgeDraw {
  double c1, c2, c5, c7;  // split halves, the new coordinate, the residual
};

InsertEdgeDraw draw_insert_edge(double alpha, RngStream& rng) {
  const double u = rng.uniform();
  const double b = sample_beta(1.0, (2.0 - alpha) / (alpha - 1.0), rng);
  const double bp =
      sample_beta((3.0 * alpha - 2.0) / (alpha - 1.0), 1.0 / (alpha - 1.0), rng);
  const std::vector<double> d = sample_dirichlet({2.0, 1.0, 1.0, 1.0}, rng);
  return {bp * d[0] * u, bp * d[0] * (1.0 - u), (1.0 - bp) * b,
          (1.0 - bp) * (1.0 - b)};
}

}  // namespace

std::vector<TestReport> check_dirichlet_identities(const VerifyOptions& opt) {
  std::vector<TestReport> out;
  const std::size_t n = opt.n_samples;

  // ML(beta, theta) is characterized by G^beta * M ~ Gamma(theta/beta)
  // for an independent G ~ Gamma(theta); exact at beta = 1/2.
  out.push_back(one_sample_ks(
      "ml_gamma_product_b0.5_t1", opt,
      [](RngStream& r) {
        return std::sqrt(sample_gamma(1.0, r)) * sample_ml_half_theta(1.0, r);
      },
      [](double x) { return gamma_cdf(2.0, x); }, "beta=0.5 theta=1 target=Gamma(2)"));
  out.push_back(one_sample_ks(
      "ml_gamma_product_b0.5_t0.5", opt,
      [](RngStream& r) {
        return std::sqrt(sample_gamma(0.5, r)) * sample_ml_half_theta(0.5, r);
      },
      [](double x) { return gamma_cdf(1.0, x); },
      "beta=0.5 theta=0.5 target=Gamma(1)"));

  // size-biased pick from Dir(1,2): index law and conditioned coordinate
  {
    const std::string name = "dirichlet_size_bias_index";
    out.push_back(run_with_retry(
        name, "chi2", opt.alpha_level, opt.seed, [&](std::uint64_t attempt) {
          RngStream rng(opt.seed, name_stream(name, attempt));
          std::vector<std::uint64_t> counts(2, 0);
          for (std::size_t i = 0; i < n; ++i) {
            const double d1 = sample_beta(1.0, 2.0, rng);
            ++counts[rng.uniform() < d1 ? 0 : 1];
          }
          const ChiSquareResult c = chi_square_gof(counts, {1.0 / 3.0, 2.0 / 3.0});
          TestReport r;
          r.stat = c.stat;
          r.pvalue = c.pvalue;
          r.n = n;
          r.detail = "Dir(1,2): P(I=1)=1/3";
          return r;
        }));

    for (int cond = 1; cond <= 2; ++cond) {
      const std::string cname = "dirichlet_size_bias_cond" + std::to_string(cond);
      // conditionally on I=i the parameter vector gains 1 in slot i
      const double ta = cond == 1 ? 2.0 : 1.0;
      const double tb = cond == 1 ? 2.0 : 3.0;
      out.push_back(run_with_retry(
          cname, "ks", opt.alpha_level, opt.seed, [&](std::uint64_t attempt) {
            RngStream rng(opt.seed, name_stream(cname, attempt));
            std::vector<double> xs;
            xs.reserve(n / 2);
            for (std::size_t i = 0; i < n; ++i) {
              const double d1 = sample_beta(1.0, 2.0, rng);
              const int idx = rng.uniform() < d1 ? 1 : 2;
              if (idx == cond) xs.push_back(d1);
            }
            const KsResult k =
                ks_vs_cdf(xs, [&](double x) { return beta_cdf(ta, tb, x); });
            TestReport r;
            r.stat = k.stat;
            r.pvalue = k.pvalue;
            r.n = xs.size();
            r.detail = "Dir(1,2) | I=" + std::to_string(cond) + " -> first coord Beta(" +
                       fmt(ta) + "," + fmt(tb) + ")";
            return r;
          }));
    }
  }

  // leading subvector of a Dirichlet is an independent Beta rescaling:
  // (D_1,...,D_q) = B * (Dtilde_1,...,Dtilde_q)
  struct SubvectorCase {
    const char* tag;
    std::vector<double> params;  // full Dirichlet parameters, q = 2
  };
  for (const SubvectorCase& sc :
       {SubvectorCase{"111", {1.0, 1.0, 1.0}}, SubvectorCase{"123", {1.0, 2.0, 3.0}}}) {
    const double a12 = sc.params[0] + sc.params[1];
    const double rest = sc.params[2];
    out.push_back(two_sample_ks(
        std::string("dirichlet_subvector_sum_") + sc.tag, opt,
        [&](RngStream& r) {
          const auto d = sample_dirichlet(sc.params, r);
          return d[0] + d[1];
        },
        [&](RngStream& r) { return sample_beta(a12, rest, r); },
        "Dir(" + fmt(sc.params[0]) + "," + fmt(sc.params[1]) + "," + fmt(sc.params[2]) +
            "): D1+D2 vs Beta(" + fmt(a12) + "," + fmt(rest) + ")"));
    out.push_back(two_sample_ks(
        std::string("dirichlet_subvector_coord_") + sc.tag, opt,
        [&](RngStream& r) {
          const auto d = sample_dirichlet(sc.params, r);
          return d[0];
        },
        [&](RngStream& r) {
          const double b = sample_beta(a12, rest, r);
          const auto dt = sample_dirichlet({sc.params[0], sc.params[1]}, r);
          return b * dt[0];
        },
        "Dir marginal D1 vs B * Dtilde1"));
  }

  // branch insertion at an existing internal vertex: inserting the new
  // fragment (1-Bp)B and merging (1-Bp)(1-B) into coordinate a1 turns
  // Dir(1,1,1,a1) scaled by Bp into Dir(1,1,1,1,a1 + (2-alpha)/(alpha-1)).
  {
    const double alpha = 1.5, a1 = 2.0;  // target Dir(1,1,1,1,3), mass 7
    out.push_back(one_sample_ks(
        "dirichlet_insert_vertex_coord1", opt,
        [=](RngStream& r) { return draw_insert_vertex(alpha, a1, r).c1; },
        [](double x) { return beta_cdf(1.0, 6.0, x); },
        "alpha=1.5: coord 1 vs Beta(1,6)"));
    out.push_back(one_sample_ks(
        "dirichlet_insert_vertex_new", opt,
        [=](RngStream& r) { return draw_insert_vertex(alpha, a1, r).c4; },
        [](double x) { return beta_cdf(1.0, 6.0, x); },
        "alpha=1.5: inserted coord vs Beta(1,6)"));
    out.push_back(one_sample_ks(
        "dirichlet_insert_vertex_merged", opt,
        [=](RngStream& r) { return draw_insert_vertex(alpha, a1, r).c5; },
        [](double x) { return beta_cdf(3.0, 4.0, x); },
        "alpha=1.5: merged coord vs Beta(3,4)"));
    out.push_back(one_sample_ks(
        "dirichlet_insert_vertex_pairsum", opt,
        [=](RngStream& r) {
          const auto d = draw_insert_vertex(alpha, a1, r);
          return d.c4 + d.c5;
        },
        [](double x) { return beta_cdf(4.0, 3.0, x); },
        "alpha=1.5: inserted+merged vs Beta(4,3)"));
  }
  {
    const double alpha = 1.8, a1 = 1.25;  // target Dir(1,1,1,1,1.5), mass 5.5
    out.push_back(one_sample_ks(
        "dirichlet_insert_vertex_a1.8_new", opt,
        [=](RngStream& r) { return draw_insert_vertex(alpha, a1, r).c4; },
        [](double x) { return beta_cdf(1.0, 4.5, x); },
        "alpha=1.8: inserted coord vs Beta(1,4.5)"));
    out.push_back(one_sample_ks(
        "dirichlet_insert_vertex_a1.8_merged", opt,
        [=](RngStream& r) { return draw_insert_vertex(alpha, a1, r).c5; },
        [](double x) { return beta_cdf(1.5, 4.0, x); },
        "alpha=1.8: merged coord vs Beta(1.5,4)"));
  }

  // branch insertion on an edge: uniformly splitting the doubled coordinate
  // of Dir(2,1,1,1) and appending the two new fragments yields Dir(1^7)
  // at alpha = 1.5 (residual parameter (2-alpha)/(alpha-1) = 1).
  out.push_back(one_sample_ks(
      "dirichlet_insert_edge_split1", opt,
      [](RngStream& r) { return draw_insert_edge(1.5, r).c1; },
      [](double x) { return beta_cdf(1.0, 6.0, x); },
      "alpha=1.5: split half vs Beta(1,6)"));
  out.push_back(one_sample_ks(
      "dirichlet_insert_edge_pairsum", opt,
      [](RngStream& r) {
        const auto d = draw_insert_edge(1.5, r);
        return d.c1 + d.c2;
      },
      [](double x) { return beta_cdf(2.0, 5.0, x); },
      "alpha=1.5: rejoined halves vs Beta(2,5)"));
  out.push_back(one_sample_ks(
      "dirichlet_insert_edge_new", opt,
      [](RngStream& r) { return draw_insert_edge(1.5, r).c5; },
      [](double x) { return beta_cdf(1.0, 6.0, x); },
      "alpha=1.5: inserted coord vs Beta(1,6)"));
  out.push_back(one_sample_ks(
      "dirichlet_insert_edge_last", opt,
      [](RngStream& r) { return draw_insert_edge(1.5, r).c7; },
      [](double x) { return beta_cdf(1.0, 6.0, x); },
      "alpha=1.5: residual coord vs Beta(1,6)"));

  // base case of the edge insertion (single-edge tree): splitting the unit
  // mass gives Dir(1,1,1,1) at alpha = 1.5
  {
    const double alpha = 1.5;
    auto draw_base = [alpha](RngStream& r) {
      const double u = r.uniform();
      const double b = sample_beta(1.0, (2.0 - alpha) / (alpha - 1.0), r);
      const double bp =
          sample_beta((2.0 * alpha - 2.0) / (alpha - 1.0), 1.0 / (alpha - 1.0), r);
      return std::array<double, 4>{bp * u, bp * (1.0 - u), (1.0 - bp) * b,
                                   (1.0 - bp) * (1.0 - b)};
    };
    out.push_back(one_sample_ks(
        "dirichlet_insert_base_coord1", opt,
        [=](RngStream& r) { return draw_base(r)[0]; },
        [](double x) { return beta_cdf(1.0, 3.0, x); },
        "alpha=1.5 base case: coord 1 vs Beta(1,3)"));
    out.push_back(one_sample_ks(
        "dirichlet_insert_base_coord3", opt,
        [=](RngStream& r) { return draw_base(r)[2]; },
        [](double x) { return beta_cdf(1.0, 3.0, x); },
        "alpha=1.5 base case: coord 3 vs Beta(1,3)"));
    out.push_back(one_sample_ks(
        "dirichlet_insert_base_pairsum", opt,
        [=](RngStream& r) {
          const auto d = draw_base(r);
          return d[0] + d[1];
        },
        [](double x) { return beta_cdf(2.0, 2.0, x); },
        "alpha=1.5 base case: split halves sum vs Beta(2,2)"));
  }

  return out;
}

std::vector<TestReport> check_lengths_masses(double beta, double theta,
                                             const std::vector<double>& thetas,
                                             const VerifyOptions& opt) {
  if (thetas.empty()) throw std::invalid_argument("lengths-masses: empty partition");
  double sum = 0.0;
  for (double t : thetas) {
    if (!(t > 0.0)) throw std::invalid_argument("lengths-masses: partition entries must be > 0");
    sum += t;
  }
  if (std::abs(sum - theta) > 1e-9)
    throw std::invalid_argument("lengths-masses: partition must sum to theta");

  const std::size_t ncoord = thetas.size();
  const std::string tag = "b" + fmt(beta) + "_t" + fmt(theta) + "_n" + std::to_string(ncoord);
  const long trunc = pick_trunc(opt, kMatchedTrunc);

  std::vector<double> zparams(ncoord);
  for (std::size_t i = 0; i < ncoord; ++i) zparams[i] = thetas[i] / beta;

  const bool exact_half = std::abs(beta - 0.5) < 1e-12;
  Gen lhs, rhs_coord1;
  std::function<double(RngStream&, std::size_t)> rhs_coord;

  if (exact_half) {
    lhs = [=](RngStream& r) {
      const double m = sample_ml_half_theta(theta, r);
      return m * sample_dirichlet(zparams, r)[0];
    };
    rhs_coord = [=](RngStream& r, std::size_t i) {
      const double x = sample_dirichlet(thetas, r)[i];
      return std::sqrt(x) * sample_ml_half_theta(thetas[i], r);
    };
  } else {
    // the chain samples ML(1 - 1/alpha, q - 1/alpha); accept parameters of
    // that form and use the same truncation on both sides so that the
    // truncated scale factors cancel from the comparison
    const double alpha = 1.0 / (1.0 - beta);
    if (!(alpha > 1.0 && alpha < 2.0))
      throw std::invalid_argument("lengths-masses: beta outside (0,1/2]");
    auto as_chain_p = [&](double th) {
      const double q = th + 1.0 - beta;
      const long lq = std::lround(q);
      if (lq < 1 || std::abs(q - lq) > 1e-9)
        throw std::invalid_argument(
            "lengths-masses: theta " + fmt(th) + " is not of the form q - 1/alpha");
      return lq;
    };
    const long p_lhs = as_chain_p(theta);
    std::vector<long> p_rhs(ncoord);
    for (std::size_t i = 0; i < ncoord; ++i) p_rhs[i] = as_chain_p(thetas[i]);

    lhs = [=](RngStream& r) {
      ChainState s = chain_init(alpha, r, trunc);
      for (long q = 1; q < p_lhs; ++q) chain_step(s, r);
      return s.m * sample_dirichlet(zparams, r)[0];
    };
    rhs_coord = [=](RngStream& r, std::size_t i) {
      const double x = sample_dirichlet(thetas, r)[i];
      ChainState s = chain_init(alpha, r, trunc);
      for (long q = 1; q < p_rhs[i]; ++q) chain_step(s, r);
      return std::pow(x, beta) * s.m;
    };
  }

  std::vector<TestReport> out;
  const std::size_t coords_tested = std::min<std::size_t>(2, ncoord);
  for (std::size_t i = 0; i < coords_tested; ++i) {
    // exchangeable only when the partition is; test the matching coordinate
    Gen gl;
    if (i == 0) {
      gl = lhs;
    } else {
      gl = [=](RngStream& r) {
        double m;
        if (exact_half) {
          m = sample_ml_half_theta(theta, r);
        } else {
          const double alpha = 1.0 / (1.0 - beta);
          ChainState s = chain_init(alpha, r, trunc);
          const long p_lhs = std::lround(theta + 1.0 - beta);
          for (long q = 1; q < p_lhs; ++q) chain_step(s, r);
          m = s.m;
        }
        return m * sample_dirichlet(zparams, r)[i];
      };
    }
    out.push_back(two_sample_ks(
        "ml_dirichlet_split_" + tag + "_coord" + std::to_string(i + 1), opt, gl,
        [&, i](RngStream& r) { return rhs_coord(r, i); },
        "M*Z_i vs X_i^beta*M_i, beta=" + fmt(beta) + " theta_i=" + fmt(thetas[i])));
  }

  // closed-form first moment of the first coordinate
  {
    const std::string name = "ml_dirichlet_split_" + tag + "_mean";
    const double e_m = ml_moment(ml_params(beta, theta), 1);
    const double e_z1 = thetas[0] / theta;  // Dirichlet coordinate mean
    const double expected = e_m * e_z1;
    out.push_back(run_with_retry(
        name, "moment", opt.alpha_level, opt.seed, [&](std::uint64_t attempt) {
          RngStream rng(opt.seed, name_stream(name, attempt));
          MeanAccumulator acc;
          for (std::size_t i = 0; i < opt.n_samples; ++i) acc.add(lhs(rng));
          const MomentZResult z = acc.test(expected);
          TestReport r;
          r.stat = z.z;
          r.pvalue = z.pvalue;
          r.n = opt.n_samples;
          r.detail = "E[M*Z_1]=" + fmt(expected) + " sample=" + fmt(z.sample_mean) +
                     " se=" + fmt(z.se);
          return r;
        }));
  }
  return out;
}

std::vector<TestReport> check_brownian_reduction(int p_max, const VerifyOptions& opt) {
  std::vector<TestReport> out;
  if (p_max < 1) throw std::invalid_argument("brownian reduction: p_max must be >= 1");

  for (int q = 1; q <= p_max; ++q) {
    const std::string name = "brownian_increment_p" + std::to_string(q);
    out.push_back(run_with_retry(
        name, "ks", opt.alpha_level, opt.seed, [&](std::uint64_t attempt) {
          RngStream rng(opt.seed, name_stream(name, attempt));
          std::vector<double> xs(opt.n_samples);
          for (auto& x : xs) {
            ChainState s = chain_init(2.0, rng);
            double prev_sq = 0.0;
            for (int j = 1; j < q; ++j) {
              prev_sq = s.m * s.m;
              chain_step(s, rng);
            }
            x = (s.m * s.m - prev_sq) / 4.0;
          }
          const KsResult k = ks_vs_cdf(xs, exp_cdf);
          TestReport r;
          r.stat = k.stat;
          r.pvalue = k.pvalue;
          r.n = opt.n_samples;
          r.detail = "increment " + std::to_string(q) + " of M_p^2/4 vs Exp(1)";
          return r;
        }));
  }

  if (p_max >= 2) {
    // independence of consecutive increments: all sample correlations stay
    // within 5 standard errors of zero (no retry needed at 5 sigma)
    const std::string name = "brownian_increment_corr";
    RngStream rng(opt.seed, name_stream(name, 0));
    const std::size_t n = opt.n_samples;
    std::vector<MeanAccumulator> mean(p_max);
    std::vector<std::vector<double>> inc(p_max, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      ChainState s = chain_init(2.0, rng);
      double prev_sq = 0.0;
      for (int q = 1; q <= p_max; ++q) {
        if (q > 1) chain_step(s, rng);
        const double sq = s.m * s.m;
        inc[q - 1][i] = (sq - prev_sq) / 4.0;
        mean[q - 1].add(inc[q - 1][i]);
        prev_sq = sq;
      }
    }
    double max_z = 0.0;
    std::string worst;
    for (int q = 0; q + 1 < p_max; ++q) {
      double cov = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        cov += (inc[q][i] - mean[q].mean()) * (inc[q + 1][i] - mean[q + 1].mean());
      cov /= static_cast<double>(n - 1);
      const double corr =
          cov / std::sqrt(mean[q].variance() * mean[q + 1].variance());
      const double z = corr * std::sqrt(static_cast<double>(n));
      if (std::abs(z) > std::abs(max_z)) {
        max_z = z;
        worst = std::to_string(q + 1) + "," + std::to_string(q + 2);
      }
    }
    TestReport r;
    r.name = name;
    r.kind = "moment";
    r.seed = opt.seed;
    r.stat = max_z;
    r.pvalue = normal_two_sided(max_z);
    r.n = n;
    r.pass = std::abs(max_z) <= 5.0;
    r.detail = "max |corr|*sqrt(n) over consecutive increments, worst pair (" + worst +
               "); bound 5";
    out.push_back(r);
  }
  return out;
}

std::vector<TestReport> check_ml_moments(double alpha, int p_max, int k_max,
                                         const VerifyOptions& opt) {
  if (p_max < 1 || k_max < 1)
    throw std::invalid_argument("moments: p_max and k_max must be >= 1");
  const long trunc = pick_trunc(opt, kMomentTrunc);
  const std::string base = "ml_moment_a" + fmt(alpha);

  // one shared sampling pass fills every (p, k) accumulator
  auto sample_pass = [&](std::uint64_t attempt) {
    RngStream rng(opt.seed, name_stream(base, attempt));
    std::vector<std::vector<MeanAccumulator>> acc(
        p_max, std::vector<MeanAccumulator>(k_max));
    for (std::size_t i = 0; i < opt.n_samples; ++i) {
      ChainState s = chain_init(alpha, rng, trunc);
      for (int p = 1; p <= p_max; ++p) {
        if (p > 1) chain_step(s, rng);
        double power = 1.0;
        for (int k = 1; k <= k_max; ++k) {
          power *= s.m;
          acc[p - 1][k - 1].add(power);
        }
      }
    }
    return acc;
  };

  auto judge = [&](const std::vector<std::vector<MeanAccumulator>>& acc, int p, int k) {
    const double expected =
        ml_moment(ml_params(1.0 - 1.0 / alpha, p - 1.0 / alpha), k);
    const MomentZResult z = acc[p - 1][k - 1].test(expected);
    TestReport r;
    r.name = base + "_p" + std::to_string(p) + "_k" + std::to_string(k);
    r.kind = "moment";
    r.seed = opt.seed;
    r.stat = z.z;
    r.pvalue = z.pvalue;
    r.n = opt.n_samples;
    r.pass = r.pvalue >= opt.alpha_level;
    r.detail = "E[M_" + std::to_string(p) + "^" + std::to_string(k) + "]=" +
               fmt(expected) + " sample=" + fmt(z.sample_mean) + " se=" + fmt(z.se) +
               " n_trunc=" + std::to_string(trunc);
    return r;
  };

  const auto acc0 = sample_pass(0);
  std::vector<TestReport> out;
  bool any_fail = false;
  for (int p = 1; p <= p_max; ++p)
    for (int k = 1; k <= k_max; ++k) {
      out.push_back(judge(acc0, p, k));
      any_fail = any_fail || !out.back().pass;
    }
  if (any_fail) {
    const auto acc1 = sample_pass(1);
    for (auto& r : out) {
      if (r.pass) continue;
      // unpack p and k back out of the name suffix
      const auto pp = r.name.rfind("_p");
      const auto kk = r.name.rfind("_k");
      const int p = std::stoi(r.name.substr(pp + 2, kk - pp - 2));
      const int k = std::stoi(r.name.substr(kk + 2));
      const double p0 = r.pvalue;
      r = judge(acc1, p, k);
      r.reran = true;
      r.detail += "; first attempt p=" + fmt(p0);
    }
  }
  return out;
}

TestReport check_calibration(const VerifyOptions& opt) {
  const std::string name = "harness_calibration";
  const std::size_t reps = 1000, per_rep = 400;
  const double nominal = 0.01, band = 0.005;

  auto attempt_run = [&](std::uint64_t attempt) {
    RngStream rng(opt.seed, name_stream(name, attempt));
    std::size_t rejections = 0;
    std::vector<double> xs(per_rep);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      for (auto& x : xs) x = rng.uniform();
      const KsResult k = ks_vs_cdf(xs, [](double x) { return x; });
      if (k.pvalue < nominal) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    TestReport r;
    r.name = name;
    r.kind = "moment";
    r.seed = opt.seed;
    r.stat = rate;
    r.pvalue = normal_two_sided((static_cast<double>(rejections) - reps * nominal) /
                                std::sqrt(reps * nominal * (1.0 - nominal)));
    r.n = reps;
    r.pass = std::abs(rate - nominal) <= band;
    r.detail = "true-null KS rejections " + std::to_string(rejections) + "/" +
               std::to_string(reps) + ", band 1% +/- 0.5%";
    return r;
  };

  TestReport r = attempt_run(0);
  if (!r.pass) {
    const double rate0 = r.stat;
    r = attempt_run(1);
    r.reran = true;
    r.detail += "; first attempt rate=" + fmt(rate0);
  }
  return r;
}

namespace {

void append(std::vector<TestReport>& all, std::vector<TestReport> more) {
  for (auto& r : more) all.push_back(std::move(r));
}

std::vector<TestReport> suite_shapes(const VerifyOptions& opt) {
  std::vector<TestReport> out;
  for (double alpha : opt.alphas) {
    for (int p = 2; p <= 5; ++p) out.push_back(check_shape_formula(alpha, p));
    for (int p = 3; p <= 5; ++p)
      for (Algorithm alg : {Algorithm::I, Algorithm::II})
        out.push_back(check_shape_montecarlo(alpha, p, alg, opt));
  }
  return out;
}

std::vector<TestReport> suite_lengths(const VerifyOptions& opt) {
  std::vector<TestReport> out;
  for (double alpha : opt.alphas) {
    for (int p : {2, 3}) {
      for (const auto& [sig, prob] : enumerate_shape_law(alpha, p)) {
        if (prob < opt.shape_floor) continue;  // unreachable or starved shapes
        append(out, check_lengths_given_shape(alpha, p, sig, opt));
      }
    }
  }
  return out;
}

std::vector<TestReport> suite_mixture(const VerifyOptions& opt) {
  std::vector<TestReport> out;
  for (double alpha : opt.alphas)
    out.push_back(check_total_length_mixture(alpha, 4, opt));
  return out;
}

std::vector<TestReport> suite_dirichlet(const VerifyOptions& opt) {
  std::vector<TestReport> out = check_dirichlet_identities(opt);
  append(out, check_lengths_masses(0.5, 1.0, {0.5, 0.5}, opt));
  // the truncated-product path at alpha = 1.5: theta = 4/3 split into four
  // copies of 1/3 (i.e. M_2 against four independent M_1 factors)
  append(out, check_lengths_masses(1.0 / 3.0, 4.0 / 3.0,
                                   {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, opt));
  return out;
}

std::vector<TestReport> suite_brownian(const VerifyOptions& opt) {
  return check_brownian_reduction(5, opt);
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"shapes", "lengths", "mixture", "dirichlet", "brownian", "all"};
}

std::vector<TestReport> run_suite(const std::string& suite, const VerifyOptions& opt) {
  if (suite == "shapes") return suite_shapes(opt);
  if (suite == "lengths") return suite_lengths(opt);
  if (suite == "mixture") return suite_mixture(opt);
  if (suite == "dirichlet") return suite_dirichlet(opt);
  if (suite == "brownian") return suite_brownian(opt);
  if (suite == "all") {
    std::vector<TestReport> out = suite_shapes(opt);
    append(out, suite_lengths(opt));
    append(out, suite_mixture(opt));
    append(out, suite_dirichlet(opt));
    for (double alpha : opt.alphas)
      append(out, check_ml_moments(alpha, 4, 2, opt));
    append(out, suite_brownian(opt));
    out.push_back(check_calibration(opt));
    return out;
  }
  throw std::invalid_argument("unknown suite: " + suite);
}

bool all_passed(const std::vector<TestReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass && !r.inconclusive) return false;
  return true;
}

}  // namespace stabletrees
