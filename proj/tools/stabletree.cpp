// command-line front end: sample / chain / verify / bench
#include <sys/resource.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stabletrees/chain.hpp"
#include "stabletrees/distributions.hpp"
#include "stabletrees/io.hpp"
#include "stabletrees/linebreaking.hpp"
#include "stabletrees/verify.hpp"

#ifndef STABLETREES_VERSION
#define STABLETREES_VERSION "0.0.0"
#endif

namespace st = stabletrees;
using nlohmann::json;

namespace {

// flag combinations the parser cannot reject on its own; maps to exit 2
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json versions_block() {
  return json{{"stabletrees", STABLETREES_VERSION},
              {"tree_format", 1},
              {"compiler", __VERSION__}};
}

// <stem>.p7<ext>; used for snapshot outputs
std::string with_tag(const std::string& path, const std::string& tag) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::vector<std::string>& argv_echo,
                    const json& config, std::uint64_t seed,
                    const std::string& started,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["argv"] = argv_echo;
  m["config"] = config;
  m["seed"] = seed;
  m["versions"] = versions_block();
  m["timestamps"] = {{"started", started}, {"finished", now_iso8601()}};
  m["outputs"] = outputs;
  st::atomic_write(out_path + ".manifest.json", m.dump(2) + "\n");
}

st::RTree discrete_to_rtree(const st::DiscreteTree& t) {
  const std::size_t n = t.parent.size();
  std::vector<std::size_t> parent(n, 0);
  std::vector<double> length(n, 1.0);
  std::vector<std::size_t> leaf_order(t.leaf_count, 0);
  for (std::size_t v = 1; v < n; ++v)
    parent[v] = static_cast<std::size_t>(t.parent[v]);
  length[0] = 0.0;
  for (std::size_t v = 0; v < n; ++v)
    if (t.label[v] > 0) leaf_order[t.label[v] - 1] = v;
  return st::RTree::from_parts(parent, length, leaf_order);
}

std::string render_tree(const st::RTree& tree, const std::string& format,
                        double alpha, std::uint64_t seed) {
  if (format == "json") return st::tree_to_json(tree, alpha, seed);
  if (format == "newick") return st::tree_to_newick(tree) + "\n";
  return st::distance_matrix_csv(tree);
}

// ---------------------------------------------------------------- sample

struct SampleOpts {
  double alpha = 1.5;
  long leaves = 10;
  std::string algorithm = "I";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::vector<long> snapshots;
  long n_trunc = 0;
  double intensity = 1.0;
  bool track_weights = false;
};

int run_sample(const SampleOpts& o, const std::vector<std::string>& argv_echo,
               const std::string& started) {
  if (o.leaves < 1) throw usage_error("--leaves must be >= 1");
  const bool discrete = o.algorithm == "marchal" || o.algorithm == "remy";
  if (o.algorithm == "remy" && o.alpha != 2.0)
    throw usage_error("remy requires --alpha 2");
  if (discrete && !o.snapshots.empty())
    throw usage_error("--snapshots is not available for " + o.algorithm);
  if (!o.out.empty() && o.out.back() == '/')
    throw usage_error("--out must be a file path");
  if (o.snapshots.size() && o.out.empty())
    throw usage_error("--snapshots requires --out");
  for (long s : o.snapshots)
    if (s < 1 || s > o.leaves)
      throw usage_error("--snapshots entries must lie in [1, leaves]");

  st::RTree tree(1.0);
  std::vector<st::RTree> snaps;
  bool trunc_warning = false;
  if (discrete) {
    st::RngStream rng(o.seed, 0);
    const st::DiscreteTree dt = o.algorithm == "remy"
                                    ? st::grow_remy(o.leaves, rng)
                                    : st::grow_marchal(o.alpha, o.leaves, rng);
    tree = discrete_to_rtree(dt);
  } else {
    st::GrowthConfig cfg;
    cfg.alpha = o.alpha;
    cfg.p_target = o.leaves;
    cfg.algorithm = st::algorithm_from_string(o.algorithm);
    cfg.seed = o.seed;
    cfg.n_trunc = o.n_trunc;
    cfg.track_weights = o.track_weights;
    cfg.aldous_intensity = o.intensity;
    cfg.snapshots = o.snapshots;
    if (cfg.algorithm == st::Algorithm::Aldous && o.alpha != 2.0)
      throw usage_error("aldous requires --alpha 2");
    st::GrowthResult res = st::grow(cfg);
    tree = std::move(res.tree);
    snaps = std::move(res.snapshots);
    trunc_warning = res.trunc_warning;
  }
  if (trunc_warning)
    std::fprintf(stderr,
                 "warning: series truncation below the safe minimum; "
                 "raise --n-trunc or STABLETREES_N_TRUNC\n");

  const std::string body = render_tree(tree, o.format, o.alpha, o.seed);
  if (o.out.empty()) {
    std::fwrite(body.data(), 1, body.size(), stdout);
    return 0;
  }
  std::vector<std::string> outputs;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const std::string path =
        with_tag(o.out, ".p" + std::to_string(o.snapshots[i]));
    st::atomic_write(path, render_tree(snaps[i], o.format, o.alpha, o.seed));
    outputs.push_back(path);
  }
  st::atomic_write(o.out, body);
  outputs.push_back(o.out);

  json config{{"alpha", o.alpha},
              {"leaves", o.leaves},
              {"algorithm", o.algorithm},
              {"format", o.format},
              {"snapshots", o.snapshots},
              {"n_trunc", o.n_trunc > 0 ? o.n_trunc : st::default_n_trunc()},
              {"track_weights", o.track_weights}};
  if (o.algorithm == "aldous") config["intensity"] = o.intensity;
  write_manifest(o.out, "sample", argv_echo, config, o.seed, started, outputs);
  return 0;
}

// ----------------------------------------------------------------- chain

struct ChainOpts {
  double alpha = 1.5;
  long steps = 10;
  std::uint64_t seed = 1;
  std::string out;
  long n_trunc = 0;
};

int run_chain(const ChainOpts& o, const std::vector<std::string>& argv_echo,
              const std::string& started) {
  if (o.steps < 1) throw usage_error("--steps must be >= 1");
  st::RngStream rng(o.seed, 0);
  const auto rows = st::chain_trajectory(o.alpha, o.steps, rng, o.n_trunc);
  const std::string body = st::chain_csv(rows);
  if (o.out.empty()) {
    std::fwrite(body.data(), 1, body.size(), stdout);
    return 0;
  }
  st::atomic_write(o.out, body);
  json config{{"alpha", o.alpha},
              {"steps", o.steps},
              {"n_trunc", o.n_trunc > 0 ? o.n_trunc : st::default_n_trunc()}};
  write_manifest(o.out, "chain", argv_echo, config, o.seed, started, {o.out});
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyCliOpts {
  std::string suite = "all";
  std::vector<double> alphas;
  long n = 0;
  std::uint64_t seed = 1;
  std::string report;
  long n_trunc = 0;
  double alpha_level = 0.0;
};

int run_verify(const VerifyCliOpts& o, const std::vector<std::string>& argv_echo,
               const std::string& started) {
  bool known = false;
  for (const auto& s : st::suite_names()) known = known || s == o.suite;
  if (!known) throw usage_error("unknown suite: " + o.suite);

  st::VerifyOptions opt;
  if (!o.alphas.empty()) opt.alphas = o.alphas;
  if (o.n > 0) opt.n_samples = o.n;
  opt.n_trunc = o.n_trunc;
  opt.seed = o.seed;
  if (o.alpha_level > 0.0) opt.alpha_level = o.alpha_level;

  const auto reports = st::run_suite(o.suite, opt);

  std::string jsonl;
  int failed = 0, inconclusive = 0;
  for (const auto& r : reports) {
    jsonl += r.to_json();
    jsonl += '\n';
    std::printf("%-12s %-44s %-7s p=%g\n", r.verdict().c_str(), r.name.c_str(),
                r.kind.c_str(), r.pvalue);
    if (r.inconclusive) {
      ++inconclusive;
      std::fprintf(stderr, "warning: %s inconclusive: %s\n", r.name.c_str(),
                   r.detail.c_str());
    } else if (!r.pass) {
      ++failed;
    }
  }
  std::printf("%zu checks: %zu passed, %d failed, %d inconclusive\n",
              reports.size(), reports.size() - failed - inconclusive, failed,
              inconclusive);

  if (!o.report.empty()) {
    st::atomic_write(o.report, jsonl);
    json config{{"suite", o.suite},
                {"alphas", opt.alphas},
                {"n_samples", opt.n_samples},
                {"n_trunc", opt.n_trunc > 0 ? opt.n_trunc : 0},
                {"alpha_level", opt.alpha_level},
                {"shape_floor", opt.shape_floor}};
    write_manifest(o.report, "verify", argv_echo, config, o.seed, started,
                   {o.report});
  }
  return failed > 0 ? 1 : 0;
}

// ----------------------------------------------------------------- bench

struct BenchOpts {
  double alpha = 1.5;
  long leaves = 100000;
  std::uint64_t seed = 1;
  long n_trunc = 0;
};

double peak_rss_mb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<double>(ru.ru_maxrss) / 1024.0;  // linux: KiB
}

int run_bench(const BenchOpts& o, const std::vector<std::string>&,
              const std::string&) {
  using clock = std::chrono::steady_clock;
  if (o.leaves < 1) throw usage_error("--leaves must be >= 1");

  st::GrowthConfig cfg;
  cfg.alpha = o.alpha;
  cfg.p_target = o.leaves;
  cfg.algorithm = st::Algorithm::I;
  cfg.seed = o.seed;
  cfg.n_trunc = o.n_trunc;
  for (long s = o.leaves / 8; s >= 2 && s < o.leaves; s *= 2)
    cfg.snapshots.push_back(s);

  const auto t0 = clock::now();
  st::GrowthResult res = st::grow(cfg);
  const double grow_s = std::chrono::duration<double>(clock::now() - t0).count();

  res.tree.validate();
  for (const auto& s : res.snapshots) s.validate();
  std::printf("bench alpha=%g leaves=%ld seed=%llu\n", o.alpha, o.leaves,
              static_cast<unsigned long long>(o.seed));
  std::printf("growth: %.3f s  (%.0f leaves/s)  invariants ok\n", grow_s,
              static_cast<double>(o.leaves) / grow_s);
  std::printf("peak rss: %.1f MB\n", peak_rss_mb());

  // doubling-time table for uniform point selection on the growing index;
  // O(log n) predicts near-constant ns/op, so the ratio column should hover
  // around 1 (soft report, no hard assertion)
  st::RngStream rng(o.seed, 12345);
  std::printf("%12s %12s %8s\n", "leaves", "ns/point", "ratio");
  double prev = 0.0;
  for (std::size_t i = 0; i <= res.snapshots.size(); ++i) {
    const st::RTree& t =
        i < res.snapshots.size() ? res.snapshots[i] : res.tree;
    const long n_draws = 200000;
    const auto s0 = clock::now();
    for (long k = 0; k < n_draws; ++k) (void)t.sample_point(rng);
    const double ns =
        std::chrono::duration<double, std::nano>(clock::now() - s0).count() /
        static_cast<double>(n_draws);
    if (prev > 0.0)
      std::printf("%12zu %12.1f %8.2f\n", t.leaf_count(), ns, ns / prev);
    else
      std::printf("%12zu %12.1f %8s\n", t.leaf_count(), ns, "-");
    prev = ns;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-stable tree line-breaking toolkit"};
  app.require_subcommand(1);
  std::vector<std::string> argv_echo(argv, argv + argc);
  const std::string started = now_iso8601();

  SampleOpts so;
  auto* sample = app.add_subcommand("sample", "grow one tree and export it");
  sample->add_option("--alpha", so.alpha, "stability index in (1,2]");
  sample->add_option("--leaves", so.leaves, "number of leaves p");
  sample
      ->add_option("--algorithm", so.algorithm,
                   "I, II, normalized-I, normalized-II, aldous, marchal, remy")
      ->check(CLI::IsMember({"I", "II", "normalized-I", "normalized-II",
                             "aldous", "marchal", "remy"}));
  sample->add_option("--seed", so.seed, "rng seed");
  sample->add_option("--out", so.out, "output path (stdout when omitted)");
  sample->add_option("--format", so.format, "json, newick or distmatrix")
      ->check(CLI::IsMember({"json", "newick", "distmatrix"}));
  sample->add_option("--snapshots", so.snapshots, "leaf counts to also export")
      ->delimiter(',');
  sample->add_option("--n-trunc", so.n_trunc,
                     "series truncation (0 = STABLETREES_N_TRUNC or builtin)");
  sample->add_option("--intensity", so.intensity,
                     "cut intensity c for --algorithm aldous");
  sample->add_flag("--track-weights", so.track_weights,
                   "maintain the leftover-weight index during growth");

  ChainOpts co;
  auto* chain = app.add_subcommand("chain", "write the mass chain M_1..M_p");
  chain->add_option("--alpha", co.alpha, "stability index in (1,2]");
  chain->add_option("--steps", co.steps, "number of rows p");
  chain->add_option("--seed", co.seed, "rng seed");
  chain->add_option("--out", co.out, "output CSV path (stdout when omitted)");
  chain->add_option("--n-trunc", co.n_trunc,
                    "series truncation (0 = STABLETREES_N_TRUNC or builtin)");

  VerifyCliOpts vo;
  auto* verify = app.add_subcommand("verify", "run distributional checks");
  verify->add_option("--suite", vo.suite, "shapes, lengths, mixture, dirichlet, brownian or all");
  verify->add_option("--alpha-list", vo.alphas, "comma-separated alphas")
      ->delimiter(',');
  verify->add_option("--n", vo.n, "monte-carlo sample size per check");
  verify->add_option("--seed", vo.seed, "rng seed");
  verify->add_option("--report", vo.report, "JSONL report path");
  verify->add_option("--n-trunc", vo.n_trunc,
                     "series truncation override for every check");
  verify->add_option("--alpha-level", vo.alpha_level,
                     "per-test significance level (0 = STABLETREES_ALPHA_LEVEL "
                     "or builtin)");

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "growth + point-sampling timings");
  bench->add_option("--alpha", bo.alpha, "stability index in (1,2]");
  bench->add_option("--leaves", bo.leaves, "number of leaves p");
  bench->add_option("--seed", bo.seed, "rng seed");
  bench->add_option("--n-trunc", bo.n_trunc, "series truncation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sample) return run_sample(so, argv_echo, started);
    if (*chain) return run_chain(co, argv_echo, started);
    if (*verify) return run_verify(vo, argv_echo, started);
    return run_bench(bo, argv_echo, started);
  } catch (const usage_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
