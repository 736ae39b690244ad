#include "stabletrees/linebreaking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stabletrees/chain.hpp"
#include "stabletrees/distributions.hpp"

namespace stabletrees {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "I" || name == "i") return Algorithm::I;
  if (name == "II" || name == "ii") return Algorithm::II;
  if (name == "normalized-I" || name == "normalized-i")
    return Algorithm::NormalizedI;
  if (name == "normalized-II" || name == "normalized-ii")
    return Algorithm::NormalizedII;
  if (name == "aldous") return Algorithm::Aldous;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::I: return "I";
    case Algorithm::II: return "II";
    case Algorithm::NormalizedI: return "normalized-I";
    case Algorithm::NormalizedII: return "normalized-II";
    case Algorithm::Aldous: return "aldous";
  }
  return "?";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool selects_by_weight(Algorithm a) {
  return a == Algorithm::II || a == Algorithm::NormalizedII;
}
bool is_normalized(Algorithm a) {
  return a == Algorithm::NormalizedI || a == Algorithm::NormalizedII;
}

}  // namespace

GrowthResult grow(const GrowthConfig& cfg) {
  const AlphaParam ap = make_alpha(cfg.alpha);
  if (cfg.p_target < 1)
    throw std::invalid_argument("grow: p_target must be >= 1");
  if (cfg.algorithm == Algorithm::Aldous) {
    if (!ap.is_brownian)
      throw std::invalid_argument("grow: the Aldous construction needs alpha = 2");
    if (!(cfg.aldous_intensity > 0.0))
      throw std::invalid_argument("grow: intensity must be > 0");
  }

  RngStream rng(cfg.seed, cfg.stream);
  const bool track = cfg.track_weights || selects_by_weight(cfg.algorithm);
  const double inv_c = 1.0 / cfg.aldous_intensity;

  double m1 = 1.0;
  bool warn = false;
  ChainState chain;  // drives M_p unless normalized or Aldous
  const bool use_chain =
      cfg.algorithm != Algorithm::Aldous && !is_normalized(cfg.algorithm);
  if (cfg.algorithm == Algorithm::Aldous) {
    m1 = std::sqrt(2.0 * inv_c * rng.exponential());
  } else if (use_chain) {
    chain = chain_init(cfg.alpha, rng,
                       chain_horizon(cfg.n_trunc, cfg.p_target));
    m1 = chain.m;
    warn = chain.trunc_warning;
  }

  GrowthResult res{RTree(m1, track), {}, {}, m1, m1, warn};
  RTree& tree = res.tree;
  double m = m1;

  // algorithm I vertex-selection index: weight d_v - 1 - alpha per
  // internal vertex (one slot each; +1 whenever a vertex gains a leaf)
  FenwickTree degw;
  std::vector<std::size_t> degw_vertex;        // slot -> vertex id
  std::vector<std::size_t> degw_slot;          // vertex id -> slot
  const bool degree_select =
      cfg.algorithm == Algorithm::I || cfg.algorithm == Algorithm::NormalizedI;

  std::vector<long> schedule = cfg.snapshots;
  std::sort(schedule.begin(), schedule.end());
  std::size_t next_snap = 0;
  auto snap = [&](long p) {
    while (next_snap < schedule.size() && schedule[next_snap] == p) {
      res.snapshots.push_back(tree);
      ++next_snap;
    }
  };

  double degsum = 0.0;  // running sum of d_v - 1 - alpha over internal vertices
  auto trace_row = [&](long p, double beta, double b, char kind,
                       std::size_t host, double branch) {
    res.trace.push_back({p, m, beta, b, kind, host, branch, tree.total_length(),
                         track ? tree.weight_sum() : kNaN, degsum,
                         static_cast<long>(tree.size_nonroot())});
  };

  if (cfg.record_trace) trace_row(1, kNaN, 1.0, 'i', 0, m1);
  snap(1);

  for (long p = 1; p < cfg.p_target; ++p) {
    // 1. chain step
    double beta = kNaN;
    double m_next;
    if (cfg.algorithm == Algorithm::Aldous) {
      m_next = std::sqrt(m * m + 2.0 * inv_c * rng.exponential());
    } else if (use_chain) {
      chain_step(chain, rng);
      m_next = chain.m;
      beta = m / m_next;
    } else {
      // normalized variants only need the ratio law, for which fresh
      // independent factors are the genuine joint distribution
      const BetaParams bp = beta_step_params(cfg.alpha, p);
      beta = sample_beta(bp.a, bp.b, rng);
      m_next = m / beta;
    }
    const double delta = m_next - m;

    // 2. branch fraction
    const double b =
        cfg.algorithm == Algorithm::Aldous
            ? 1.0
            : sample_beta(1.0, (2.0 - cfg.alpha) / (cfg.alpha - 1.0), rng);
    const double branch = delta * b;
    const double leftover = delta * (1.0 - b);

    // 3. edge/vertex selector, 4. placement
    bool glue_edge = true;
    if (cfg.algorithm != Algorithm::Aldous && !ap.is_brownian) {
      const double edge_prob = tree.total_length() / m;
      glue_edge = rng.uniform() < edge_prob;
    } else if (ap.is_brownian && cfg.algorithm != Algorithm::Aldous) {
      // L_p == M_p almost surely; tolerate only rounding drift
      if (std::abs(tree.total_length() / m - 1.0) > 1e-9)
        throw std::logic_error("grow: alpha=2 length ledger drifted from M_p");
    }

    char kind;
    std::size_t host_record;
    if (glue_edge) {
      const SkeletonPoint pt = tree.sample_point(rng);
      tree.glue_at_point(pt, branch);
      kind = 'e';
      host_record = pt.edge;
      degsum += 2.0 - cfg.alpha;  // fresh internal vertex of degree 3
      if (degree_select) {
        degw_slot.resize(tree.vertex_count(), RTree::npos);
        degw_slot[tree.last_glue_vertex()] = degw.size();
        degw_vertex.push_back(tree.last_glue_vertex());
        degw.push_back(2.0 - cfg.alpha);
      }
    } else {
      std::size_t v;
      if (selects_by_weight(cfg.algorithm)) {
        v = tree.sample_weighted_vertex(rng);
      } else {
        const double wt = degw.total();
        double x;
        do {
          x = rng.uniform() * wt;
        } while (x >= wt);
        v = degw_vertex[degw.find(x)];
      }
      tree.glue_at_vertex(v, branch);
      kind = 'v';
      host_record = v;
      degsum += 1.0;  // host degree d -> d + 1
      if (degree_select) degw.add(degw_slot[v], 1.0);
    }
    if (track) tree.add_weight(tree.last_glue_vertex(), leftover);

    m = m_next;
    if (cfg.record_trace) trace_row(p + 1, beta, b, kind, host_record, branch);
    snap(p + 1);
  }
  res.m_final = m;
  if (use_chain) res.trunc_warning = res.trunc_warning || chain.trunc_warning;
  return res;
}

DiscreteTree grow_marchal(double alpha, long p_target, RngStream& rng) {
  make_alpha(alpha);
  if (p_target < 1)
    throw std::invalid_argument("grow_marchal: p_target must be >= 1");
  DiscreteTree t = DiscreteTree::initial();
  FenwickTree vw;                    // internal-vertex weights d - 1 - alpha
  std::vector<int> vw_vertex;        // slot -> vertex
  std::vector<std::size_t> vw_slot;  // vertex -> slot
  vw_slot.assign(2, static_cast<std::size_t>(-1));

  for (long p = 1; p < p_target; ++p) {
    const double edge_mass = t.edge_count() * (alpha - 1.0);
    const double total = edge_mass + vw.total();
    const double x = rng.uniform() * total;
    if (x < edge_mass || vw.total() <= 0.0) {
      // uniform edge, identified by its child vertex 1..n-1
      const std::size_t n = t.parent.size();
      std::size_t idx = static_cast<std::size_t>(rng.uniform() * (n - 1));
      if (idx >= n - 1) idx = n - 2;
      t = t.split_edge(static_cast<int>(idx + 1));
      const int mid = static_cast<int>(t.parent.size()) - 2;
      vw_slot.resize(t.parent.size(), static_cast<std::size_t>(-1));
      vw_slot[mid] = vw.size();
      vw_vertex.push_back(mid);
      vw.push_back(2.0 - alpha);
    } else {
      const double wt = vw.total();
      double y;
      do {
        y = rng.uniform() * wt;
      } while (y >= wt);
      const std::size_t slot = vw.find(y);
      const int v = vw_vertex[slot];
      t = t.attach_at(v);
      vw_slot.resize(t.parent.size(), static_cast<std::size_t>(-1));
      vw.add(slot, 1.0);
    }
  }
  return t;
}

DiscreteTree grow_remy(long p_target, RngStream& rng) {
  return grow_marchal(2.0, p_target, rng);
}

}  // namespace stabletrees
