#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabletrees/linebreaking.hpp"
#include "stabletrees/rng.hpp"
#include "stabletrees/shape_law.hpp"

using namespace stabletrees;

TEST_CASE("algorithm names round trip") {
  for (Algorithm a : {Algorithm::I, Algorithm::II, Algorithm::NormalizedI,
                      Algorithm::NormalizedII, Algorithm::Aldous})
    CHECK(algorithm_from_string(algorithm_name(a)) == a);
  CHECK(algorithm_from_string("ii") == Algorithm::II);
  CHECK_THROWS_AS(algorithm_from_string("frilled"), std::invalid_argument);
}

TEST_CASE("config validation") {
  GrowthConfig cfg;
  cfg.p_target = 0;
  CHECK_THROWS_AS(grow(cfg), std::invalid_argument);
  cfg.p_target = 3;
  cfg.alpha = 1.5;
  cfg.algorithm = Algorithm::Aldous;
  CHECK_THROWS_AS(grow(cfg), std::invalid_argument);
  cfg.alpha = 2.0;
  cfg.aldous_intensity = 0.0;
  CHECK_THROWS_AS(grow(cfg), std::invalid_argument);
  cfg.alpha = 0.9;
  CHECK_THROWS_AS(grow(cfg), std::invalid_argument);
}

TEST_CASE("single leaf is one segment of length M_1") {
  GrowthConfig cfg;
  cfg.alpha = 1.5;
  cfg.p_target = 1;
  cfg.n_trunc = 4096;
  cfg.seed = 21;
  const GrowthResult res = grow(cfg);
  CHECK(res.tree.leaf_count() == 1);
  CHECK(res.tree.total_length() == res.m1);
  CHECK(res.m_final == res.m1);
  CHECK(res.trunc_warning);  // 4096 < min_n_trunc
}

TEST_CASE("growth is reproducible and stream-keyed") {
  GrowthConfig cfg;
  cfg.alpha = 1.4;
  cfg.p_target = 36;
  cfg.seed = 99;
  cfg.n_trunc = 2048;
  const GrowthResult a = grow(cfg);
  const GrowthResult b = grow(cfg);
  CHECK(a.tree.labelled_shape() == b.tree.labelled_shape());
  CHECK(a.tree.total_length() == b.tree.total_length());
  CHECK(a.m_final == b.m_final);
  cfg.stream = 1;
  const GrowthResult c = grow(cfg);
  CHECK(a.tree.total_length() != c.tree.total_length());
}

TEST_CASE("structure after growth") {
  for (Algorithm alg : {Algorithm::I, Algorithm::II}) {
    GrowthConfig cfg;
    cfg.alpha = 1.5;
    cfg.p_target = 200;
    cfg.algorithm = alg;
    cfg.seed = 7;
    cfg.n_trunc = 2048;
    const GrowthResult res = grow(cfg);
    res.tree.validate();
    CHECK(res.tree.leaf_count() == 200);
    CHECK(res.m_final > res.m1);
    CHECK(res.tree.total_length() < res.m_final);  // strict: leftovers remain
  }
}

TEST_CASE("snapshots copy the tree at the requested sizes") {
  GrowthConfig cfg;
  cfg.alpha = 1.6;
  cfg.p_target = 50;
  cfg.seed = 3;
  cfg.n_trunc = 2048;
  cfg.snapshots = {10, 25, 50};
  const GrowthResult res = grow(cfg);
  REQUIRE(res.snapshots.size() == 3);
  CHECK(res.snapshots[0].leaf_count() == 10);
  CHECK(res.snapshots[1].leaf_count() == 25);
  CHECK(res.snapshots[2].leaf_count() == 50);
  for (const RTree& s : res.snapshots) s.validate();
  CHECK(res.snapshots[0].total_length() < res.snapshots[1].total_length());
  CHECK(res.snapshots[2].total_length() == res.tree.total_length());
}

TEST_CASE("trace ledgers") {
  GrowthConfig cfg;
  cfg.alpha = 1.7;
  cfg.p_target = 300;
  cfg.algorithm = Algorithm::II;
  cfg.seed = 11;
  cfg.n_trunc = 2048;
  cfg.record_trace = true;
  const GrowthResult res = grow(cfg);
  REQUIRE(res.trace.size() == 300);
  CHECK(res.trace.front().kind == 'i');
  CHECK(res.trace.front().b == 1.0);
  double prev_m = 0.0;
  for (const TraceRow& r : res.trace) {
    CHECK(r.m > prev_m);
    prev_m = r.m;
    CHECK(r.ell <= r.m * (1.0 + 1e-12));
    CHECK(r.branch > 0.0);
    if (r.kind != 'i') {
      CHECK(r.beta > 0.0);
      CHECK(r.beta < 1.0);
      CHECK(r.b > 0.0);
      CHECK(r.b <= 1.0);
      CHECK((r.kind == 'e' || r.kind == 'v'));
    }
    // untaken mass: W_p = M_p - L_p
    CHECK(std::fabs(r.wsum - (r.m - r.ell)) <= 1e-10 * r.m);
    // degree identity: sum (d - 1 - alpha) = p alpha - 1 - |T_p| (alpha - 1)
    const double target =
        r.p * cfg.alpha - 1.0 - r.nonroot * (cfg.alpha - 1.0);
    CHECK(std::fabs(r.degsum - target) <= 1e-10 * (1.0 + std::fabs(target)));
  }
}

TEST_CASE("brownian case stays binary and saturates the chain") {
  GrowthConfig cfg;
  cfg.alpha = 2.0;
  cfg.p_target = 400;
  cfg.seed = 13;
  cfg.record_trace = true;
  const GrowthResult res = grow(cfg);
  res.tree.validate();
  CHECK_FALSE(res.trunc_warning);
  for (const TraceRow& r : res.trace) {
    CHECK(r.kind != 'v');
    CHECK(std::fabs(r.ell - r.m) <= 1e-9 * r.m);  // L_p == M_p
  }
  const auto census = res.tree.degree_census();
  for (std::size_t d = 4; d < census.size(); ++d) CHECK(census[d] == 0);
}

TEST_CASE("normalized variants start from unit total length") {
  for (Algorithm alg : {Algorithm::NormalizedI, Algorithm::NormalizedII}) {
    GrowthConfig cfg;
    cfg.alpha = 1.5;
    cfg.p_target = 64;
    cfg.algorithm = alg;
    cfg.seed = 17;
    const GrowthResult res = grow(cfg);
    CHECK(res.m1 == 1.0);
    CHECK(res.m_final > 1.0);
    CHECK_FALSE(res.trunc_warning);  // no ladder involved
    res.tree.validate();
  }
}

TEST_CASE("aldous construction") {
  GrowthConfig cfg;
  cfg.alpha = 2.0;
  cfg.algorithm = Algorithm::Aldous;
  cfg.aldous_intensity = 0.5;
  cfg.p_target = 128;
  cfg.seed = 19;
  const GrowthResult res = grow(cfg);
  res.tree.validate();
  CHECK(res.tree.leaf_count() == 128);
  CHECK(res.tree.total_length() == doctest::Approx(res.m_final).epsilon(1e-12));
  const auto census = res.tree.degree_census();
  for (std::size_t d = 4; d < census.size(); ++d) CHECK(census[d] == 0);
}

TEST_CASE("discrete growers") {
  RngStream rng(23, 0);
  const DiscreteTree t = grow_marchal(1.5, 120, rng);
  CHECK(t.leaf_count == 120);

  const DiscreteTree small = grow_marchal(1.5, 5, rng);
  const ShapeTable law = enumerate_shape_law(1.5, 5);
  CHECK(law.count(small.shape()) == 1);

  const DiscreteTree binary = grow_remy(200, rng);
  CHECK(binary.leaf_count == 200);
  for (int v = 0; v < (int)binary.parent.size(); ++v)
    CHECK((binary.degree(v) == 1 || binary.degree(v) == 3));
  // p leaves + root + p - 1 branch points
  CHECK(binary.parent.size() == 2 * 200);

  CHECK_THROWS_AS(grow_marchal(2.5, 5, rng), std::invalid_argument);
  CHECK_THROWS_AS(grow_marchal(1.5, 0, rng), std::invalid_argument);
}

TEST_CASE("rtree and discrete shape encodings agree") {
  // convert a discrete tree to an RTree with unit lengths and compare the
  // canonical encodings produced by the two independent implementations
  RngStream rng(29, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const DiscreteTree t = grow_marchal(1.4, 12, rng);
    const std::size_t n = t.parent.size();
    std::vector<std::size_t> parent(n, 0);
    std::vector<double> length(n, 1.0);
    std::vector<std::size_t> leaf_order(t.leaf_count, 0);
    for (std::size_t v = 1; v < n; ++v) {
      parent[v] = static_cast<std::size_t>(t.parent[v]);
      if (t.label[v] > 0) leaf_order[t.label[v] - 1] = v;
    }
    const RTree r = RTree::from_parts(parent, length, leaf_order, nullptr);
    CHECK(r.shape() == t.shape());
    CHECK(r.labelled_shape() == t.labelled_shape());
  }
}
