#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "labelprop/generators.hpp"
#include "labelprop/quality.hpp"

using namespace labelprop;

namespace {

std::set<std::pair<VertexId, VertexId>> pair_set(const EdgeList& el) {
  std::set<std::pair<VertexId, VertexId>> pairs;
  for (const auto& e : el.edges) pairs.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  return pairs;
}

}  // namespace

TEST_CASE("star graph shape") {
  const EdgeList el = star_graph(5);
  CHECK_EQ(el.n_declared, std::optional<std::uint64_t>{6});
  CHECK_EQ(el.edges.size(), 5);
  const CsrGraph g = build_csr(el, true);
  CHECK_EQ(g.degree(0), 5);
  for (VertexId i = 1; i <= 5; ++i) CHECK_EQ(g.degree(i), 1);
}

TEST_CASE("ring of cliques: intra edges, bridges, ground truth") {
  const PlantedGraph pg = ring_of_cliques(3, 4);
  CHECK_EQ(pg.edges.edges.size(), 3 * 6 + 3);  // C(4,2) per clique + 3 bridges
  CHECK_EQ(pg.ground_truth,
           std::vector<VertexId>{0, 0, 0, 0, 4, 4, 4, 4, 8, 8, 8, 8});
  const auto pairs = pair_set(pg.edges);
  CHECK(pairs.count({3, 4}));   // clique 0 -> clique 1
  CHECK(pairs.count({7, 8}));   // clique 1 -> clique 2
  CHECK(pairs.count({0, 11}));  // clique 2 closes the ring
  const CsrGraph g = build_csr(pg.edges, true);
  CHECK_EQ(g.order(), 12);
  CHECK_EQ(g.degree(0), 4);  // 3 intra + ring-closing bridge
  CHECK_EQ(g.degree(1), 3);
  // The planted labeling is a strong partition of this graph.
  CHECK_GT(modularity(g, pg.ground_truth), 0.5);
}

TEST_CASE("ring of two cliques gets a single bridge, no ring closure") {
  const PlantedGraph pg = ring_of_cliques(2, 3);
  CHECK_EQ(pg.edges.edges.size(), 2 * 3 + 1);
  const auto pairs = pair_set(pg.edges);
  CHECK(pairs.count({2, 3}));
  CHECK_FALSE(pairs.count({0, 5}));
}

TEST_CASE("planted partition: blocks, remainder spread, ground-truth labels") {
  const PlantedGraph pg = planted_partition(10, 3, 1.0, 0.0, 1);
  CHECK_EQ(pg.ground_truth, std::vector<VertexId>{0, 0, 0, 0, 4, 4, 4, 7, 7, 7});
  // p_in = 1 gives complete blocks, p_out = 0 gives nothing else.
  CHECK_EQ(pg.edges.edges.size(), 6 + 3 + 3);
  for (const auto& e : pg.edges.edges) {
    CHECK_EQ(pg.ground_truth[e.u], pg.ground_truth[e.v]);
    CHECK_EQ(e.w, 1.0);
  }
}

TEST_CASE("planted partition: blocks of one can only produce cross edges") {
  const PlantedGraph pg = planted_partition(10, 10, 0.7, 1.0, 3);
  CHECK_EQ(pg.edges.edges.size(), 45);  // complete graph across singleton blocks
}

TEST_CASE("planted partition: deterministic per seed, distinct across seeds") {
  const PlantedGraph a = planted_partition(300, 5, 0.1, 0.01, 42);
  const PlantedGraph b = planted_partition(300, 5, 0.1, 0.01, 42);
  const PlantedGraph c = planted_partition(300, 5, 0.1, 0.01, 43);
  REQUIRE_EQ(a.edges.edges.size(), b.edges.edges.size());
  for (std::size_t i = 0; i < a.edges.edges.size(); ++i) {
    CHECK_EQ(a.edges.edges[i].u, b.edges.edges[i].u);
    CHECK_EQ(a.edges.edges[i].v, b.edges.edges[i].v);
  }
  CHECK_NE(pair_set(a.edges), pair_set(c.edges));
}

TEST_CASE("planted partition: no duplicates, no loops, ids in range") {
  const PlantedGraph pg = planted_partition(500, 7, 0.05, 0.003, 9);
  const auto pairs = pair_set(pg.edges);
  CHECK_EQ(pairs.size(), pg.edges.edges.size());  // sampling cannot repeat a pair
  for (const auto& e : pg.edges.edges) {
    CHECK_NE(e.u, e.v);
    CHECK_LT(e.u, 500);
    CHECK_LT(e.v, 500);
  }
}

TEST_CASE("planted partition: edge counts track the densities") {
  const std::uint32_t n = 2000, k = 4, bs = 500;
  const double p_in = 0.02, p_out = 0.002;
  const PlantedGraph pg = planted_partition(n, k, p_in, p_out, 77);
  std::uint64_t intra = 0, cross = 0;
  for (const auto& e : pg.edges.edges)
    (pg.ground_truth[e.u] == pg.ground_truth[e.v] ? intra : cross) += 1;

  const double intra_pairs = k * (bs * (bs - 1.0) / 2.0);
  const double cross_pairs = (n * (n - 1.0) / 2.0) - intra_pairs;
  const double mu_i = intra_pairs * p_in, sd_i = std::sqrt(intra_pairs * p_in * (1 - p_in));
  const double mu_c = cross_pairs * p_out, sd_c = std::sqrt(cross_pairs * p_out * (1 - p_out));
  CHECK_MESSAGE(std::abs(intra - mu_i) < 5 * sd_i, intra << " intra vs mean " << mu_i);
  CHECK_MESSAGE(std::abs(cross - mu_c) < 5 * sd_c, cross << " cross vs mean " << mu_c);
}

TEST_CASE("planted partition rejects impossible block counts") {
  CHECK_THROWS_AS(planted_partition(5, 0, 0.1, 0.1, 1), ValidationError);
  CHECK_THROWS_AS(planted_partition(5, 6, 0.1, 0.1, 1), ValidationError);
}
