#include "labelprop/generators.hpp"

#include <algorithm>
#include <random>

namespace labelprop {

namespace {

// Visit each index of [0, space) independently with probability p, in
// ascending order, skipping ahead by geometrically distributed gaps.
template <typename Fn>
void sample_space(std::uint64_t space, double p, std::mt19937_64& rng, Fn&& emit) {
  if (space == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < space; ++i) emit(i);
    return;
  }
  std::geometric_distribution<std::uint64_t> gap(p);
  std::uint64_t pos = gap(rng);
  while (pos < space) {
    emit(pos);
    pos += 1 + gap(rng);
  }
}

// Ascending linear index -> (row, col) over the strict upper triangle of a
// size x size block; indices must be fed in ascending order.
struct TriangleWalker {
  std::uint64_t size;
  std::uint64_t row = 0;
  std::uint64_t row_base = 0;

  std::pair<std::uint64_t, std::uint64_t> unrank(std::uint64_t idx) {
    while (idx >= row_base + (size - 1 - row)) {
      row_base += size - 1 - row;
      ++row;
    }
    return {row, row + 1 + (idx - row_base)};
  }
};

}  // namespace

PlantedGraph planted_partition(std::uint32_t n, std::uint32_t communities, double p_in,
                               double p_out, std::uint64_t seed) {
  if (communities == 0 || communities > n)
    throw ValidationError("planted partition needs 1 <= communities <= n");
  PlantedGraph out;
  out.edges.n_declared = n;
  out.ground_truth.resize(n);

  const std::uint32_t base = n / communities;
  const std::uint32_t rem = n % communities;
  auto block_start = [&](std::uint32_t b) { return b * base + std::min(b, rem); };
  auto block_size = [&](std::uint32_t b) { return base + (b < rem ? 1u : 0u); };
  for (std::uint32_t b = 0; b < communities; ++b) {
    const std::uint32_t s = block_start(b);
    for (std::uint32_t v = s; v < s + block_size(b); ++v) out.ground_truth[v] = s;
  }

  std::mt19937_64 rng(seed);

  // Intra-community pairs.
  for (std::uint32_t b = 0; b < communities; ++b) {
    const std::uint64_t sz = block_size(b);
    const std::uint32_t s = block_start(b);
    TriangleWalker walk{sz};
    sample_space(sz * (sz - 1) / 2, p_in, rng, [&](std::uint64_t idx) {
      auto [a, c] = walk.unrank(idx);
      out.edges.edges.push_back(
          {static_cast<VertexId>(s + a), static_cast<VertexId>(s + c), 1.0});
    });
  }

  // Cross-community pairs, one rectangular space per block pair.
  for (std::uint32_t bi = 0; bi < communities; ++bi) {
    for (std::uint32_t bj = bi + 1; bj < communities; ++bj) {
      const std::uint64_t szj = block_size(bj);
      const std::uint32_t si = block_start(bi), sj = block_start(bj);
      sample_space(block_size(bi) * szj, p_out, rng, [&](std::uint64_t idx) {
        out.edges.edges.push_back({static_cast<VertexId>(si + idx / szj),
                                   static_cast<VertexId>(sj + idx % szj), 1.0});
      });
    }
  }
  return out;
}

PlantedGraph ring_of_cliques(std::uint32_t cliques, std::uint32_t clique_size) {
  if (cliques == 0 || clique_size == 0) throw ValidationError("ring of cliques needs positive sizes");
  PlantedGraph out;
  const std::uint64_t n = static_cast<std::uint64_t>(cliques) * clique_size;
  out.edges.n_declared = n;
  out.ground_truth.resize(n);
  for (std::uint32_t c = 0; c < cliques; ++c) {
    const VertexId s = c * clique_size;
    for (std::uint32_t a = 0; a < clique_size; ++a) {
      out.ground_truth[s + a] = s;
      for (std::uint32_t b = a + 1; b < clique_size; ++b)
        out.edges.edges.push_back({s + a, s + b, 1.0});
    }
  }
  const std::uint32_t bridges = cliques >= 3 ? cliques : cliques - 1;
  for (std::uint32_t c = 0; c < bridges; ++c) {
    const VertexId from = c * clique_size + clique_size - 1;
    const VertexId to = ((c + 1) % cliques) * clique_size;
    if (from != to) out.edges.edges.push_back({from, to, 1.0});
  }
  return out;
}

EdgeList star_graph(std::uint32_t leaves) {
  EdgeList el;
  el.n_declared = leaves + 1ull;
  for (std::uint32_t i = 1; i <= leaves; ++i) el.edges.push_back({0, i, 1.0});
  return el;
}

}  // namespace labelprop
