#pragma once

#include <cstdint>
#include <vector>

#include "labelprop/graph.hpp"

namespace labelprop {

/// A generated graph together with its intended community assignment.
struct PlantedGraph {
  EdgeList edges;
  std::vector<VertexId> ground_truth;
};

/// Planted-partition graph: n vertices in `communities` equal blocks
/// (remainders spread over the first blocks); each intra-block pair is an
/// edge with probability p_in, each cross-block pair with probability
/// p_out; all weights 1. Pair sampling uses geometric gap skipping, so the
/// cost is proportional to the number of edges, not the number of pairs.
/// Deterministic for a given seed.
PlantedGraph planted_partition(std::uint32_t n, std::uint32_t communities, double p_in,
                               double p_out, std::uint64_t seed);

/// `cliques` complete graphs of `clique_size` vertices, consecutive cliques
/// joined by one bridge edge (closing the ring when cliques >= 3).
PlantedGraph ring_of_cliques(std::uint32_t cliques, std::uint32_t clique_size);

/// Star: vertex 0 joined to `leaves` leaves.
EdgeList star_graph(std::uint32_t leaves);

}  // namespace labelprop
