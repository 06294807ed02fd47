#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "labelprop/graph.hpp"

namespace labelprop {

/// Modularity of a labeling: Q = sum_c [sigma_c/(2m) - (Sigma_c/(2m))^2],
/// where sigma_c counts intra-community stored entries (both directions of
/// every edge, self-loops once) and Sigma_c sums the weighted degrees of
/// the community's members. Accumulation is in 64-bit floats regardless of
/// the engine's value precision. Q lies in [-1/2, 1]. Throws
/// ValidationError on an edgeless graph (m = 0) or a label out of range.
double modularity(const CsrGraph& g, std::span<const VertexId> labels);

/// Closed-form modularity change for moving a vertex from community d to a
/// different community c:
///   dQ = (Ki_to_c - Ki_to_d)/m - Ki*(Ki + Sigma_c - Sigma_d)/(2 m^2)
/// Ki is the vertex's full weighted degree (self-loop once); Ki_to_c and
/// Ki_to_d exclude the self-loop; Sigma are raw totals with the vertex
/// still counted in d and not in c. Not meaningful for c = d.
double delta_modularity(double m, double ki, double ki_to_c, double ki_to_d, double sigma_c,
                        double sigma_d);

/// Per-community aggregates of a labeling.
struct CommunityStats {
  std::uint64_t count = 0;                             // |distinct labels|
  std::map<std::uint64_t, std::uint64_t> size_histogram;  // community size -> how many
  std::unordered_map<VertexId, double> sigma;          // intra weight per community
  std::unordered_map<VertexId, double> big_sigma;      // total degree weight per community
};

CommunityStats community_stats(const CsrGraph& g, std::span<const VertexId> labels);

}  // namespace labelprop
