#include "labelprop/quality.hpp"

#include <string>

namespace labelprop {

namespace {

void check_labels(const CsrGraph& g, std::span<const VertexId> labels) {
  if (labels.size() != g.order())
    throw ValidationError("labeling has " + std::to_string(labels.size()) + " entries for " +
                          std::to_string(g.order()) + " vertices");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= g.order())
      throw ValidationError("label " + std::to_string(labels[i]) + " of vertex " +
                            std::to_string(i) + " is out of range");
}

}  // namespace

double modularity(const CsrGraph& g, std::span<const VertexId> labels) {
  check_labels(g, labels);
  const double two_m = g.total_weight_2m();
  if (two_m <= 0.0) throw ValidationError("modularity is undefined on a graph without edges");

  const std::uint32_t n = g.order();
  std::vector<double> sigma(n, 0.0);      // intra-community stored weight
  std::vector<double> big_sigma(n, 0.0);  // community total degree weight
  for (VertexId i = 0; i < n; ++i) {
    const VertexId ci = labels[i];
    auto nbrs = g.neighbors(i);
    auto ws = g.edge_weights(i);
    double ki = 0.0;
    for (std::size_t p = 0; p < nbrs.size(); ++p) {
      const double w = static_cast<double>(ws[p]);
      ki += w;
      if (labels[nbrs[p]] == ci) sigma[ci] += w;
    }
    big_sigma[ci] += ki;
  }

  double q = 0.0;
  for (std::uint32_t c = 0; c < n; ++c) {
    if (big_sigma[c] == 0.0 && sigma[c] == 0.0) continue;
    const double frac = big_sigma[c] / two_m;
    q += sigma[c] / two_m - frac * frac;
  }
  return q;
}

double delta_modularity(double m, double ki, double ki_to_c, double ki_to_d, double sigma_c,
                        double sigma_d) {
  return (ki_to_c - ki_to_d) / m - ki * (ki + sigma_c - sigma_d) / (2.0 * m * m);
}

CommunityStats community_stats(const CsrGraph& g, std::span<const VertexId> labels) {
  check_labels(g, labels);
  const std::uint32_t n = g.order();
  CommunityStats stats;
  std::unordered_map<VertexId, std::uint64_t> sizes;
  for (VertexId i = 0; i < n; ++i) {
    const VertexId ci = labels[i];
    ++sizes[ci];
    auto nbrs = g.neighbors(i);
    auto ws = g.edge_weights(i);
    double ki = 0.0;
    for (std::size_t p = 0; p < nbrs.size(); ++p) {
      const double w = static_cast<double>(ws[p]);
      ki += w;
      if (labels[nbrs[p]] == ci) stats.sigma[ci] += w;
    }
    stats.big_sigma[ci] += ki;
    stats.sigma.try_emplace(ci, 0.0);  // ensure presence even with no intra edges
  }
  stats.count = sizes.size();
  for (const auto& [c, sz] : sizes) ++stats.size_histogram[sz];
  return stats;
}

}  // namespace labelprop
