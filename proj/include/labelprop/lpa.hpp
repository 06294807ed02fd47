#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "labelprop/graph.hpp"
#include "labelprop/hashtable.hpp"

namespace labelprop {

/// How vertices are scheduled and how label updates become visible.
///  - ParallelAsync: multiple workers, in-place updates (default).
///  - Sequential: one worker, ascending id, in-place updates; bit-reproducible.
///  - Synchronous: one worker, candidates computed from a pre-iteration
///    snapshot and applied together at iteration end; reproduces the
///    community-swap oscillation that the mitigations exist to break.
enum class ExecMode { ParallelAsync, Sequential, Synchronous };

/// Width of the hashtable value slots (weights accumulate in float or double).
enum class ValuePrecision { Bits32 = 32, Bits64 = 64 };

struct LpaConfig {
  double tolerance = 0.05;   // stop when delta-N / n drops below this
  int max_iterations = 20;
  int pl_period = 4;         // pick-less every k-th iteration; 0 disables
  int cc_period = 0;         // cross-check every k-th iteration; 0 disables
  ProbeStrategy strategy = ProbeStrategy::QuadraticDouble;
  std::uint32_t switch_degree = 32;  // degree at which the team path takes over
  ValuePrecision precision = ValuePrecision::Bits32;
  ExecMode exec = ExecMode::ParallelAsync;
  int workers = 0;           // 0 = hardware concurrency (parallel mode only)
  std::uint64_t seed = 0;    // echoed in reports; detection itself is deterministic
  bool prune = true;         // skip vertices whose neighborhood did not change
};

struct RunStats {
  int iterations = 0;                          // passes performed
  std::vector<std::uint64_t> delta_n_per_iter; // label changes per pass (net of reverts)
  bool converged = false;                      // early stop on a non-pick-less pass
  int pl_iterations = 0;                       // passes with pick-less active
  std::uint64_t cc_reverts = 0;                // total cross-check reversions
  double elapsed_seconds = 0.0;                // iteration loop only (no I/O, no allocation)
};

struct LpaResult {
  std::vector<VertexId> labels;
  RunStats stats;
};

/// Vertices split by degree, each list in ascending id order. The low list
/// (degree < switch_degree) is handled one vertex per worker with unshared
/// table operations; the high list is handled by a cooperating worker team
/// with shared (atomic) table operations.
struct DegreePartition {
  std::vector<VertexId> low;
  std::vector<VertexId> high;
};

DegreePartition partition_by_degree(const CsrGraph& g, std::uint32_t switch_degree);

/// Validate label changes made since `prev` was captured: a change to c* is
/// good iff labels[c*] == c* (the target community's eponymous vertex still
/// carries it). Bad changes revert to prev[i], but only for i > c* so that
/// at most one side of a swapped pair reverts; the write uses
/// compare-and-swap with expected value c*. A revert mutates the labeling
/// after the pass already ran, so the reverted vertex and its neighbors are
/// marked unprocessed in `flags` — otherwise pruned passes would never
/// revisit them. Returns the number of reverts.
std::uint64_t cross_check(const CsrGraph& g, std::span<VertexId> labels,
                          std::span<const VertexId> prev, std::span<std::uint8_t> flags);

/// Run label propagation on g and return the final labeling plus run
/// statistics. Labels start as vertex ids; every final label is therefore
/// one of the original ids. Each pass moves vertices to the neighbor label
/// with the greatest total interconnecting weight (ties to the smallest
/// label); a pass with pick-less active only allows moves to strictly
/// smaller labels. The run stops early when a non-pick-less pass changes
/// fewer than tolerance * n vertices, or after max_iterations passes.
/// Throws ValidationError on an empty graph or invalid config, and
/// InternalError if a hashtable insertion fails (a capacity bug).
LpaResult lpa(const CsrGraph& g, const LpaConfig& config);

namespace detail {

/// Clear vertex i's table region, accumulate its neighbor labels (skipping
/// self-loops), and return the strongest label, or nullopt when every
/// neighbor is a self-loop. `label_of(j)` supplies the label read; passing
/// an atomic reader makes this safe under concurrent in-place updates.
template <typename W, typename LabelFn>
std::optional<std::uint32_t> scan_candidate(const CsrGraph& g, VertexId i, HashArena<W>& arena,
                                            ProbeStrategy strategy, bool shared,
                                            LabelFn&& label_of) {
  const TableGeometry geo = geometry_for(g, i);
  ht_clear(arena, geo);
  auto nbrs = g.neighbors(i);
  auto ws = g.edge_weights(i);
  for (std::size_t p = 0; p < nbrs.size(); ++p) {
    const VertexId j = nbrs[p];
    if (j == i) continue;
    if (ht_accumulate(arena, geo, strategy, label_of(j), static_cast<W>(ws[p]), shared) ==
        AccumulateStatus::Failed)
      throw InternalError("hashtable insertion failed at vertex " + std::to_string(i) +
                          " (capacity invariant violated)");
  }
  auto best = ht_max_key(arena, geo);
  if (!best) return std::nullopt;
  return best->first;
}

}  // namespace detail

/// One sequential pass over all vertices in ascending id order with
/// in-place updates: the single-worker form of the per-iteration step,
/// exposed for direct use in tests and compositions. Scans vertices whose
/// flag is 0, marks each processed at scan start, applies the move rule
/// (pick-less restricts to strictly smaller labels), and marks all
/// neighbors of a changed vertex unprocessed. Vertices of degree >=
/// switch_degree use shared table operations, the rest unshared. Returns
/// the number of label changes.
template <typename W>
std::uint64_t lpa_move(const CsrGraph& g, std::span<VertexId> labels, std::span<std::uint8_t> flags,
                       HashArena<W>& arena, bool pick_less, ProbeStrategy strategy,
                       std::uint32_t switch_degree) {
  std::uint64_t dn = 0;
  const std::uint32_t n = g.order();
  for (VertexId i = 0; i < n; ++i) {
    if (flags[i]) continue;
    flags[i] = 1;
    if (g.degree(i) == 0) continue;
    const bool shared = g.degree(i) >= switch_degree;
    auto cand = detail::scan_candidate(g, i, arena, strategy, shared,
                                       [&](VertexId j) { return labels[j]; });
    if (!cand) continue;
    const std::uint32_t c_star = *cand;
    const bool allowed = pick_less ? (c_star < labels[i]) : (c_star != labels[i]);
    if (!allowed) continue;
    labels[i] = c_star;
    ++dn;
    for (VertexId j : g.neighbors(i)) flags[j] = 0;
  }
  return dn;
}

inline const char* to_string(ExecMode m) {
  switch (m) {
    case ExecMode::ParallelAsync: return "parallel";
    case ExecMode::Sequential: return "sequential";
    case ExecMode::Synchronous: return "synchronous";
  }
  return "?";
}

inline std::optional<ExecMode> parse_exec_mode(std::string_view s) {
  if (s == "parallel") return ExecMode::ParallelAsync;
  if (s == "sequential") return ExecMode::Sequential;
  if (s == "synchronous") return ExecMode::Synchronous;
  return std::nullopt;
}

}  // namespace labelprop
