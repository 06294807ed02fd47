#include "labelprop/lpa.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <mutex>
#include <numeric>
#include <thread>

namespace labelprop {

namespace {

// Reusable rendezvous for a fixed team. Built on mutex + condition variable
// rather than std::atomic waiting: simple to reason about, immune to the
// lost-wakeup behavior observed in futex-based barrier implementations under
// oversubscription, and cheap at the team sizes used here.
class CyclicBarrier {
 public:
  explicit CyclicBarrier(int parties) : parties_(parties) {}

  void arrive_and_wait() {
    std::unique_lock lk(m_);
    const std::uint64_t phase = phase_;
    if (++arrived_ == parties_) {
      arrived_ = 0;
      ++phase_;
      cv_.notify_all();
      return;
    }
    cv_.wait(lk, [&] { return phase_ != phase; });
  }

 private:
  const int parties_;
  int arrived_ = 0;
  std::uint64_t phase_ = 0;
  std::mutex m_;
  std::condition_variable cv_;
};

// Sequentially-consistent helpers for state shared between workers. The
// flag/label protocol needs seq_cst on both sides: a worker marks a vertex
// processed before reading neighbor labels, and a changing worker writes
// its label before marking neighbors unprocessed; anything weaker allows a
// stale label read whose vertex is never re-examined.
inline std::uint32_t load_label(const VertexId& l) {
  return std::atomic_ref<VertexId>(const_cast<VertexId&>(l)).load(std::memory_order_seq_cst);
}
inline void store_label(VertexId& l, VertexId v) {
  std::atomic_ref<VertexId>(l).store(v, std::memory_order_seq_cst);
}
inline std::uint8_t load_flag(const std::uint8_t& f) {
  return std::atomic_ref<std::uint8_t>(const_cast<std::uint8_t&>(f)).load(std::memory_order_seq_cst);
}
inline void store_flag(std::uint8_t& f, std::uint8_t v) {
  std::atomic_ref<std::uint8_t>(f).store(v, std::memory_order_seq_cst);
}

struct IterationOutcome {
  std::uint64_t delta_n = 0;
};

// One synchronous pass: candidates are computed from the pre-pass snapshot
// and applied together at the end, so every vertex sees the same frozen
// neighborhood. This mode exists to reproduce (and then break) the
// community-swap oscillation.
template <typename W>
std::uint64_t sync_move(const CsrGraph& g, std::vector<VertexId>& labels,
                        std::vector<std::uint8_t>& flags, HashArena<W>& arena, bool pick_less,
                        ProbeStrategy strategy, std::uint32_t switch_degree,
                        std::vector<VertexId>& snapshot,
                        std::vector<std::pair<VertexId, VertexId>>& staged) {
  snapshot = labels;
  staged.clear();
  const std::uint32_t n = g.order();
  for (VertexId i = 0; i < n; ++i) {
    if (flags[i]) continue;
    flags[i] = 1;
    if (g.degree(i) == 0) continue;
    const bool shared = g.degree(i) >= switch_degree;
    auto cand = detail::scan_candidate(g, i, arena, strategy, shared,
                                       [&](VertexId j) { return snapshot[j]; });
    if (!cand) continue;
    const std::uint32_t c_star = *cand;
    const bool allowed = pick_less ? (c_star < snapshot[i]) : (c_star != snapshot[i]);
    if (!allowed) continue;
    staged.emplace_back(i, c_star);
  }
  for (auto [i, c] : staged) labels[i] = c;
  // Wake-ups happen only after the joint application: every decision in this
  // pass reads the frozen snapshot, so a change cannot be "seen" by a vertex
  // scanned later in the same pass — marking inline would let that vertex
  // consume the wake-up and then be skipped next pass with stale inputs.
  for (const auto& change : staged)
    for (VertexId j : g.neighbors(change.first)) flags[j] = 0;
  return staged.size();
}

// Per-worker slice [begin, end) of a range of length `total`.
inline std::pair<std::uint64_t, std::uint64_t> slice(std::uint64_t total, int worker, int workers) {
  const std::uint64_t lo = total * static_cast<std::uint64_t>(worker) / workers;
  const std::uint64_t hi = total * static_cast<std::uint64_t>(worker + 1) / workers;
  return {lo, hi};
}

// Shared coordination block for the team (high-degree) phase.
struct alignas(64) TeamState {
  bool skip = false;
  bool changed = false;
  std::uint32_t c_star = 0;
};

// One parallel-asynchronous pass. Low-degree vertices are claimed in chunks
// and processed end-to-end by one worker each (unshared table operations);
// then the whole pool walks the high-degree list together, splitting each
// vertex's clear/accumulate/reduce over the team (shared table operations)
// with barriers between phases.
template <typename W>
std::uint64_t parallel_move(const CsrGraph& g, std::vector<VertexId>& labels,
                            std::vector<std::uint8_t>& flags, HashArena<W>& arena, bool pick_less,
                            ProbeStrategy strategy, const DegreePartition& part, int workers) {
  std::atomic<std::uint64_t> delta_n{0};
  std::atomic<std::uint64_t> next_low{0};
  std::atomic<bool> failed{false};
  CyclicBarrier gate(workers);
  TeamState team;
  std::vector<std::uint32_t> best_keys(static_cast<std::size_t>(workers), kEmptyKey);
  std::vector<W> best_vals(static_cast<std::size_t>(workers), W(0));
  constexpr std::uint64_t kChunk = 256;

  auto atomic_label = [&](VertexId j) { return load_label(labels[j]); };

  auto work = [&](int wid) {
    std::uint64_t local_dn = 0;

    // Scalar path over the low-degree list.
    for (;;) {
      const std::uint64_t start = next_low.fetch_add(kChunk, std::memory_order_relaxed);
      if (start >= part.low.size()) break;
      const std::uint64_t stop = std::min<std::uint64_t>(start + kChunk, part.low.size());
      for (std::uint64_t q = start; q < stop; ++q) {
        const VertexId i = part.low[q];
        if (load_flag(flags[i])) continue;
        store_flag(flags[i], 1);
        if (g.degree(i) == 0) continue;
        std::optional<std::uint32_t> cand;
        try {
          cand = detail::scan_candidate(g, i, arena, strategy, /*shared=*/false, atomic_label);
        } catch (const InternalError&) {
          failed.store(true, std::memory_order_relaxed);
          continue;
        }
        if (!cand) continue;
        const std::uint32_t c_star = *cand;
        const std::uint32_t cur = load_label(labels[i]);
        const bool allowed = pick_less ? (c_star < cur) : (c_star != cur);
        if (!allowed) continue;
        store_label(labels[i], c_star);
        ++local_dn;
        for (VertexId j : g.neighbors(i)) store_flag(flags[j], 0);
      }
    }

    gate.arrive_and_wait();

    // Team path over the high-degree list, one vertex at a time.
    for (std::uint64_t q = 0; q < part.high.size(); ++q) {
      const VertexId i = part.high[q];
      if (wid == 0) {
        team.skip = load_flag(flags[i]) != 0;
        if (!team.skip) store_flag(flags[i], 1);
      }
      gate.arrive_and_wait();
      if (team.skip) continue;

      const TableGeometry geo = geometry_for(g, i);
      const auto [slo, shi] = slice(geo.capacity, wid, workers);
      for (std::uint64_t s = geo.slot_offset + slo; s < geo.slot_offset + shi; ++s) {
        arena.keys[s] = kEmptyKey;
        arena.values[s] = W(0);
      }
      gate.arrive_and_wait();

      auto nbrs = g.neighbors(i);
      auto ws = g.edge_weights(i);
      const auto [nlo, nhi] = slice(nbrs.size(), wid, workers);
      for (std::uint64_t p = nlo; p < nhi; ++p) {
        const VertexId j = nbrs[p];
        if (j == i) continue;
        if (ht_accumulate(arena, geo, strategy, atomic_label(j), static_cast<W>(ws[p]),
                          /*shared=*/true) == AccumulateStatus::Failed)
          failed.store(true, std::memory_order_relaxed);
      }
      gate.arrive_and_wait();

      std::uint32_t bk = kEmptyKey;
      W bv = W(0);
      for (std::uint64_t s = geo.slot_offset + slo; s < geo.slot_offset + shi; ++s) {
        const std::uint32_t k = arena.keys[s];
        if (k != kEmptyKey) ht_better(k, arena.values[s], bk, bv);
      }
      best_keys[wid] = bk;
      best_vals[wid] = bv;
      gate.arrive_and_wait();

      if (wid == 0) {
        std::uint32_t ck = kEmptyKey;
        W cv = W(0);
        for (int w = 0; w < workers; ++w)
          if (best_keys[w] != kEmptyKey) ht_better(best_keys[w], best_vals[w], ck, cv);
        team.changed = false;
        if (ck != kEmptyKey) {
          const std::uint32_t cur = load_label(labels[i]);
          const bool allowed = pick_less ? (ck < cur) : (ck != cur);
          if (allowed) {
            store_label(labels[i], ck);
            ++local_dn;
            team.changed = true;
          }
        }
      }
      gate.arrive_and_wait();

      if (team.changed)
        for (std::uint64_t p = nlo; p < nhi; ++p) store_flag(flags[nbrs[p]], 0);
      gate.arrive_and_wait();
    }

    delta_n.fetch_add(local_dn, std::memory_order_relaxed);
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
  }
  if (failed.load()) throw InternalError("hashtable insertion failed (capacity invariant violated)");
  return delta_n.load();
}

template <typename W>
LpaResult run_engine(const CsrGraph& g, const LpaConfig& cfg) {
  const std::uint32_t n = g.order();
  LpaResult result;
  result.labels.resize(n);
  std::iota(result.labels.begin(), result.labels.end(), 0u);
  std::vector<std::uint8_t> flags(n, 0);
  for (VertexId i = 0; i < n; ++i)
    if (g.degree(i) == 0) flags[i] = 1;  // isolated vertices are never examined

  HashArena<W> arena = HashArena<W>::for_graph(g);  // any bad_alloc surfaces here
  const DegreePartition part = partition_by_degree(g, cfg.switch_degree);

  int workers = 1;
  if (cfg.exec == ExecMode::ParallelAsync) {
    workers = cfg.workers > 0 ? cfg.workers
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }

  std::vector<VertexId> prev;
  std::vector<VertexId> snapshot;
  std::vector<std::pair<VertexId, VertexId>> staged;
  RunStats& stats = result.stats;

  const auto t0 = std::chrono::steady_clock::now();
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const bool pick_less = cfg.pl_period > 0 && iter % cfg.pl_period == 0;
    const bool check = cfg.cc_period > 0 && iter % cfg.cc_period == 0;
    if (check) prev = result.labels;
    // Leaving a pick-less pass relaxes the move rule (c* < own widens to
    // c* != own), so a vertex left alone under the strict rule may move now:
    // its processed flag is stale and everything must be rescanned. Entering
    // pick-less needs no such reset — a vertex with c* == own stays put under
    // both rules.
    const bool was_pick_less =
        iter > 0 && cfg.pl_period > 0 && (iter - 1) % cfg.pl_period == 0;
    if (!cfg.prune || (was_pick_less && !pick_less))
      std::fill(flags.begin(), flags.end(), std::uint8_t(0));

    std::uint64_t dn = 0;
    switch (cfg.exec) {
      case ExecMode::Sequential:
        dn = lpa_move(g, std::span<VertexId>(result.labels), std::span<std::uint8_t>(flags), arena,
                      pick_less, cfg.strategy, cfg.switch_degree);
        break;
      case ExecMode::Synchronous:
        dn = sync_move(g, result.labels, flags, arena, pick_less, cfg.strategy, cfg.switch_degree,
                       snapshot, staged);
        break;
      case ExecMode::ParallelAsync:
        dn = parallel_move(g, result.labels, flags, arena, pick_less, cfg.strategy, part, workers);
        break;
    }
    if (check) {
      const std::uint64_t reverted =
          cross_check(g, result.labels, prev, std::span<std::uint8_t>(flags));
      stats.cc_reverts += reverted;
      dn -= reverted;  // a reverted vertex counts as unchanged
    }
    stats.delta_n_per_iter.push_back(dn);
    if (pick_less) ++stats.pl_iterations;
    if (!pick_less && static_cast<double>(dn) / n < cfg.tolerance) {
      stats.converged = true;
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  stats.iterations = static_cast<int>(stats.delta_n_per_iter.size());
  stats.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

void validate_config(const CsrGraph& g, const LpaConfig& cfg) {
  if (g.order() == 0) throw ValidationError("label propagation requires a non-empty graph");
  if (!(cfg.tolerance > 0.0 && cfg.tolerance <= 1.0))
    throw ValidationError("tolerance must lie in (0, 1]");
  if (cfg.max_iterations < 1) throw ValidationError("max-iterations must be >= 1");
  if (cfg.pl_period < 0) throw ValidationError("pl-period must be >= 0");
  if (cfg.cc_period < 0) throw ValidationError("cc-period must be >= 0");
  if (cfg.switch_degree < 2) throw ValidationError("switch-degree must be >= 2");
  if (cfg.workers < 0) throw ValidationError("workers must be >= 0");
}

}  // namespace

DegreePartition partition_by_degree(const CsrGraph& g, std::uint32_t switch_degree) {
  if (switch_degree < 2) throw ValidationError("switch-degree must be >= 2");
  DegreePartition part;
  for (VertexId i = 0; i < g.order(); ++i)
    (g.degree(i) < switch_degree ? part.low : part.high).push_back(i);
  return part;
}

std::uint64_t cross_check(const CsrGraph& g, std::span<VertexId> labels,
                          std::span<const VertexId> prev, std::span<std::uint8_t> flags) {
  if (labels.size() != g.order() || prev.size() != g.order() || flags.size() != g.order())
    throw ValidationError("cross-check label arrays must cover every vertex");
  std::uint64_t reverted = 0;
  const std::uint32_t n = g.order();
  for (VertexId i = 0; i < n; ++i) {
    const std::uint32_t c_star = load_label(labels[i]);
    if (c_star == prev[i]) continue;
    if (load_label(labels[c_star]) == c_star) continue;  // good change: target kept its label
    if (i <= c_star) continue;  // revert only one side of a swapped pair
    std::uint32_t expected = c_star;
    if (std::atomic_ref<VertexId>(labels[i]).compare_exchange_strong(expected, prev[i],
                                                                     std::memory_order_seq_cst)) {
      ++reverted;
      // The revert is a label mutation the finished pass never saw: the vertex
      // and everyone reading its label must be revisited by pruned passes.
      store_flag(flags[i], 0);
      for (VertexId j : g.neighbors(i)) store_flag(flags[j], 0);
    }
  }
  return reverted;
}

LpaResult lpa(const CsrGraph& g, const LpaConfig& config) {
  validate_config(g, config);
  return config.precision == ValuePrecision::Bits64 ? run_engine<double>(g, config)
                                                    : run_engine<float>(g, config);
}

}  // namespace labelprop
