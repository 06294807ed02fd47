#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "labelprop/graph.hpp"

namespace labelprop {

/// Sentinel for an unoccupied key slot. Valid labels are < 2^32 - 1.
inline constexpr std::uint32_t kEmptyKey = 0xFFFFFFFFu;

/// Collision policies for the open-addressing tables. All strategies start
/// probing at slot (key mod p1); they differ in how the probe index
/// advances after a collision:
///   Linear           i += 1
///   Quadratic        i += step, step doubles each collision (initial 1)
///   DoubleHash       i += max(1, key mod p2), fixed
///   QuadraticDouble  i += step, then step = 2*step + (key mod p2)
enum class ProbeStrategy { Linear, Quadratic, DoubleHash, QuadraticDouble };

/// Geometry of one vertex's table inside the flat arena.
///
/// A vertex of degree D owns the half-open slot range
/// [2*offset, 2*offset + 2*D); of those, only the first `capacity` slots
/// (p1 = nextPow2(D) - 1, strictly greater next power of two, so
/// D <= p1 <= 2D - 1) are ever addressed. p2 = 2*(p1 + 1) - 1 is the
/// second-hash modulus; neither needs to be prime.
struct TableGeometry {
  std::uint64_t slot_offset = 0;  // 2 * O_i
  std::uint64_t capacity = 0;     // p1
  std::uint64_t step_mod = 0;     // p2
};

/// Geometry for vertex i of the graph. Requires degree(i) >= 1.
inline TableGeometry geometry_for(const CsrGraph& g, VertexId i) {
  const std::uint64_t d = g.degree(i);
  if (d == 0) throw ValidationError("no hashtable region for isolated vertex " + std::to_string(i));
  const std::uint64_t p1 = std::bit_ceil(d + 1) - 1;
  return {2 * g.offset(i), p1, 2 * (p1 + 1) - 1};
}

/// Two flat buffers of 2*m2 slots each, carved into per-vertex regions by
/// TableGeometry. Keys hold labels or kEmptyKey; values accumulate weights
/// in W (float or double). No per-iteration reallocation ever happens:
/// regions are wiped in place via ht_clear.
template <typename W>
struct HashArena {
  std::vector<std::uint32_t> keys;
  std::vector<W> values;

  explicit HashArena(std::uint64_t slots) : keys(slots, kEmptyKey), values(slots, W(0)) {}

  static HashArena for_graph(const CsrGraph& g) { return HashArena(2 * g.directed_size()); }
};

enum class AccumulateStatus { Done, Failed };

namespace detail {

template <typename T>
inline T atomic_load(const T& ref) {
  return std::atomic_ref<T>(const_cast<T&>(ref)).load(std::memory_order_relaxed);
}

template <typename T>
inline void atomic_fetch_add(T& ref, T v) {
  std::atomic_ref<T>(ref).fetch_add(v, std::memory_order_relaxed);
}

inline bool atomic_claim(std::uint32_t& slot, std::uint32_t key, std::uint32_t& observed) {
  observed = kEmptyKey;
  return std::atomic_ref<std::uint32_t>(slot).compare_exchange_strong(
      observed, key, std::memory_order_relaxed, std::memory_order_relaxed);
}

}  // namespace detail

/// Insert (key, value) into the region described by `geo`, accumulating the
/// value if the key is already present. At most 4*p1 probes are attempted;
/// the strategy's advance rule applies for the first 2*p1 of them, after
/// which the step degrades to +1 so the tail sweep visits every slot (the
/// doubling-style advances are not full-cycle, and without the sweep a
/// legal workload of up to p1 distinct keys could fail spuriously).
///
/// `shared` selects lock-free claims (CAS on the key slot, atomic add on
/// the value slot) for tables operated by several workers at once; the
/// unshared path uses plain reads and writes and likewise accumulates.
/// Returns Failed only if the probe budget is exhausted, which cannot
/// happen while the number of distinct keys between clears stays <= p1.
template <typename W>
AccumulateStatus ht_accumulate(HashArena<W>& arena, const TableGeometry& geo,
                               ProbeStrategy strategy, std::uint32_t key, W value, bool shared) {
  const std::uint64_t p1 = geo.capacity;
  const std::uint64_t p2 = geo.step_mod;
  const std::uint64_t max_retries = 4 * p1;
  const std::uint64_t strategy_budget = 2 * p1;
  const std::uint64_t khash = key % p2;

  std::uint64_t idx = key;
  std::uint64_t step = (strategy == ProbeStrategy::DoubleHash) ? (khash == 0 ? 1 : khash) : 1;

  for (std::uint64_t t = 0; t < max_retries; ++t) {
    const std::uint64_t s = geo.slot_offset + idx % p1;
    if (shared) {
      std::uint32_t cur = detail::atomic_load(arena.keys[s]);
      if (cur == key || cur == kEmptyKey) {
        std::uint32_t observed;
        if (detail::atomic_claim(arena.keys[s], key, observed) || observed == key) {
          detail::atomic_fetch_add(arena.values[s], value);
          return AccumulateStatus::Done;
        }
      }
    } else {
      const std::uint32_t cur = arena.keys[s];
      if (cur == key || cur == kEmptyKey) {
        arena.keys[s] = key;
        arena.values[s] += value;
        return AccumulateStatus::Done;
      }
    }
    if (t + 1 >= strategy_budget) {
      idx += 1;  // completeness sweep
      continue;
    }
    switch (strategy) {
      case ProbeStrategy::Linear:
        idx += 1;
        break;
      case ProbeStrategy::Quadratic:
        idx += step;
        step *= 2;
        break;
      case ProbeStrategy::DoubleHash:
        idx += step;
        break;
      case ProbeStrategy::QuadraticDouble:
        idx += step;
        step = 2 * step + khash;
        break;
    }
  }
  return AccumulateStatus::Failed;
}

/// Wipe the p1 addressable slots of a region back to (kEmptyKey, 0).
/// Callers must ensure no accumulate on the same region is in flight.
template <typename W>
void ht_clear(HashArena<W>& arena, const TableGeometry& geo) {
  for (std::uint64_t s = geo.slot_offset; s < geo.slot_offset + geo.capacity; ++s) {
    arena.keys[s] = kEmptyKey;
    arena.values[s] = W(0);
  }
}

/// Combine two (key, value) candidates: higher value wins, ties go to the
/// smaller key. Folding any slot order through this is order-independent.
template <typename W>
inline void ht_better(std::uint32_t key, W value, std::uint32_t& best_key, W& best_value) {
  if (best_key == kEmptyKey || value > best_value || (value == best_value && key < best_key)) {
    best_key = key;
    best_value = value;
  }
}

/// The occupied slot with the greatest accumulated value (ties: smallest
/// key); nullopt for an empty region. Callers must ensure no accumulate on
/// the same region is in flight.
template <typename W>
std::optional<std::pair<std::uint32_t, W>> ht_max_key(const HashArena<W>& arena,
                                                      const TableGeometry& geo) {
  std::uint32_t best_key = kEmptyKey;
  W best_value = W(0);
  for (std::uint64_t s = geo.slot_offset; s < geo.slot_offset + geo.capacity; ++s) {
    const std::uint32_t k = arena.keys[s];
    if (k != kEmptyKey) ht_better(k, arena.values[s], best_key, best_value);
  }
  if (best_key == kEmptyKey) return std::nullopt;
  return std::make_pair(best_key, best_value);
}

inline const char* to_string(ProbeStrategy s) {
  switch (s) {
    case ProbeStrategy::Linear: return "linear";
    case ProbeStrategy::Quadratic: return "quadratic";
    case ProbeStrategy::DoubleHash: return "double";
    case ProbeStrategy::QuadraticDouble: return "quadratic-double";
  }
  return "?";
}

inline std::optional<ProbeStrategy> parse_probe_strategy(std::string_view s) {
  if (s == "linear") return ProbeStrategy::Linear;
  if (s == "quadratic") return ProbeStrategy::Quadratic;
  if (s == "double") return ProbeStrategy::DoubleHash;
  if (s == "quadratic-double") return ProbeStrategy::QuadraticDouble;
  return std::nullopt;
}

}  // namespace labelprop
