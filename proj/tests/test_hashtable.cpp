#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "labelprop/generators.hpp"
#include "labelprop/hashtable.hpp"
#include "support/oracles.hpp"

using namespace labelprop;

namespace {

constexpr ProbeStrategy kAllStrategies[] = {ProbeStrategy::Linear, ProbeStrategy::Quadratic,
                                            ProbeStrategy::DoubleHash,
                                            ProbeStrategy::QuadraticDouble};

/// Slot index (relative to the region) where `key` currently sits.
template <typename W>
std::optional<std::uint64_t> slot_of(const HashArena<W>& arena, const TableGeometry& geo,
                                     std::uint32_t key) {
  for (std::uint64_t s = 0; s < geo.capacity; ++s)
    if (arena.keys[geo.slot_offset + s] == key) return s;
  return std::nullopt;
}

}  // namespace

TEST_CASE("table geometry: capacity is the next-larger power of two minus one") {
  // degree -> (p1, p2) with D <= p1 <= 2D - 1.
  const CsrGraph star7 = build_csr(star_graph(7), true);
  const TableGeometry c7 = geometry_for(star7, 0);
  CHECK_EQ(c7.slot_offset, 0);
  CHECK_EQ(c7.capacity, 7);
  CHECK_EQ(c7.step_mod, 15);
  const TableGeometry leaf = geometry_for(star7, 1);
  CHECK_EQ(leaf.capacity, 1);
  CHECK_EQ(leaf.step_mod, 3);
  CHECK_EQ(leaf.slot_offset, 2 * star7.offset(1));

  const CsrGraph star8 = build_csr(star_graph(8), true);
  const TableGeometry c8 = geometry_for(star8, 0);
  CHECK_EQ(c8.capacity, 15);
  CHECK_EQ(c8.step_mod, 31);

  for (std::uint64_t d = 1; d <= 200; ++d) {
    const std::uint64_t p1 = std::bit_ceil(d + 1) - 1;
    CHECK_GE(p1, d);
    CHECK_LE(p1, 2 * d - 1);
  }
}

TEST_CASE("table geometry: isolated vertices own no region") {
  EdgeList el;
  el.edges = {{0, 1, 1.0}};
  el.n_declared = 3;
  const CsrGraph g = build_csr(el, true);
  CHECK_THROWS_AS(geometry_for(g, 2), ValidationError);
}

TEST_CASE("arena sizing covers twice the directed entry count") {
  const CsrGraph star7 = build_csr(star_graph(7), true);
  const auto arena = HashArena<float>::for_graph(star7);
  CHECK_EQ(arena.keys.size(), 2 * star7.directed_size());
  CHECK_EQ(arena.values.size(), arena.keys.size());
  CHECK(std::all_of(arena.keys.begin(), arena.keys.end(),
                    [](std::uint32_t k) { return k == kEmptyKey; }));
}

TEST_CASE("probe placement: colliding keys 0, 7, 14 in a 7-slot region") {
  // All three keys start at slot 0; the advance rule decides the rest.
  const TableGeometry geo{0, 7, 15};
  struct Expect {
    ProbeStrategy strategy;
    std::uint64_t slot7, slot14;
  };
  // Quadratic doubles its step (1, 2, 4, ...); the fixed double-hash step of
  // key 7 and 14 is a multiple of 7, so only the late +1 sweep can place
  // them; quadratic-double folds key mod 15 into the growing step.
  const Expect table[] = {{ProbeStrategy::Linear, 1, 2},
                          {ProbeStrategy::Quadratic, 1, 3},
                          {ProbeStrategy::DoubleHash, 1, 2},
                          {ProbeStrategy::QuadraticDouble, 1, 3}};
  for (const auto& e : table) {
    CAPTURE(to_string(e.strategy));
    HashArena<float> arena(7);
    for (std::uint32_t key : {0u, 7u, 14u})
      REQUIRE_EQ(ht_accumulate(arena, geo, e.strategy, key, 1.0f, false), AccumulateStatus::Done);
    CHECK_EQ(slot_of(arena, geo, 0u), std::optional<std::uint64_t>{0});
    CHECK_EQ(slot_of(arena, geo, 7u), std::optional<std::uint64_t>{e.slot7});
    CHECK_EQ(slot_of(arena, geo, 14u), std::optional<std::uint64_t>{e.slot14});
  }
}

TEST_CASE("probe placement: quadratic-double first advance is one slot") {
  // step starts at 1 and grows only after the first advance, so key 10
  // (slot 3, taken by key 3) lands on slot 4.
  const TableGeometry geo{0, 7, 15};
  HashArena<float> arena(7);
  REQUIRE_EQ(ht_accumulate(arena, geo, ProbeStrategy::QuadraticDouble, 3u, 1.0f, false),
             AccumulateStatus::Done);
  REQUIRE_EQ(ht_accumulate(arena, geo, ProbeStrategy::QuadraticDouble, 10u, 1.0f, false),
             AccumulateStatus::Done);
  CHECK_EQ(slot_of(arena, geo, 3u), std::optional<std::uint64_t>{3});
  CHECK_EQ(slot_of(arena, geo, 10u), std::optional<std::uint64_t>{4});
}

TEST_CASE("repeated keys accumulate in place") {
  const TableGeometry geo{0, 7, 15};
  HashArena<float> arena(7);
  for (int r = 0; r < 4; ++r)
    REQUIRE_EQ(ht_accumulate(arena, geo, ProbeStrategy::Linear, 5u, 1.5f, false),
               AccumulateStatus::Done);
  const auto best = ht_max_key(arena, geo);
  REQUIRE(best.has_value());
  CHECK_EQ(best->first, 5u);
  CHECK_EQ(best->second, 6.0f);
}

TEST_CASE("largest valid key is not confused with the empty sentinel") {
  const TableGeometry geo{0, 3, 7};
  HashArena<float> arena(3);
  REQUIRE_EQ(ht_accumulate(arena, geo, ProbeStrategy::Linear, 0xFFFFFFFEu, 2.0f, false),
             AccumulateStatus::Done);
  const auto best = ht_max_key(arena, geo);
  REQUIRE(best.has_value());
  CHECK_EQ(best->first, 0xFFFFFFFEu);
}

TEST_CASE("ht_clear wipes exactly the addressable region") {
  const TableGeometry geo{2, 3, 7};
  HashArena<float> arena(8);
  arena.keys[1] = 77;  // outside the region, must survive
  for (std::uint32_t key : {1u, 2u, 3u})
    REQUIRE_EQ(ht_accumulate(arena, geo, ProbeStrategy::Linear, key, 1.0f, false),
               AccumulateStatus::Done);
  ht_clear(arena, geo);
  CHECK_FALSE(ht_max_key(arena, geo).has_value());
  for (std::uint64_t s = 2; s < 5; ++s) {
    CHECK_EQ(arena.keys[s], kEmptyKey);
    CHECK_EQ(arena.values[s], 0.0f);
  }
  CHECK_EQ(arena.keys[1], 77);
}

TEST_CASE("ht_better and ht_max_key break value ties toward the smaller key") {
  std::uint32_t bk = kEmptyKey;
  float bv = 0.0f;
  ht_better(9u, 2.0f, bk, bv);
  ht_better(2u, 2.0f, bk, bv);
  CHECK_EQ(bk, 2u);
  bk = kEmptyKey;
  ht_better(2u, 2.0f, bk, bv);
  ht_better(9u, 2.0f, bk, bv);
  CHECK_EQ(bk, 2u);
  ht_better(9u, 3.0f, bk, bv);
  CHECK_EQ(bk, 9u);

  const TableGeometry geo{0, 7, 15};
  HashArena<float> arena(7);
  for (std::uint32_t key : {9u, 2u, 5u})
    REQUIRE_EQ(ht_accumulate(arena, geo, ProbeStrategy::Quadratic, key, 4.0f, false),
               AccumulateStatus::Done);
  const auto best = ht_max_key(arena, geo);
  REQUIRE(best.has_value());
  CHECK_EQ(best->first, 2u);
}

TEST_CASE("every strategy places a full complement of distinct keys (100% load)") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::uint32_t> keydist(0, 0xFFFFFFFEu);
  for (const std::uint64_t p1 : {1ull, 3ull, 7ull, 15ull, 31ull, 63ull, 127ull}) {
    const TableGeometry geo{0, p1, 2 * (p1 + 1) - 1};
    for (ProbeStrategy strategy : kAllStrategies) {
      CAPTURE(to_string(strategy));
      CAPTURE(p1);
      for (int round = 0; round < 20; ++round) {
        std::vector<std::uint32_t> keys;
        while (keys.size() < p1) {
          const std::uint32_t k = keydist(rng);
          if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        }
        HashArena<float> arena(p1);
        std::uint64_t failures = 0;
        for (std::uint32_t k : keys)
          if (ht_accumulate(arena, geo, strategy, k, 1.0f, false) == AccumulateStatus::Failed)
            ++failures;
        REQUIRE_EQ(failures, 0);
        // All p1 slots are now occupied; re-inserting still succeeds.
        for (std::uint32_t k : keys)
          if (ht_accumulate(arena, geo, strategy, k, 1.0f, false) == AccumulateStatus::Failed)
            ++failures;
        REQUIRE_EQ(failures, 0);
      }
    }
  }
}

TEST_CASE("worst-case residue pile-up still places p1 keys into p1 slots") {
  // Every key is congruent mod p1, so every probe sequence starts at slot 0
  // and (for the double-hash family) advances by multiples of p1 until the
  // completeness sweep takes over.
  const std::uint64_t p1 = 63;
  const TableGeometry geo{0, p1, 127};
  for (ProbeStrategy strategy : kAllStrategies) {
    CAPTURE(to_string(strategy));
    HashArena<float> arena(p1);
    std::uint64_t failures = 0;
    for (std::uint64_t k = 0; k < p1; ++k)
      if (ht_accumulate(arena, geo, strategy, static_cast<std::uint32_t>(k * p1), 1.0f, false) ==
          AccumulateStatus::Failed)
        ++failures;
    REQUIRE_EQ(failures, 0);
  }
}

TEST_CASE("exceeding the distinct-key budget reports Failed without corruption") {
  const TableGeometry geo{0, 3, 7};
  for (ProbeStrategy strategy : kAllStrategies) {
    CAPTURE(to_string(strategy));
    HashArena<float> arena(3);
    for (std::uint32_t key : {1u, 2u, 3u})
      REQUIRE_EQ(ht_accumulate(arena, geo, strategy, key, 1.0f, false), AccumulateStatus::Done);
    CHECK_EQ(ht_accumulate(arena, geo, strategy, 4u, 1.0f, false), AccumulateStatus::Failed);
    const auto oracle = testsupport::map_accumulate({{1u, 1.0}, {2u, 1.0}, {3u, 1.0}});
    for (auto [k, v] : oracle) {
      const auto s = slot_of(arena, geo, k);
      REQUIRE(s.has_value());
      CHECK_EQ(arena.values[geo.slot_offset + *s], static_cast<float>(v));
    }
    CHECK_FALSE(slot_of(arena, geo, 4u).has_value());
  }
}

TEST_CASE("randomized workloads match the map oracle (unshared and shared)") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint64_t> degdist(1, 64);
  std::uniform_int_distribution<std::uint32_t> keydist(0, 0xFFFFFFFEu);
  std::uniform_int_distribution<int> multdist(1, 5);
  for (int round = 0; round < 200; ++round) {
    const std::uint64_t d = degdist(rng);
    const std::uint64_t p1 = std::bit_ceil(d + 1) - 1;
    const TableGeometry geo{0, p1, 2 * (p1 + 1) - 1};
    std::uniform_int_distribution<std::uint64_t> countdist(1, p1);
    const std::uint64_t distinct = countdist(rng);
    std::vector<std::pair<std::uint32_t, double>> inserts;
    std::vector<std::uint32_t> keys;
    while (keys.size() < distinct) {
      const std::uint32_t k = keydist(rng);
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    for (std::uint32_t k : keys) {
      const int reps = multdist(rng);
      for (int r = 0; r < reps; ++r)
        inserts.push_back({k, 0.25 * (1 + static_cast<int>(k % 7))});  // exact in float
    }
    std::shuffle(inserts.begin(), inserts.end(), rng);
    const auto oracle = testsupport::map_accumulate(inserts);
    const auto expect_best = testsupport::map_max_key(oracle);

    const ProbeStrategy strategy = kAllStrategies[round % 4];
    const bool shared = round % 2 == 0;
    HashArena<float> arena(p1);
    std::uint64_t failures = 0;
    for (auto [k, v] : inserts)
      if (ht_accumulate(arena, geo, strategy, k, static_cast<float>(v), shared) ==
          AccumulateStatus::Failed)
        ++failures;
    REQUIRE_EQ(failures, 0);
    for (auto [k, v] : oracle) {
      const auto s = slot_of(arena, geo, k);
      REQUIRE(s.has_value());
      REQUIRE_EQ(arena.values[geo.slot_offset + *s], static_cast<float>(v));
    }
    const auto best = ht_max_key(arena, geo);
    REQUIRE(best.has_value());
    REQUIRE_EQ(best->first, expect_best->first);
    REQUIRE_EQ(best->second, static_cast<float>(expect_best->second));
  }
}

TEST_CASE("concurrent shared accumulation matches the oracle") {
  // Four workers hammer one region with shuffled copies of the same
  // workload; unit values keep float sums exact regardless of order.
  const std::uint64_t p1 = 63;
  const TableGeometry geo{0, p1, 127};
  testsupport::ThreadTeam team(4);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint32_t> keydist(0, 0xFFFFFFFEu);

  for (int round = 0; round < 20; ++round) {
    std::vector<std::uint32_t> keys;
    const std::uint64_t distinct = 1 + static_cast<std::uint64_t>(rng() % p1);
    while (keys.size() < distinct) {
      const std::uint32_t k = keydist(rng);
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    std::vector<std::vector<std::uint32_t>> order(4, keys);
    for (auto& o : order) std::shuffle(o.begin(), o.end(), rng);

    const ProbeStrategy strategy = kAllStrategies[round % 4];
    HashArena<float> arena(p1);
    std::atomic<std::uint64_t> failures{0};
    team.run([&](int wid) {
      for (std::uint32_t k : order[wid])
        if (ht_accumulate(arena, geo, strategy, k, 1.0f, true) == AccumulateStatus::Failed)
          failures.fetch_add(1);
    });
    REQUIRE_EQ(failures.load(), 0);
    for (std::uint32_t k : keys) {
      const auto s = slot_of(arena, geo, k);
      REQUIRE(s.has_value());
      REQUIRE_EQ(arena.values[geo.slot_offset + *s], 4.0f);
    }
  }

  // Residue pile-up under contention: all keys collide on slot 0.
  for (ProbeStrategy strategy : kAllStrategies) {
    CAPTURE(to_string(strategy));
    HashArena<float> arena(p1);
    std::atomic<std::uint64_t> failures{0};
    team.run([&](int wid) {
      std::mt19937_64 lrng(wid);
      std::vector<std::uint32_t> keys;
      for (std::uint64_t k = 0; k < p1; ++k) keys.push_back(static_cast<std::uint32_t>(k * p1));
      std::shuffle(keys.begin(), keys.end(), lrng);
      for (std::uint32_t k : keys)
        if (ht_accumulate(arena, geo, strategy, k, 1.0f, true) == AccumulateStatus::Failed)
          failures.fetch_add(1);
    });
    REQUIRE_EQ(failures.load(), 0);
    for (std::uint64_t k = 0; k < p1; ++k)
      REQUIRE(slot_of(arena, geo, static_cast<std::uint32_t>(k * p1)).has_value());
  }
}

TEST_CASE("double-width value slots behave identically") {
  const TableGeometry geo{0, 7, 15};
  HashArena<double> arena(7);
  for (int r = 0; r < 3; ++r)
    REQUIRE_EQ(ht_accumulate(arena, geo, ProbeStrategy::DoubleHash, 11u, 0.1, false),
               AccumulateStatus::Done);
  const auto best = ht_max_key(arena, geo);
  REQUIRE(best.has_value());
  CHECK_EQ(best->first, 11u);
  CHECK_EQ(best->second, doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("probe strategy names round-trip") {
  for (ProbeStrategy s : kAllStrategies) {
    const auto parsed = parse_probe_strategy(to_string(s));
    REQUIRE(parsed.has_value());
    CHECK_EQ(*parsed, s);
  }
  CHECK_FALSE(parse_probe_strategy("cuckoo").has_value());
}
