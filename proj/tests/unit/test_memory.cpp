#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <random>

#include "gnnerator/errors.hpp"
#include "gnnerator/memory.hpp"

using namespace gnnerator;

namespace {

// Ticks until `id` completes; returns the cycle it completed at.
Cycle run_until(DramModel& dram, TxnId id) {
  for (int guard = 0; guard < 1'000'000; ++guard) {
    const auto done = dram.tick();
    if (std::find(done.begin(), done.end(), id) != done.end()) return dram.now();
  }
  FAIL("transaction never completed");
  return 0;
}

}  // namespace

TEST_CASE("single read") {
  DramModel dram(64);
  const TxnId id = dram.request(Requestor::Other, 256, false);
  CHECK(run_until(dram, id) == 4);
}

TEST_CASE("two reads are served in order") {
  DramModel dram(64);
  const TxnId a = dram.request(Requestor::Other, 256, false);
  const TxnId b = dram.request(Requestor::Other, 256, false);
  std::map<TxnId, Cycle> when;
  while (when.size() < 2) {
    for (TxnId id : dram.tick()) when[id] = dram.now();
  }
  CHECK(when[a] == 4);
  CHECK(when[b] == 8);
}

TEST_CASE("tick basics") {
  DramModel dram(64);
  CHECK(dram.tick().empty());
  CHECK(dram.now() == 1);
  const TxnId id = dram.request(Requestor::Other, 64, false);
  const auto done = dram.tick();
  REQUIRE(done.size() == 1);
  CHECK(done[0] == id);
  CHECK_THROWS_AS(dram.request(Requestor::Other, 0, false), ParameterError);
  CHECK_THROWS_AS(DramModel(0), ParameterError);
}

TEST_CASE("latency is added after the last byte") {
  DramModel dram(64, 100);
  const TxnId id = dram.request(Requestor::Other, 256, false);
  CHECK(run_until(dram, id) == 104);
}

TEST_CASE("same-cycle arrivals are ordered by requestor") {
  DramModel dram(64);
  const TxnId late = dram.request(Requestor::DenseOutput, 64, false);
  const TxnId early = dram.request(Requestor::GraphEdgeFetch, 64, false);
  CHECK(run_until(dram, early) == 1);
  CHECK(run_until(dram, late) == 2);
  CHECK(dram.stall_cycles(Requestor::DenseOutput) == 1);
  CHECK(dram.stall_cycles(Requestor::GraphEdgeFetch) == 0);
}

TEST_CASE("small requests share a cycle") {
  DramModel dram(64);
  const TxnId a = dram.request(Requestor::Other, 16, false);
  const TxnId b = dram.request(Requestor::Other, 16, true);
  const auto done = dram.tick();
  CHECK(done == std::vector<TxnId>{a, b});
  CHECK(dram.peak_bytes_per_cycle() == 32);
}

TEST_CASE("random trace: conservation and busy cycles") {
  std::mt19937 rng(17);
  DramModel dram(48, 3);
  std::uint64_t reads = 0, writes = 0;
  std::array<std::uint64_t, kNumStreams> per_stream{};
  std::uint64_t served_by_ticks = 0;
  auto tick = [&] {
    const std::uint64_t before = dram.read_bytes() + dram.write_bytes();
    dram.tick();
    const std::uint64_t now = dram.read_bytes() + dram.write_bytes();
    CHECK(now - before <= 48);
    served_by_ticks += now - before;
  };
  for (int cycle = 0; cycle < 400; ++cycle) {
    const int n = cycle < 300 ? static_cast<int>(rng() % 3) : 0;
    for (int i = 0; i < n; ++i) {
      const std::uint64_t bytes = 1 + rng() % 200;
      const bool w = rng() % 2;
      const auto s = static_cast<Stream>(rng() % kNumStreams);
      dram.request(static_cast<Requestor>(rng() % kNumRequestors), bytes, w, s);
      (w ? writes : reads) += bytes;
      per_stream[static_cast<std::size_t>(s)] += bytes;
    }
    tick();
  }
  while (!dram.idle()) tick();
  CHECK(dram.read_bytes() == reads);
  CHECK(dram.write_bytes() == writes);
  CHECK(served_by_ticks == reads + writes);
  CHECK(dram.served() == dram.issued());
  for (std::size_t s = 0; s < kNumStreams; ++s) {
    CHECK(dram.served().read[s] + dram.served().write[s] == per_stream[s]);
  }
  CHECK(dram.peak_bytes_per_cycle() <= 48);
}

TEST_CASE("a continuously backlogged queue is busy ceil(bytes / bandwidth) cycles") {
  std::mt19937 rng(5);
  DramModel dram(64);
  std::uint64_t total = 0;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t b = 1 + rng() % 1000;
    dram.request(Requestor::Other, b, rng() % 2);
    total += b;
  }
  while (!dram.idle()) dram.tick();
  CHECK(dram.busy_cycles() == (total + 63) / 64);
}

TEST_CASE("skip_idle") {
  DramModel dram(64);
  dram.skip_idle(10);
  CHECK(dram.now() == 10);
  dram.request(Requestor::Other, 8, false);
  CHECK_THROWS_AS(dram.skip_idle(1), ProtocolError);
}

TEST_CASE("scratchpad protocol") {
  Scratchpad sp(1000);
  CHECK(sp.bank_capacity() == 500);
  CHECK_THROWS_AS(sp.swap_banks(), ProtocolError);
  CHECK_THROWS_AS(sp.begin_fill(501), CapacityError);
  sp.begin_fill(400);
  CHECK(sp.filling());
  CHECK(sp.occupancy(sp.shadow_bank()) == 400);
  CHECK_THROWS_AS(sp.begin_fill(10), ProtocolError);
  CHECK_THROWS_AS(sp.swap_banks(), ProtocolError);
  sp.complete_fill();
  CHECK(sp.shadow_ready());
  const std::size_t before = sp.active_bank();
  sp.swap_banks();
  CHECK(sp.active_bank() != before);
  CHECK(sp.occupancy(sp.active_bank()) == 400);
  CHECK(sp.occupancy(sp.shadow_bank()) == 0);
  CHECK_THROWS_AS(sp.complete_fill(), ProtocolError);
}
