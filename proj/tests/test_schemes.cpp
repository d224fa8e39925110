/*
 * Copyright 2026 The Hyaline Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// C++ standard libraries
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

// external sources
#include <gtest/gtest.h>

// local sources
#include "core/ebr.hpp"
#include "core/hyaline.hpp"
#include "core/hyaline1.hpp"

namespace hyaline::test
{
namespace
{
/// Records how often each node was handed to the free callback.
struct FreeLog {
  std::mutex mutex;
  std::map<NodeHeader *, int> frees;

  static void
  Callback(NodeHeader *node, void *user)
  {
    auto *log = static_cast<FreeLog *>(user);
    std::lock_guard lock{log->mutex};
    ++log->frees[node];
  }

  int
  Count(NodeHeader *node)
  {
    std::lock_guard lock{mutex};
    const auto it = frees.find(node);
    return it == frees.end() ? 0 : it->second;
  }

  std::size_t
  Total()
  {
    std::lock_guard lock{mutex};
    std::size_t sum = 0;
    for (const auto &[node, n] : frees) sum += static_cast<std::size_t>(n);
    return sum;
  }
};

HyalineOptions
General(const std::size_t slots, const std::size_t batch_min = 1)
{
  return HyalineOptions{slots, batch_min, 1, 8192};
}

Hyaline1Options
Single(const std::size_t capacity, const std::size_t batch_min = 1)
{
  return Hyaline1Options{capacity, batch_min, 1};
}

/// Retires the next `n` nodes of `nodes`. Unstamped nodes carry birth era 0, i.e.
/// they count as allocated before anything else happened.
template <class Scheme>
std::vector<NodeHeader *>
RetireFresh(Scheme &scheme, typename Scheme::Thread &t, std::vector<NodeHeader> &nodes,
            std::size_t &used, const std::size_t n)
{
  std::vector<NodeHeader *> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto *node = &nodes.at(used++);
    scheme.Retire(t, node);
    out.push_back(node);
  }
  return out;
}

/// Stamps the next `n` nodes without retiring them.
template <class Scheme>
void
Stamp(Scheme &scheme, typename Scheme::Thread &t, std::vector<NodeHeader> &nodes,
      const std::size_t from, const std::size_t n)
{
  for (std::size_t i = from; i < from + n; ++i) scheme.InitNode(t, &nodes.at(i));
}

}  // namespace

/*######################################################################################
 * Hyaline
 *####################################################################################*/

TEST(HyalineTest, SealSizeIsAtLeastSlotsPlusOne)
{
  FreeLog log;
  Hyaline a{HyalineOptions{128, 64, 150, 8192}, FreeLog::Callback, &log};
  EXPECT_EQ(a.SealSize(), 129U);
  Hyaline b{General(1), FreeLog::Callback, &log};
  EXPECT_EQ(b.SealSize(), 2U);
  Hyaline c{HyalineOptions{4, 64, 150, 8192}, FreeLog::Callback, &log};
  EXPECT_EQ(c.SealSize(), 64U);
}

TEST(HyalineTest, BatchWithNoActiveThreadIsFreedAtRetire)
{
  FreeLog log;
  Hyaline scheme{General(2), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(3);
  std::size_t used = 0;
  auto t = scheme.Attach();
  RetireFresh(scheme, t, nodes, used, 3);
  for (auto &n : nodes) EXPECT_EQ(log.Count(&n), 1);
  EXPECT_EQ(scheme.BatchesFreed(), 1U);
}

TEST(HyalineTest, ActiveReaderDefersFreeUntilLeave)
{
  FreeLog log;
  Hyaline scheme{General(2), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(3);
  std::size_t used = 0;
  auto reader = scheme.Attach();
  auto writer = scheme.Attach();
  scheme.EnterAt(reader, 0);
  EXPECT_EQ(scheme.PeekHead(0).href, 1U);
  RetireFresh(scheme, writer, nodes, used, 3);
  EXPECT_EQ(log.Total(), 0U);
  EXPECT_EQ(scheme.PeekHead(0).hptr, AsWord(&nodes[2]));
  scheme.Leave(reader);
  EXPECT_EQ(scheme.PeekHead(0).href, 0U);
  EXPECT_EQ(scheme.PeekHead(0).hptr, 0U);
  for (auto &n : nodes) EXPECT_EQ(log.Count(&n), 1);
}

// Two readers in one slot, two batches: the older batch is released by the
// traversals, the newer by the last leaver's adjustment.
TEST(HyalineTest, SharedSlotReleasesByTraversalAndAdjustment)
{
  FreeLog log;
  Hyaline scheme{General(1), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(4);
  std::size_t used = 0;
  auto a = scheme.Attach();
  auto b = scheme.Attach();
  auto w = scheme.Attach();
  scheme.EnterAt(a, 0);
  scheme.EnterAt(b, 0);
  const auto x = RetireFresh(scheme, w, nodes, used, 2);
  const auto y = RetireFresh(scheme, w, nodes, used, 2);
  EXPECT_EQ(scheme.PeekHead(0).href, 2U);
  scheme.Leave(a);
  EXPECT_EQ(log.Total(), 0U);
  scheme.Leave(b);
  for (auto *n : x) EXPECT_EQ(log.Count(n), 1);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 1);
}

TEST(HyalineTest, LateEntrantDoesNotHoldEarlierBatch)
{
  FreeLog log;
  Hyaline scheme{General(1), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(4);
  std::size_t used = 0;
  auto a = scheme.Attach();
  auto b = scheme.Attach();
  auto w = scheme.Attach();
  scheme.EnterAt(a, 0);
  const auto x = RetireFresh(scheme, w, nodes, used, 2);
  scheme.EnterAt(b, 0);
  EXPECT_EQ(b.CurrentHandle(), x.back());
  scheme.Leave(a);
  // b entered after x was retired, yet the head keeps x until the slot drains
  EXPECT_EQ(log.Total(), 0U);
  scheme.Leave(b);
  EXPECT_EQ(log.Total(), 2U);
}

TEST(HyalineTest, TrimReleasesOlderBatchesAndMovesHandle)
{
  FreeLog log;
  Hyaline scheme{General(1), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(4);
  std::size_t used = 0;
  auto a = scheme.Attach();
  auto w = scheme.Attach();
  scheme.EnterAt(a, 0);
  const auto x = RetireFresh(scheme, w, nodes, used, 2);
  const auto y = RetireFresh(scheme, w, nodes, used, 2);
  scheme.Trim(a);
  for (auto *n : x) EXPECT_EQ(log.Count(n), 1);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 0);
  EXPECT_EQ(a.CurrentHandle(), y.back());
  scheme.Leave(a);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 1);
}

TEST(HyalineTest, FlushPadsWithLibraryNodes)
{
  FreeLog log;
  Hyaline scheme{General(4), FreeLog::Callback, &log};
  NodeHeader node{};
  auto t = scheme.Attach();
  scheme.Retire(t, &node);
  EXPECT_EQ(t.Pending().size, 1U);
  scheme.Flush(t);
  EXPECT_TRUE(t.Pending().Empty());
  // padding nodes are released by the library, never handed to the callback
  EXPECT_EQ(log.Total(), 1U);
  EXPECT_EQ(log.Count(&node), 1);
}

TEST(HyalineTest, DetachFlushesPendingBatch)
{
  FreeLog log;
  Hyaline scheme{General(2, 64), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(10);
  std::size_t used = 0;
  auto t = scheme.Attach();
  RetireFresh(scheme, t, nodes, used, 10);
  EXPECT_EQ(log.Total(), 0U);
  scheme.Detach(t);
  EXPECT_EQ(log.Total(), 10U);
}

/*######################################################################################
 * Hyaline-S
 *####################################################################################*/

TEST(TouchTest, SharedRaisesOnly)
{
  std::atomic<Word> access{5};
  EXPECT_EQ(TouchShared(access, 3), 5U);
  EXPECT_EQ(access.load(), 5U);
  EXPECT_EQ(TouchShared(access, 9), 9U);
  EXPECT_EQ(access.load(), 9U);
}

TEST(TouchTest, OwnedStores)
{
  std::atomic<Word> access{5};
  EXPECT_EQ(TouchOwned(access, 3), 3U);
  EXPECT_EQ(access.load(), 3U);
}

TEST(HyalineSTest, StaleSlotIsSkipped)
{
  FreeLog log;
  HyalineS scheme{General(1), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(4);
  std::size_t used = 0;
  auto reader = scheme.Attach();
  auto writer = scheme.Attach();
  scheme.EnterAt(reader, 0);
  // the reader never dereferenced: its access era (0) predates the nodes
  Stamp(scheme, writer, nodes, 0, 2);
  const auto x = RetireFresh(scheme, writer, nodes, used, 2);
  EXPECT_GT(scheme.Era(), 0U);
  for (auto *n : x) EXPECT_EQ(log.Count(n), 1);

  // nodes born before a dereference may have been seen, so their batch must wait
  Stamp(scheme, writer, nodes, 2, 2);
  std::atomic<std::uintptr_t> link{0};
  (void)scheme.Deref(reader, link);
  EXPECT_EQ(scheme.AccessEra(0), scheme.Era());
  const auto y = RetireFresh(scheme, writer, nodes, used, 2);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 0);
  scheme.Leave(reader);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 1);
}

TEST(HyalineSTest, AcksBalanceAfterLeave)
{
  FreeLog log;
  HyalineS scheme{General(1), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(40);
  std::size_t used = 0;
  auto a = scheme.Attach();
  auto b = scheme.Attach();
  auto w = scheme.Attach();
  std::atomic<std::uintptr_t> link{0};
  scheme.EnterAt(a, 0);
  scheme.EnterAt(b, 0);
  for (int i = 0; i < 10; ++i) {
    if (i % 2 == 0) (void)scheme.Deref(a, link);
    RetireFresh(scheme, w, nodes, used, 2);
    if (i == 4) scheme.Trim(b);
  }
  EXPECT_GT(scheme.Acks(0), 0);
  scheme.Leave(a);
  scheme.Leave(b);
  EXPECT_EQ(scheme.Acks(0), 0);
  EXPECT_EQ(log.Total(), 20U);
}

// A stalled thread makes its slot accumulate acks; once the threshold is reached
// entries avoid it, and when every slot is saturated the directory grows.
TEST(HyalineSTest, EnterAvoidsSaturatedSlotsAndGrows)
{
  FreeLog log;
  HyalineS scheme{HyalineOptions{2, 1, 1, 3}, FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(64);
  std::size_t used = 0;
  std::atomic<std::uintptr_t> link{0};
  auto stall0 = scheme.Attach();
  auto stall1 = scheme.Attach();
  auto w = scheme.Attach();
  scheme.EnterAt(stall0, 0);
  scheme.EnterAt(stall1, 1);
  (void)scheme.Deref(stall0, link);
  (void)scheme.Deref(stall1, link);
  for (int i = 0; i < 4; ++i) RetireFresh(scheme, w, nodes, used, 3);
  EXPECT_GE(scheme.Acks(0), 3);
  EXPECT_GE(scheme.Acks(1), 3);
  EXPECT_EQ(scheme.Slots(), 2U);

  auto late = scheme.Attach();
  scheme.Enter(late);
  EXPECT_EQ(scheme.Slots(), 4U);
  EXPECT_GE(late.Slot(), 2U);
  scheme.Leave(late);
  scheme.Leave(stall0);
  scheme.Leave(stall1);
  scheme.Detach(w);
  EXPECT_EQ(log.Total(), used);
}

TEST(HyalineSTest, EnterSkipsOneSaturatedSlot)
{
  FreeLog log;
  HyalineS scheme{HyalineOptions{2, 1, 1, 2}, FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(64);
  std::size_t used = 0;
  std::atomic<std::uintptr_t> link{0};
  auto stalled = scheme.Attach();  // index 0 prefers slot 0
  auto w = scheme.Attach();
  scheme.EnterAt(stalled, 0);
  (void)scheme.Deref(stalled, link);
  for (int i = 0; i < 4; ++i) RetireFresh(scheme, w, nodes, used, 3);
  EXPECT_GE(scheme.Acks(0), 2);
  auto c = scheme.Attach();  // index 2 also prefers slot 0
  scheme.Enter(c);
  EXPECT_EQ(c.Slot(), 1U);
  EXPECT_EQ(scheme.Slots(), 2U);
  scheme.Leave(c);
  scheme.Leave(stalled);
  EXPECT_EQ(log.Total(), used);
}

/*######################################################################################
 * Hyaline-1 and Hyaline-1S
 *####################################################################################*/

TEST(Hyaline1Test, SlotsAreOwned)
{
  FreeLog log;
  Hyaline1 scheme{Single(2), FreeLog::Callback, &log};
  auto a = scheme.Attach();
  auto b = scheme.Attach();
  EXPECT_NE(a.Slot(), b.Slot());
  EXPECT_THROW((void)scheme.Attach(), SlotExhausted);
  scheme.Detach(a);
  auto c = scheme.Attach();
  EXPECT_EQ(c.Slot(), 0U);
  scheme.Detach(b);
  scheme.Detach(c);
}

TEST(Hyaline1Test, EnterSetsOwnerBitAndLeaveClearsIt)
{
  FreeLog log;
  Hyaline1 scheme{Single(3), FreeLog::Callback, &log};
  auto a = scheme.Attach();
  scheme.Enter(a);
  EXPECT_EQ(scheme.PeekHead(a.Slot()), kActiveBit);
  EXPECT_EQ(a.CurrentHandle(), nullptr);
  scheme.Leave(a);
  EXPECT_EQ(scheme.PeekHead(a.Slot()), 0U);
  scheme.Detach(a);
}

TEST(Hyaline1Test, BatchReachesOnlyActiveSlots)
{
  FreeLog log;
  Hyaline1 scheme{Single(3), FreeLog::Callback, &log};
  EXPECT_EQ(scheme.SealSize(), 4U);
  std::vector<NodeHeader> nodes(8);
  std::size_t used = 0;
  auto a = scheme.Attach();
  auto b = scheme.Attach();
  auto w = scheme.Attach();
  scheme.Enter(a);
  const auto x = RetireFresh(scheme, w, nodes, used, 4);
  EXPECT_EQ(scheme.PeekHead(a.Slot()), AsWord(x.back()) | kActiveBit);
  EXPECT_EQ(scheme.PeekHead(b.Slot()), 0U);
  EXPECT_EQ(log.Total(), 0U);
  scheme.Leave(a);
  EXPECT_EQ(log.Total(), 4U);

  // nobody active: released at retire
  RetireFresh(scheme, w, nodes, used, 4);
  EXPECT_EQ(log.Total(), 8U);
  scheme.Detach(a);
  scheme.Detach(b);
  scheme.Detach(w);
}

TEST(Hyaline1Test, TrimReleasesOlderBatches)
{
  FreeLog log;
  Hyaline1 scheme{Single(2), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(6);
  std::size_t used = 0;
  auto a = scheme.Attach();
  auto w = scheme.Attach();
  scheme.Enter(a);
  const auto x = RetireFresh(scheme, w, nodes, used, 3);
  const auto y = RetireFresh(scheme, w, nodes, used, 3);
  scheme.Trim(a);
  for (auto *n : x) EXPECT_EQ(log.Count(n), 1);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 0);
  scheme.Leave(a);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 1);
  scheme.Detach(a);
  scheme.Detach(w);
}

TEST(Hyaline1Test, ReleasingActiveSlotIsAnError)
{
  FreeLog log;
  Hyaline1 scheme{Single(1), FreeLog::Callback, &log};
  auto a = scheme.Attach();
  scheme.Enter(a);
  EXPECT_THROW(scheme.ReleaseSlot(a.Slot()), std::logic_error);
  scheme.Leave(a);
  scheme.Detach(a);
}

TEST(Hyaline1STest, StaleOwnerIsSkipped)
{
  FreeLog log;
  Hyaline1S scheme{Single(2), FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(6);
  std::size_t used = 0;
  auto a = scheme.Attach();
  auto w = scheme.Attach();
  scheme.Enter(a);
  Stamp(scheme, w, nodes, 0, 3);
  const auto x = RetireFresh(scheme, w, nodes, used, 3);
  for (auto *n : x) EXPECT_EQ(log.Count(n), 1);
  Stamp(scheme, w, nodes, 3, 3);
  std::atomic<std::uintptr_t> link{0};
  (void)scheme.Deref(a, link);
  const auto y = RetireFresh(scheme, w, nodes, used, 3);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 0);
  scheme.Leave(a);
  for (auto *n : y) EXPECT_EQ(log.Count(n), 1);
  scheme.Detach(a);
  scheme.Detach(w);
}

/*######################################################################################
 * EBR and no reclamation
 *####################################################################################*/

TEST(EbrTest, ActiveReaderBlocksThenReleases)
{
  FreeLog log;
  Ebr scheme{EbrOptions{4, 1, 1}, FreeLog::Callback, &log};
  NodeHeader x{};
  NodeHeader y{};
  auto reader = scheme.Attach();
  auto writer = scheme.Attach();
  scheme.Enter(reader);
  const auto reserved = scheme.MinReservation();
  EXPECT_EQ(reserved, scheme.Epoch());
  scheme.Retire(writer, &x);
  EXPECT_EQ(log.Count(&x), 0);
  EXPECT_EQ(writer.LimboSize(), 1U);
  scheme.Leave(reader);
  EXPECT_EQ(scheme.MinReservation(), Ebr::kIdle);
  scheme.Retire(writer, &y);
  EXPECT_EQ(log.Count(&x), 1);
  EXPECT_EQ(log.Count(&y), 1);
  scheme.Detach(reader);
  scheme.Detach(writer);
}

TEST(EbrTest, EpochAdvancesEveryEpochfEnters)
{
  FreeLog log;
  Ebr scheme{EbrOptions{2, 3, 1}, FreeLog::Callback, &log};
  auto t = scheme.Attach();
  for (int i = 0; i < 9; ++i) {
    scheme.Enter(t);
    scheme.Leave(t);
  }
  EXPECT_EQ(scheme.Epoch(), 3U);
  scheme.Detach(t);
}

TEST(EbrTest, ScanRunsEveryEmptyfRetires)
{
  FreeLog log;
  Ebr scheme{EbrOptions{2, 1, 4}, FreeLog::Callback, &log};
  std::vector<NodeHeader> nodes(4);
  auto t = scheme.Attach();
  for (int i = 0; i < 3; ++i) scheme.Retire(t, &nodes[i]);
  EXPECT_EQ(log.Total(), 0U);
  scheme.Retire(t, &nodes[3]);
  EXPECT_EQ(log.Total(), 4U);
  scheme.Detach(t);
}

TEST(EbrTest, OrphansAreFreedAtDestruction)
{
  FreeLog log;
  NodeHeader x{};
  {
    Ebr scheme{EbrOptions{2, 1, 100}, FreeLog::Callback, &log};
    auto reader = scheme.Attach();
    auto writer = scheme.Attach();
    scheme.Enter(reader);
    scheme.Retire(writer, &x);
    scheme.Detach(writer);
    EXPECT_EQ(log.Total(), 0U);
    scheme.Leave(reader);
    scheme.Detach(reader);
  }
  EXPECT_EQ(log.Count(&x), 1);
}

TEST(EbrTest, RegistryIsBounded)
{
  FreeLog log;
  Ebr scheme{EbrOptions{1, 1, 1}, FreeLog::Callback, &log};
  auto t = scheme.Attach();
  EXPECT_THROW((void)scheme.Attach(), SlotExhausted);
  scheme.Detach(t);
}

TEST(NoReclaimTest, FreesOnlyAtDestruction)
{
  FreeLog log;
  NodeHeader x{};
  {
    NoReclaim scheme{FreeLog::Callback, &log};
    auto t = scheme.Attach();
    scheme.Enter(t);
    scheme.Retire(t, &x);
    scheme.Leave(t);
    scheme.Detach(t);
    EXPECT_EQ(log.Total(), 0U);
  }
  EXPECT_EQ(log.Count(&x), 1);
}

/*######################################################################################
 * Concurrent exactly-once property
 *####################################################################################*/

namespace
{
/// Threads alternate between reading a shared node and replacing it; every replaced
/// node is retired. Readers check the node was not freed while they held it.
template <class Scheme, class... Args>
void
ExactlyOnceStress(const std::size_t threads, Args &&...args)
{
  struct Tracked {
    NodeHeader hdr{};
    std::atomic<int> state{0};  // 0 live, 1 freed
  };
  struct Ledger {
    std::atomic<std::size_t> freed{0};
    std::atomic<std::size_t> double_free{0};
  } ledger;
  auto free_fn = [](NodeHeader *hdr, void *user) {
    auto *l = static_cast<Ledger *>(user);
    auto *t = reinterpret_cast<Tracked *>(hdr);
    if (t->state.exchange(1) != 0) l->double_free.fetch_add(1);
    l->freed.fetch_add(1);
  };

  constexpr std::size_t kPerThread = 4000;
  std::vector<std::unique_ptr<Tracked>> pool(threads * kPerThread + 1);
  for (auto &p : pool) p = std::make_unique<Tracked>();
  std::atomic<std::size_t> next{1};
  std::atomic<std::uintptr_t> shared{reinterpret_cast<std::uintptr_t>(pool[0].get())};
  std::atomic<std::size_t> use_after_free{0};
  std::atomic<std::size_t> retired{0};

  {
    Scheme scheme{std::forward<Args>(args)..., +free_fn, &ledger};
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < threads; ++i) {
      workers.emplace_back([&, i] {
        auto t = scheme.Attach();
        std::mt19937 rng{static_cast<unsigned>(i)};
        for (std::size_t op = 0; op < kPerThread * 2; ++op) {
          scheme.Enter(t);
          const auto word = scheme.Deref(t, shared);
          auto *node = reinterpret_cast<Tracked *>(word);
          if (node->state.load() != 0) use_after_free.fetch_add(1);
          if (rng() % 2 == 0) {
            const auto idx = next.fetch_add(1);
            if (idx < pool.size()) {
              auto *fresh = pool[idx].get();
              scheme.InitNode(t, &fresh->hdr);
              auto expected = word;
              if (shared.compare_exchange_strong(expected,
                                                 reinterpret_cast<std::uintptr_t>(fresh))) {
                scheme.Retire(t, &node->hdr);
                retired.fetch_add(1);
              } else {
                // never published; keep the pool consistent
                fresh->state.store(1);
              }
            }
          }
          if (op % 64 == 0) std::this_thread::yield();
          scheme.Leave(t);
        }
        scheme.Detach(t);
      });
    }
    for (auto &w : workers) w.join();
    auto t = scheme.Attach();
    scheme.Detach(t);
  }
  EXPECT_EQ(use_after_free.load(), 0U);
  EXPECT_EQ(ledger.double_free.load(), 0U);
  EXPECT_EQ(ledger.freed.load(), retired.load());
}

}  // namespace

TEST(ExactlyOnceTest, Hyaline)
{
  ExactlyOnceStress<Hyaline>(4, General(2, 8));
}

TEST(ExactlyOnceTest, HyalineS)
{
  ExactlyOnceStress<HyalineS>(4, HyalineOptions{2, 8, 4, 64});
}

TEST(ExactlyOnceTest, Hyaline1)
{
  ExactlyOnceStress<Hyaline1>(4, Single(5, 8));
}

TEST(ExactlyOnceTest, Hyaline1S)
{
  ExactlyOnceStress<Hyaline1S>(4, Hyaline1Options{5, 8, 4});
}

TEST(ExactlyOnceTest, Ebr)
{
  ExactlyOnceStress<Ebr>(4, EbrOptions{5, 4, 8});
}

}  // namespace hyaline::test
