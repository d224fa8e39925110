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

#ifndef HYALINE_CORE_HYALINE_HPP
#define HYALINE_CORE_HYALINE_HPP

// C++ standard libraries
#include <atomic>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <utility>

// local sources
#include "core/batch.hpp"
#include "core/robust.hpp"
#include "core/smr_core.hpp"

namespace hyaline
{
struct HyalineOptions {
  /// Initial slot count, a power of two.
  std::size_t slots{128};
  std::size_t batch_min{64};
  /// Allocations per era tick (robust only).
  Word freq{150};
  /// Ack balance after which Hyaline-S treats a slot as occupied by stalled threads.
  std::int64_t threshold{8192};
};

/// One slot: head, access era and ack balance, kept on its own cache lines.
struct alignas(kCacheLine) SharedSlot {
  AtomicHead head;
  std::atomic<Word> access{0};
  std::atomic<std::int64_t> acks{0};
};

/**
 * @brief Hyaline with two-word heads; any number of threads may share a slot.
 *
 * With `Robust` set this is Hyaline-S: nodes carry birth eras, slots track access
 * eras, retire skips slots whose era predates the batch, and enter avoids slots
 * whose ack balance reached the threshold, growing the slot directory when every
 * slot is saturated.
 */
template <bool Robust, class Hooks = NoStepHooks>
class BasicHyaline
{
 public:
  /// Snapshot of the slot head's node at enter (or last trim).
  using Handle = NodeHeader *;

  class Thread
  {
   public:
    Thread() = default;

    [[nodiscard]] std::size_t
    Slot() const
    {
      return slot_;
    }

    [[nodiscard]] bool
    Active() const
    {
      return active_;
    }

    [[nodiscard]] Handle
    CurrentHandle() const
    {
      return handle_;
    }

    [[nodiscard]] const LocalBatch &
    Pending() const
    {
      return batch_;
    }

   private:
    friend BasicHyaline;

    explicit Thread(const std::size_t index) : index_{index} {}

    std::size_t index_{0};
    std::size_t slot_{0};
    Handle handle_{nullptr};
    bool active_{false};
    LocalBatch batch_{};
    Word alloc_counter_{0};
  };

  BasicHyaline(const HyalineOptions &options, FreeFn free_fn, void *user)
      : options_{options},
        slots_{options.slots},
        counting_{free_fn, user, options.batch_min},
        clock_{options.freq}
  {
  }

  BasicHyaline(const BasicHyaline &) = delete;
  auto operator=(const BasicHyaline &) -> BasicHyaline & = delete;

  /*####################################################################################
   * Thread-level interface
   *##################################################################################*/

  Thread
  Attach()
  {
    return Thread{next_index_.fetch_add(1, std::memory_order_relaxed)};
  }

  void
  Detach(Thread &t)
  {
    assert(!t.active_);
    Flush(t);
  }

  /// Enters the thread's default slot (thread index mod k, or the robust scan).
  void
  Enter(Thread &t)
  {
    if constexpr (Robust) {
      auto [slot, handle] = RobustEnter(t.index_);
      t.slot_ = slot;
      t.handle_ = handle;
    } else {
      t.slot_ = t.index_ % slots_.Size();
      t.handle_ = EnterSlot(t.slot_);
    }
    t.active_ = true;
  }

  /// Enters a caller-chosen slot.
  void
  EnterAt(Thread &t, const std::size_t slot)
  {
    assert(slot < slots_.Size());
    t.slot_ = slot;
    t.handle_ = EnterSlot(slot);
    t.active_ = true;
  }

  void
  Leave(Thread &t)
  {
    LeaveSlot(t.slot_, t.handle_);
    t.handle_ = nullptr;
    t.active_ = false;
  }

  void
  Trim(Thread &t)
  {
    t.handle_ = TrimSlot(t.slot_, t.handle_);
  }

  void
  InitNode(Thread &t, NodeHeader *node)
  {
    if constexpr (Robust) clock_.InitNode(node, t.alloc_counter_);
  }

  std::uintptr_t
  Deref(Thread &t, const std::atomic<std::uintptr_t> &link)
  {
    if constexpr (Robust) {
      return DerefValidated(link, slots_[t.slot_].access, clock_,
                            [](std::atomic<Word> &access, Word era) {
                              return TouchShared<Hooks>(access, era);
                            });
    } else {
      return link.load(std::memory_order_acquire);
    }
  }

  /// Appends an unlinked node to the thread's batch; retires the batch once sealed.
  void
  Retire(Thread &t, NodeHeader *node)
  {
    Word birth = 0;
    if constexpr (Robust) birth = SharedWord(node).load(std::memory_order_relaxed);
    t.batch_.Push(node, birth);
    const auto k = slots_.Size();
    if (t.batch_.size >= counting_.SealSize(k)) RetireLocal(t.batch_, k);
  }

  /// Retires the pending batch, padded with library nodes.
  void
  Flush(Thread &t)
  {
    if (t.batch_.Empty()) return;
    const auto k = slots_.Size();
    BatchCounting<Hooks>::Pad(t.batch_, counting_.SealSize(k));
    RetireLocal(t.batch_, k);
  }

  /*####################################################################################
   * Slot-level operations
   *##################################################################################*/

  /// Increments href while observing hptr; returns hptr as the handle.
  Handle
  EnterSlot(const std::size_t slot)
  {
    auto &head = slots_[slot].head;
    for (;;) {
      Hooks::Before(Step::kHeadLoad);
      auto h = head.Load();
      Hooks::Before(Step::kHeadCas);
      auto expected = h;
      if (head.CompareExchange(expected, HeadTuple{h.href + 1, h.hptr})) return AsNode(h.hptr);
    }
  }

  /**
   * @brief Decrements href and releases everything retired into the slot since
   * `handle` was taken.
   *
   * The last leaver detaches the list and gives the first node the Adjs it would
   * have received as a predecessor.
   */
  void
  LeaveSlot(const std::size_t slot, const Handle handle)
  {
    auto &s = slots_[slot];
    HeadTuple h;
    NodeHeader *curr = nullptr;
    NodeHeader *next = nullptr;
    for (;;) {
      Hooks::Before(Step::kHeadLoad);
      h = s.head.Load();
      curr = AsNode(h.hptr);
      if (curr != handle && curr != nullptr) {
        next = AsNode(SharedWord(curr).load(std::memory_order_acquire));
      }
      const HeadTuple desired{h.href - 1, h.href == 1 ? 0 : h.hptr};
      Hooks::Before(Step::kHeadCas);
      auto expected = h;
      if (s.head.CompareExchange(expected, desired)) break;
    }
    if (h.href == 1 && curr != nullptr) counting_.Adjust(curr, 1, 0);
    if (curr != handle) TraverseSlot(s, next, handle);
  }

  /// Releases batches retired since `handle` without touching the head; the
  /// observed first node becomes the new handle.
  Handle
  TrimSlot(const std::size_t slot, const Handle handle)
  {
    auto &s = slots_[slot];
    Hooks::Before(Step::kHeadLoad);
    auto *curr = AsNode(s.head.Load().hptr);
    if (curr != handle && curr != nullptr) {
      TraverseSlot(s, AsNode(SharedWord(curr).load(std::memory_order_acquire)), handle);
    }
    return curr;
  }

  /**
   * @brief Inserts a sealed batch into every slot with active threads.
   *
   * Empty (or, for Hyaline-S, stale) slots are accounted for with one Adjs each,
   * added to the batch itself at the end; every displaced predecessor receives
   * Adjs plus the href observed when it was displaced.
   */
  void
  RetireBatch(LocalBatch &batch, const std::size_t k)
  {
    assert(batch.size >= k + 1);
    auto *counter = batch.nref_node;
    counter->ref_node = ComputeAdjs(k, 64);
    SharedWord(counter).store(0, std::memory_order_relaxed);

    bool do_adj = false;
    Word empty = 0;
    NodeHeader *curr = batch.first_node;
    for (std::size_t slot = 0; slot < k; ++slot) {
      auto &s = slots_[slot];
      // read before publishing: the batch may be freed once it is in every slot
      auto *following = BatchNext(curr);
      HeadTuple h;
      bool skipped = false;
      for (;;) {
        Hooks::Before(Step::kHeadLoad);
        h = s.head.Load();
        if (h.href == 0) {
          skipped = true;
          break;
        }
        if constexpr (Robust) {
          Hooks::Before(Step::kAccessLoad);
          if (s.access.load(std::memory_order_seq_cst) < batch.min_birth) {
            skipped = true;
            break;
          }
        }
        SharedWord(curr).store(h.hptr, std::memory_order_relaxed);
        Hooks::Before(Step::kHeadCas);
        auto expected = h;
        if (s.head.CompareExchange(expected, HeadTuple{h.href, AsWord(curr)})) break;
      }
      if (skipped) {
        do_adj = true;
        ++empty;
        continue;
      }
      curr = following;
      if (h.hptr == 0) continue;
      counting_.Adjust(AsNode(h.hptr), 1, h.href);
      // each of the href threads will visit the displaced node exactly once
      if constexpr (Robust) {
        Hooks::Before(Step::kAcksFaa);
        s.acks.fetch_add(static_cast<std::int64_t>(h.href), std::memory_order_relaxed);
      }
    }
    if (do_adj) counting_.Adjust(batch.first_node, empty, 0);
  }

  /// Hyaline-S enter: first slot from `preferred` whose acks are below the
  /// threshold; grows the directory when every slot is saturated.
  std::pair<std::size_t, Handle>
  RobustEnter(const std::size_t preferred)
  {
    const auto k = slots_.Size();
    for (std::size_t i = 0; i < k; ++i) {
      const auto slot = (preferred + i) % k;
      Hooks::Before(Step::kAcksLoad);
      if (slots_[slot].acks.load(std::memory_order_acquire) < options_.threshold) {
        return {slot, EnterSlot(slot)};
      }
    }
    const auto grown = GrowSlots(k);
    const auto slot = k + preferred % (grown - k);
    return {slot, EnterSlot(slot)};
  }

  /// Doubles the slot count from `observed`; returns the count afterwards.
  std::size_t
  GrowSlots(const std::size_t observed)
  {
    return slots_.Grow(observed);
  }

  /// Raises the slot's access era to `era` (compare-and-swap loop).
  Word
  Touch(const std::size_t slot, const Word era)
  {
    return TouchShared<Hooks>(slots_[slot].access, era);
  }

  /*####################################################################################
   * Introspection
   *##################################################################################*/

  [[nodiscard]] HeadTuple
  PeekHead(const std::size_t slot)
  {
    return slots_[slot].head.Load();
  }

  [[nodiscard]] Word
  AccessEra(const std::size_t slot)
  {
    return slots_[slot].access.load(std::memory_order_acquire);
  }

  [[nodiscard]] std::int64_t
  Acks(const std::size_t slot)
  {
    return slots_[slot].acks.load(std::memory_order_acquire);
  }

  [[nodiscard]] std::size_t
  Slots() const
  {
    return slots_.Size();
  }

  [[nodiscard]] std::size_t
  SealSize() const
  {
    return counting_.SealSize(slots_.Size());
  }

  [[nodiscard]] Word
  Era() const
  {
    return clock_.Now();
  }

  [[nodiscard]] std::uint64_t
  BatchesFreed() const
  {
    return counting_.BatchesFreed();
  }

  [[nodiscard]] const SlotDirectory<SharedSlot> &
  Directory() const
  {
    return slots_;
  }

  [[nodiscard]] const HyalineOptions &
  Options() const
  {
    return options_;
  }

 private:
  void
  RetireLocal(LocalBatch &batch, const std::size_t k)
  {
    batch.Seal();
    RetireBatch(batch, k);
    batch.Reset();
  }

  void
  TraverseSlot(SharedSlot &s, NodeHeader *next, const Handle handle)
  {
    const auto result = counting_.Traverse(next, handle);
    if constexpr (Robust) {
      Hooks::Before(Step::kAcksFaa);
      s.acks.fetch_sub(static_cast<std::int64_t>(result.visited), std::memory_order_relaxed);
    }
  }

  HyalineOptions options_;
  SlotDirectory<SharedSlot> slots_;
  BatchCounting<Hooks> counting_;
  EraClock<Hooks> clock_;
  std::atomic<std::size_t> next_index_{0};
};

using Hyaline = BasicHyaline<false>;
using HyalineS = BasicHyaline<true>;

}  // namespace hyaline

#endif  // HYALINE_CORE_HYALINE_HPP
