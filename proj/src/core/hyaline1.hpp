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

#ifndef HYALINE_CORE_HYALINE1_HPP
#define HYALINE_CORE_HYALINE1_HPP

// C++ standard libraries
#include <atomic>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>

// local sources
#include "core/batch.hpp"
#include "core/robust.hpp"
#include "core/smr_core.hpp"

namespace hyaline
{
struct Hyaline1Options {
  /// Number of owner slots, i.e. the maximum number of attached threads.
  std::size_t capacity{128};
  std::size_t batch_min{64};
  Word freq{150};
};

/// Thrown by Attach when every slot is owned.
class SlotExhausted : public std::runtime_error
{
 public:
  SlotExhausted() : std::runtime_error{"all slots are owned"} {}
};

/// Head word of an owner slot: the newest retired node with bit 0 set while the owner
/// is active.
constexpr std::uintptr_t kActiveBit = 1;

struct alignas(kCacheLine) OwnerSlot {
  std::atomic<std::uintptr_t> head{0};
  std::atomic<Word> access{0};
  std::atomic<bool> owned{false};
};

/**
 * @brief Hyaline-1: one slot per thread, wait-free enter and leave.
 *
 * The owner bit shares the head word with the list pointer, so a retirer can only
 * insert into a slot whose owner is active at the instant of its compare-and-swap.
 * With `Robust` set this is Hyaline-1S.
 */
template <bool Robust, class Hooks = NoStepHooks>
class BasicHyaline1
{
 public:
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
    friend BasicHyaline1;

    std::size_t slot_{0};
    Handle handle_{nullptr};
    bool active_{false};
    bool attached_{false};
    LocalBatch batch_{};
    Word alloc_counter_{0};
  };

  BasicHyaline1(const Hyaline1Options &options, FreeFn free_fn, void *user)
      : options_{options},
        capacity_{options.capacity},
        slots_{std::make_unique<OwnerSlot[]>(options.capacity)},
        counting_{free_fn, user, options.batch_min},
        clock_{options.freq}
  {
    if (capacity_ == 0) throw std::invalid_argument{"capacity must be positive"};
  }

  BasicHyaline1(const BasicHyaline1 &) = delete;
  auto operator=(const BasicHyaline1 &) -> BasicHyaline1 & = delete;

  /*####################################################################################
   * Thread-level interface
   *##################################################################################*/

  /// Claims a free slot. Throws SlotExhausted.
  Thread
  Attach()
  {
    Thread t;
    t.slot_ = AllocateSlot();
    t.attached_ = true;
    return t;
  }

  void
  Detach(Thread &t)
  {
    assert(!t.active_);
    Flush(t);
    if (t.attached_) ReleaseSlot(t.slot_);
    t.attached_ = false;
  }

  void
  Enter(Thread &t)
  {
    t.handle_ = EnterSlot(t.slot_);
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
                              return TouchOwned<Hooks>(access, era);
                            });
    } else {
      return link.load(std::memory_order_acquire);
    }
  }

  void
  Retire(Thread &t, NodeHeader *node)
  {
    Word birth = 0;
    if constexpr (Robust) birth = SharedWord(node).load(std::memory_order_relaxed);
    t.batch_.Push(node, birth);
    if (t.batch_.size >= SealSize()) RetireLocal(t.batch_);
  }

  void
  Flush(Thread &t)
  {
    if (t.batch_.Empty()) return;
    BatchCounting<Hooks>::Pad(t.batch_, SealSize());
    RetireLocal(t.batch_);
  }

  /*####################################################################################
   * Slot registry
   *##################################################################################*/

  std::size_t
  AllocateSlot()
  {
    for (std::size_t i = 0; i < capacity_; ++i) {
      bool expected = false;
      if (slots_[i].owned.compare_exchange_strong(expected, true, std::memory_order_acq_rel)) {
        return i;
      }
    }
    throw SlotExhausted{};
  }

  /// The slot must be inactive.
  void
  ReleaseSlot(const std::size_t slot)
  {
    if ((slots_[slot].head.load(std::memory_order_acquire) & kActiveBit) != 0) {
      throw std::logic_error{"releasing an active slot"};
    }
    slots_[slot].owned.store(false, std::memory_order_release);
  }

  /*####################################################################################
   * Slot-level operations
   *##################################################################################*/

  /// One store: {active, empty list}.
  Handle
  EnterSlot(const std::size_t slot)
  {
    Hooks::Before(Step::kHeadStore);
    slots_[slot].head.store(kActiveBit, std::memory_order_seq_cst);
    return nullptr;
  }

  /// One exchange, then releases every entry down to and including `handle`.
  void
  LeaveSlot(const std::size_t slot, const Handle handle)
  {
    Hooks::Before(Step::kHeadExchange);
    const auto word = slots_[slot].head.exchange(0, std::memory_order_seq_cst);
    auto *curr = AsNode(word & ~kActiveBit);
    if (curr != nullptr) counting_.Traverse(curr, handle);
  }

  Handle
  TrimSlot(const std::size_t slot, const Handle handle)
  {
    Hooks::Before(Step::kHeadLoad);
    auto *curr = AsNode(slots_[slot].head.load(std::memory_order_seq_cst) & ~kActiveBit);
    if (curr != handle && curr != nullptr) {
      counting_.Traverse(AsNode(SharedWord(curr).load(std::memory_order_acquire)), handle);
    }
    return curr;
  }

  /// Inserts the sealed batch into every active slot, then adds the insertion count
  /// to the batch's own counter.
  void
  RetireBatch(LocalBatch &batch, const std::size_t k)
  {
    assert(batch.size >= k + 1);
    auto *counter = batch.nref_node;
    counter->ref_node = 0;
    SharedWord(counter).store(0, std::memory_order_relaxed);

    Word inserts = 0;
    NodeHeader *curr = batch.first_node;
    for (std::size_t slot = 0; slot < k; ++slot) {
      auto &s = slots_[slot];
      auto *following = BatchNext(curr);
      bool inserted = false;
      Hooks::Before(Step::kHeadLoad);
      auto word = s.head.load(std::memory_order_seq_cst);
      for (;;) {
        if ((word & kActiveBit) == 0) break;
        if constexpr (Robust) {
          Hooks::Before(Step::kAccessLoad);
          if (s.access.load(std::memory_order_seq_cst) < batch.min_birth) break;
        }
        SharedWord(curr).store(word & ~kActiveBit, std::memory_order_relaxed);
        Hooks::Before(Step::kHeadCas);
        if (s.head.compare_exchange_strong(word, AsWord(curr) | kActiveBit,
                                           std::memory_order_seq_cst)) {
          inserted = true;
          break;
        }
      }
      if (inserted) {
        ++inserts;
        curr = following;
      }
    }
    counting_.Adjust(batch.first_node, 0, inserts);
  }

  Word
  Touch(const std::size_t slot, const Word era)
  {
    return TouchOwned<Hooks>(slots_[slot].access, era);
  }

  /*####################################################################################
   * Introspection
   *##################################################################################*/

  [[nodiscard]] std::uintptr_t
  PeekHead(const std::size_t slot) const
  {
    return slots_[slot].head.load(std::memory_order_acquire);
  }

  [[nodiscard]] Word
  AccessEra(const std::size_t slot) const
  {
    return slots_[slot].access.load(std::memory_order_acquire);
  }

  [[nodiscard]] std::size_t
  Slots() const
  {
    return capacity_;
  }

  [[nodiscard]] std::size_t
  SealSize() const
  {
    return counting_.SealSize(capacity_);
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

 private:
  void
  RetireLocal(LocalBatch &batch)
  {
    batch.Seal();
    RetireBatch(batch, capacity_);
    batch.Reset();
  }

  Hyaline1Options options_;
  std::size_t capacity_;
  std::unique_ptr<OwnerSlot[]> slots_;
  BatchCounting<Hooks> counting_;
  EraClock<Hooks> clock_;
};

using Hyaline1 = BasicHyaline1<false>;
using Hyaline1S = BasicHyaline1<true>;

}  // namespace hyaline

#endif  // HYALINE_CORE_HYALINE1_HPP
