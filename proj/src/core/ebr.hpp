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

#ifndef HYALINE_CORE_EBR_HPP
#define HYALINE_CORE_EBR_HPP

// C++ standard libraries
#include <atomic>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

// local sources
#include "core/hyaline1.hpp"
#include "core/smr_core.hpp"

namespace hyaline
{
struct EbrOptions {
  std::size_t max_threads{128};
  /// Operations per thread between epoch increments.
  std::size_t epochf{150};
  /// Retires per thread between limbo scans.
  std::size_t emptyf{120};
};

/**
 * @brief Epoch-based reclamation with per-thread limbo lists.
 *
 * A node retired in epoch e is freed once every active thread has reserved an epoch
 * greater than e.
 */
class Ebr
{
 public:
  static constexpr Word kIdle = std::numeric_limits<Word>::max();

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

    [[nodiscard]] std::size_t
    LimboSize() const
    {
      return limbo_.size();
    }

   private:
    friend Ebr;

    std::size_t slot_{0};
    bool active_{false};
    bool attached_{false};
    std::size_t ops_{0};
    std::size_t retires_{0};
    std::deque<std::pair<NodeHeader *, Word>> limbo_{};
  };

  Ebr(const EbrOptions &options, FreeFn free_fn, void *user)
      : options_{options},
        reservations_{std::make_unique<Reservation[]>(options.max_threads)},
        free_fn_{free_fn},
        user_{user}
  {
    if (options_.epochf == 0) options_.epochf = 1;
    if (options_.emptyf == 0) options_.emptyf = 1;
  }

  Ebr(const Ebr &) = delete;
  auto operator=(const Ebr &) -> Ebr & = delete;

  ~Ebr()
  {
    for (auto &[node, epoch] : orphans_) free_fn_(node, user_);
  }

  Thread
  Attach()
  {
    for (std::size_t i = 0; i < options_.max_threads; ++i) {
      bool expected = false;
      if (reservations_[i].owned.compare_exchange_strong(expected, true,
                                                         std::memory_order_acq_rel)) {
        Thread t;
        t.slot_ = i;
        t.attached_ = true;
        return t;
      }
    }
    throw SlotExhausted{};
  }

  /// Frees what it can; anything still protected is kept until destruction.
  void
  Detach(Thread &t)
  {
    assert(!t.active_);
    Flush(t);
    if (!t.limbo_.empty()) {
      std::lock_guard lock{orphan_mutex_};
      orphans_.insert(orphans_.end(), t.limbo_.begin(), t.limbo_.end());
      t.limbo_.clear();
    }
    if (t.attached_) reservations_[t.slot_].owned.store(false, std::memory_order_release);
    t.attached_ = false;
  }

  void
  Enter(Thread &t)
  {
    if (++t.ops_ % options_.epochf == 0) epoch_.fetch_add(1, std::memory_order_acq_rel);
    // exchange orders the reservation before the operation's loads
    reservations_[t.slot_].epoch.exchange(epoch_.load(std::memory_order_acquire),
                                          std::memory_order_seq_cst);
    t.active_ = true;
  }

  void
  Leave(Thread &t)
  {
    reservations_[t.slot_].epoch.store(kIdle, std::memory_order_release);
    t.active_ = false;
  }

  void
  Trim(Thread &t)
  {
    Leave(t);
    Enter(t);
  }

  void
  InitNode(Thread &, NodeHeader *)
  {
  }

  std::uintptr_t
  Deref(Thread &, const std::atomic<std::uintptr_t> &link)
  {
    return link.load(std::memory_order_acquire);
  }

  void
  Retire(Thread &t, NodeHeader *node)
  {
    t.limbo_.emplace_back(node, epoch_.load(std::memory_order_acquire));
    if (++t.retires_ % options_.emptyf == 0) Scan(t);
  }

  /// Frees every limbo node that is no longer protected.
  void
  Flush(Thread &t)
  {
    Scan(t);
  }

  /// Smallest reserved epoch, or kIdle if no thread is active.
  [[nodiscard]] Word
  MinReservation() const
  {
    Word min = kIdle;
    for (std::size_t i = 0; i < options_.max_threads; ++i) {
      const auto e = reservations_[i].epoch.load(std::memory_order_seq_cst);
      if (e < min) min = e;
    }
    return min;
  }

  [[nodiscard]] Word
  Epoch() const
  {
    return epoch_.load(std::memory_order_acquire);
  }

  [[nodiscard]] std::size_t
  Slots() const
  {
    return options_.max_threads;
  }

 private:
  struct alignas(kCacheLine) Reservation {
    std::atomic<Word> epoch{kIdle};
    std::atomic<bool> owned{false};
  };

  void
  Scan(Thread &t)
  {
    // entries are appended in epoch order, so the first protected one ends the scan
    const auto min = MinReservation();
    while (!t.limbo_.empty() && t.limbo_.front().second < min) {
      free_fn_(t.limbo_.front().first, user_);
      t.limbo_.pop_front();
    }
  }

  EbrOptions options_;
  alignas(kCacheLine) std::atomic<Word> epoch_{0};
  std::unique_ptr<Reservation[]> reservations_;
  FreeFn free_fn_;
  void *user_;
  std::mutex orphan_mutex_;
  std::vector<std::pair<NodeHeader *, Word>> orphans_;
};

/// Never reclaims during a run; retired nodes are released when the scheme is destroyed.
class NoReclaim
{
 public:
  class Thread
  {
   public:
    [[nodiscard]] bool
    Active() const
    {
      return active_;
    }

   private:
    friend NoReclaim;

    bool active_{false};
    std::vector<NodeHeader *> retired_{};
  };

  NoReclaim(FreeFn free_fn, void *user) : free_fn_{free_fn}, user_{user} {}

  NoReclaim(const NoReclaim &) = delete;
  auto operator=(const NoReclaim &) -> NoReclaim & = delete;

  ~NoReclaim()
  {
    for (auto *node : retained_) free_fn_(node, user_);
  }

  Thread
  Attach()
  {
    return Thread{};
  }

  void
  Detach(Thread &t)
  {
    Flush(t);
  }

  void
  Enter(Thread &t)
  {
    t.active_ = true;
  }

  void
  Leave(Thread &t)
  {
    t.active_ = false;
  }

  void
  Trim(Thread &)
  {
  }

  void
  InitNode(Thread &, NodeHeader *)
  {
  }

  std::uintptr_t
  Deref(Thread &, const std::atomic<std::uintptr_t> &link)
  {
    return link.load(std::memory_order_acquire);
  }

  void
  Retire(Thread &t, NodeHeader *node)
  {
    t.retired_.push_back(node);
  }

  void
  Flush(Thread &t)
  {
    std::lock_guard lock{mutex_};
    retained_.insert(retained_.end(), t.retired_.begin(), t.retired_.end());
    t.retired_.clear();
  }

  [[nodiscard]] std::size_t
  Slots() const
  {
    return 0;
  }

 private:
  FreeFn free_fn_;
  void *user_;
  std::mutex mutex_;
  std::vector<NodeHeader *> retained_;
};

}  // namespace hyaline

#endif  // HYALINE_CORE_EBR_HPP
