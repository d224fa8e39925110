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

#ifndef HYALINE_DS_LIST_HPP
#define HYALINE_DS_LIST_HPP

// C++ standard libraries
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>

// local sources
#include "ds/canary.hpp"

namespace hyaline::ds
{
constexpr std::uintptr_t kMarkBit = 1;

inline ListNode *
Unmarked(const std::uintptr_t word)
{
  return reinterpret_cast<ListNode *>(word & ~kMarkBit);
}

inline bool
IsMarked(const std::uintptr_t word)
{
  return (word & kMarkBit) != 0;
}

inline std::uintptr_t
AsLink(const ListNode *node)
{
  return reinterpret_cast<std::uintptr_t>(node);
}

/// Compare-and-swap failures after which an operation leaves, re-enters and restarts.
constexpr std::size_t kDefaultRestartAfter = 1000;

/**
 * @brief Harris-Michael sorted list operations over an externally owned head.
 *
 * Searches unlink marked nodes as they pass them and the thread whose unlink succeeds
 * retires the node at once. Every operation runs inside its own enter/leave pair.
 *
 * @tparam Scheme a reclamation scheme (Hyaline, Hyaline1, Ebr, ...).
 */
template <class Scheme>
class ListOps
{
 public:
  using Thread = typename Scheme::Thread;

  ListOps(Scheme &scheme, SafetyLedger &ledger, const std::size_t restart_after)
      : scheme_{scheme}, ledger_{ledger}, restart_after_{restart_after == 0 ? 1 : restart_after}
  {
  }

  bool
  Insert(Thread &t, std::atomic<std::uintptr_t> &head, const std::int64_t key,
         const std::int64_t value)
  {
    Op op{*this, t};
    ListNode *fresh = nullptr;
    bool inserted = false;
    for (;;) {
      Window w;
      const auto found = Find(op, head, key, w);
      if (!found.has_value()) break;
      if (*found) break;
      if (fresh == nullptr) {
        fresh = new ListNode{};
        fresh->key = key;
        fresh->value = value;
        scheme_.InitNode(t, &fresh->hdr);
      }
      fresh->link.store(AsLink(w.curr), std::memory_order_relaxed);
      auto expected = AsLink(w.curr);
      if (w.prev->compare_exchange_strong(expected, AsLink(fresh), std::memory_order_acq_rel)) {
        inserted = true;
        break;
      }
      op.Failed();
    }
    if (!inserted) delete fresh;
    return inserted;
  }

  bool
  Remove(Thread &t, std::atomic<std::uintptr_t> &head, const std::int64_t key)
  {
    Op op{*this, t};
    for (;;) {
      Window w;
      const auto found = Find(op, head, key, w);
      if (!found.has_value() || !*found) return false;
      auto next = w.next;
      if (!w.curr->link.compare_exchange_strong(next, next | kMarkBit,
                                                std::memory_order_acq_rel)) {
        op.Failed();
        continue;
      }
      auto expected = AsLink(w.curr);
      if (w.prev->compare_exchange_strong(expected, next, std::memory_order_acq_rel)) {
        RetireNode(t, w.curr);
      } else {
        Find(op, head, key, w);
      }
      return true;
    }
  }

  std::optional<std::int64_t>
  Get(Thread &t, std::atomic<std::uintptr_t> &head, const std::int64_t key)
  {
    Op op{*this, t};
    Window w;
    const auto found = Find(op, head, key, w);
    if (!found.has_value() || !*found) return std::nullopt;
    return w.value;
  }

  /// Deletes every node still linked; no thread may be using the list.
  static void
  Destroy(std::atomic<std::uintptr_t> &head)
  {
    auto *curr = Unmarked(head.load(std::memory_order_relaxed));
    while (curr != nullptr) {
      auto *next = Unmarked(curr->link.load(std::memory_order_relaxed));
      delete curr;
      curr = next;
    }
    head.store(0, std::memory_order_relaxed);
  }

 private:
  /// One data-structure operation: enter on construction, leave on destruction.
  class Op
  {
   public:
    Op(ListOps &ops, Thread &t) : ops_{ops}, t_{t} { ops_.scheme_.Enter(t_); }

    ~Op() { ops_.scheme_.Leave(t_); }

    Op(const Op &) = delete;
    auto operator=(const Op &) -> Op & = delete;

    void
    Failed()
    {
      if (++failures_ < ops_.restart_after_) return;
      failures_ = 0;
      ops_.scheme_.Leave(t_);
      ops_.scheme_.Enter(t_);
    }

    Thread &
    T()
    {
      return t_;
    }

   private:
    ListOps &ops_;
    Thread &t_;
    std::size_t failures_{0};
  };

  struct Window {
    std::atomic<std::uintptr_t> *prev{nullptr};
    ListNode *curr{nullptr};
    std::uintptr_t next{0};
    std::int64_t value{0};
  };

  bool
  Alive(const ListNode *node)
  {
    if (node->canary.load(std::memory_order_relaxed) == kLiveMagic) return true;
    ledger_.ReportUseAfterFree();
    return false;
  }

  void
  RetireNode(Thread &t, ListNode *node)
  {
    ledger_.retired.fetch_add(1, std::memory_order_relaxed);
    scheme_.Retire(t, &node->hdr);
  }

  /**
   * @brief Positions `w` at the first node with key >= `key`.
   *
   * @return whether that node holds `key`, or nullopt after a detected violation.
   */
  std::optional<bool>
  Find(Op &op, std::atomic<std::uintptr_t> &head, const std::int64_t key, Window &w)
  {
    auto &t = op.T();
  retry:
    if (ledger_.abort.load(std::memory_order_relaxed)) return std::nullopt;
    w.prev = &head;
    w.curr = Unmarked(scheme_.Deref(t, head));
    for (;;) {
      if (w.curr == nullptr) return false;
      if (!Alive(w.curr)) return std::nullopt;
      w.next = scheme_.Deref(t, w.curr->link);
      if (w.prev->load(std::memory_order_acquire) != AsLink(w.curr)) {
        op.Failed();
        goto retry;
      }
      if (!IsMarked(w.next)) {
        const auto ckey = w.curr->key;
        w.value = w.curr->value;
        if (!Alive(w.curr)) return std::nullopt;
        if (ckey >= key) return ckey == key;
        w.prev = &w.curr->link;
      } else {
        auto expected = AsLink(w.curr);
        const auto succ = w.next & ~kMarkBit;
        if (!w.prev->compare_exchange_strong(expected, succ, std::memory_order_acq_rel)) {
          op.Failed();
          goto retry;
        }
        RetireNode(t, w.curr);
      }
      w.curr = Unmarked(w.next);
    }
  }

  Scheme &scheme_;
  SafetyLedger &ledger_;
  std::size_t restart_after_;
};

/// A single sorted list.
template <class Scheme>
class List
{
 public:
  using Thread = typename Scheme::Thread;

  List(Scheme &scheme, SafetyLedger &ledger,
       const std::size_t restart_after = kDefaultRestartAfter)
      : ops_{scheme, ledger, restart_after}
  {
  }

  List(const List &) = delete;
  auto operator=(const List &) -> List & = delete;

  ~List() { ListOps<Scheme>::Destroy(head_); }

  bool
  Insert(Thread &t, const std::int64_t key, const std::int64_t value)
  {
    return ops_.Insert(t, head_, key, value);
  }

  bool
  Remove(Thread &t, const std::int64_t key)
  {
    return ops_.Remove(t, head_, key);
  }

  std::optional<std::int64_t>
  Get(Thread &t, const std::int64_t key)
  {
    return ops_.Get(t, head_, key);
  }

  /// The link a stalled reader dereferences.
  const std::atomic<std::uintptr_t> &
  Entry(std::int64_t) const
  {
    return head_;
  }

 private:
  ListOps<Scheme> ops_;
  std::atomic<std::uintptr_t> head_{0};
};

/// Fixed-size table of sorted lists; bucket = key mod bucket count.
template <class Scheme>
class HashMap
{
 public:
  using Thread = typename Scheme::Thread;

  static constexpr std::size_t kDefaultBuckets = std::size_t{1} << 14U;

  HashMap(Scheme &scheme, SafetyLedger &ledger,
          const std::size_t restart_after = kDefaultRestartAfter,
          const std::size_t buckets = kDefaultBuckets)
      : ops_{scheme, ledger, restart_after},
        buckets_{buckets},
        heads_{std::make_unique<std::atomic<std::uintptr_t>[]>(buckets)}
  {
  }

  HashMap(const HashMap &) = delete;
  auto operator=(const HashMap &) -> HashMap & = delete;

  ~HashMap()
  {
    for (std::size_t i = 0; i < buckets_; ++i) ListOps<Scheme>::Destroy(heads_[i]);
  }

  bool
  Insert(Thread &t, const std::int64_t key, const std::int64_t value)
  {
    return ops_.Insert(t, Bucket(key), key, value);
  }

  bool
  Remove(Thread &t, const std::int64_t key)
  {
    return ops_.Remove(t, Bucket(key), key);
  }

  std::optional<std::int64_t>
  Get(Thread &t, const std::int64_t key)
  {
    return ops_.Get(t, Bucket(key), key);
  }

  const std::atomic<std::uintptr_t> &
  Entry(const std::int64_t key) const
  {
    return heads_[Index(key)];
  }

  [[nodiscard]] std::size_t
  Buckets() const
  {
    return buckets_;
  }

 private:
  [[nodiscard]] std::size_t
  Index(const std::int64_t key) const
  {
    return static_cast<std::size_t>(static_cast<std::uint64_t>(key) % buckets_);
  }

  std::atomic<std::uintptr_t> &
  Bucket(const std::int64_t key)
  {
    return heads_[Index(key)];
  }

  ListOps<Scheme> ops_;
  std::size_t buckets_;
  std::unique_ptr<std::atomic<std::uintptr_t>[]> heads_;
};

}  // namespace hyaline::ds

#endif  // HYALINE_DS_LIST_HPP
