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

#ifndef HYALINE_DS_CANARY_HPP
#define HYALINE_DS_CANARY_HPP

// C++ standard libraries
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>

// local sources
#include "core/smr_core.hpp"

namespace hyaline::ds
{
constexpr std::uint64_t kLiveMagic = 0x4879616c696e6521ULL;
constexpr std::uint64_t kDeadMagic = 0xdeadbeefdeadbeefULL;

/// List node; the reclamation header must stay the first member.
struct ListNode {
  NodeHeader hdr{};
  std::atomic<std::uint64_t> canary{kLiveMagic};
  std::int64_t key{0};
  std::int64_t value{0};
  /// Successor address; bit 0 marks this node as logically deleted.
  std::atomic<std::uintptr_t> link{0};
};

inline ListNode *
FromHeader(NodeHeader *hdr)
{
  return reinterpret_cast<ListNode *>(hdr);
}

/// Shared counters of the magic-word detector and the retire/free ledger.
struct SafetyLedger {
  std::atomic<std::uint64_t> retired{0};
  std::atomic<std::uint64_t> freed{0};
  std::atomic<std::uint64_t> use_after_free{0};
  std::atomic<std::uint64_t> double_free{0};
  /// Raised on the first violation; workers stop at their next operation.
  std::atomic<bool> abort{false};

  void
  ReportUseAfterFree()
  {
    use_after_free.fetch_add(1, std::memory_order_relaxed);
    abort.store(true, std::memory_order_relaxed);
  }

  void
  ReportDoubleFree()
  {
    double_free.fetch_add(1, std::memory_order_relaxed);
    abort.store(true, std::memory_order_relaxed);
  }
};

/// Per-thread free counter of the calling thread, if the harness installed one.
inline thread_local std::uint64_t *tls_free_counter = nullptr;

/**
 * @brief Freed nodes are poisoned and parked here before going back to the allocator,
 * so a late reader still finds the dead magic word.
 */
class Quarantine
{
 public:
  static constexpr std::size_t kCapacity = 1024;

  Quarantine() = default;
  Quarantine(const Quarantine &) = delete;
  auto operator=(const Quarantine &) -> Quarantine & = delete;

  ~Quarantine()
  {
    for (auto *node : ring_) delete node;
  }

  void
  Park(ListNode *node)
  {
    delete ring_[next_];
    ring_[next_] = node;
    next_ = (next_ + 1) % kCapacity;
  }

 private:
  std::array<ListNode *, kCapacity> ring_{};
  std::size_t next_{0};
};

inline thread_local Quarantine tls_quarantine{};

/// Deallocation callback handed to the reclamation schemes; `user` is a SafetyLedger.
inline void
FreeListNode(NodeHeader *hdr, void *user)
{
  auto *ledger = static_cast<SafetyLedger *>(user);
  auto *node = FromHeader(hdr);
  if (node->canary.exchange(kDeadMagic, std::memory_order_relaxed) != kLiveMagic) {
    ledger->ReportDoubleFree();
    return;
  }
  ledger->freed.fetch_add(1, std::memory_order_relaxed);
  if (tls_free_counter != nullptr) ++*tls_free_counter;
  tls_quarantine.Park(node);
}

}  // namespace hyaline::ds

#endif  // HYALINE_DS_CANARY_HPP
