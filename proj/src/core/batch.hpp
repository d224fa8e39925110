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

#ifndef HYALINE_CORE_BATCH_HPP
#define HYALINE_CORE_BATCH_HPP

// C++ standard libraries
#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <limits>

// local sources
#include "core/smr_core.hpp"

namespace hyaline
{
/**
 * @brief Reference counting over sealed batches, shared by all Hyaline variants.
 *
 * Owns the user's deallocation callback and frees whole batches once their counter
 * wraps back to zero.
 *
 * @tparam Hooks a step-hook policy; production code uses NoStepHooks.
 */
template <class Hooks = NoStepHooks>
class BatchCounting
{
 public:
  /// What one traversal did: batches freed and list entries visited.
  struct TraverseResult {
    std::size_t freed{0};
    std::size_t visited{0};
  };

  BatchCounting(FreeFn free_fn, void *user, const std::size_t batch_min)
      : free_fn_{free_fn}, user_{user}, batch_min_{std::max<std::size_t>(batch_min, 1)}
  {
  }

  /// Nodes a batch must hold before it is retired with `k` slots.
  [[nodiscard]] std::size_t
  SealSize(const std::size_t k) const
  {
    return std::max(batch_min_, k + 1);
  }

  [[nodiscard]] std::uint64_t
  BatchesFreed() const
  {
    return batches_freed_.load(std::memory_order_relaxed);
  }

  /**
   * @brief Adds `adjs_units` times the batch's Adjs plus `extra` to the counter of
   * `node`'s batch; frees the batch when the sum wraps to zero.
   *
   * A null `node` has no effect (a slot may be active with an empty list).
   * @retval true if this call freed the batch.
   */
  bool
  Adjust(NodeHeader *node, const Word adjs_units, const Word extra)
  {
    if (node == nullptr) return false;
    Hooks::Before(Step::kCounterFaa);
    auto *counter = CounterOf(node);
    const Word val = WrapAdd(adjs_units * BatchAdjs(counter), extra);
    const Word prev = SharedWord(counter).fetch_add(val, std::memory_order_acq_rel);
    if (WrapAdd(prev, val) != 0) return false;
    FreeBatch(counter);
    return true;
  }

  /**
   * @brief Walks a retirement sublist from `next` down to and including `handle`,
   * releasing one reference per visited entry.
   */
  TraverseResult
  Traverse(NodeHeader *next, const NodeHeader *handle)
  {
    TraverseResult result;
    NodeHeader *curr = nullptr;
    do {
      curr = next;
      if (curr == nullptr) break;
      Hooks::Before(Step::kCounterFaa);
      // both words are immutable while we still hold a reference
      next = AsNode(SharedWord(curr).load(std::memory_order_acquire));
      auto *counter = CounterOf(curr);
      ++result.visited;
      if (SharedWord(counter).fetch_sub(1, std::memory_order_acq_rel) == 1) {
        FreeBatch(counter);
        ++result.freed;
      }
    } while (curr != handle);
    return result;
  }

  /// Frees every member of the batch, counter node last.
  void
  FreeBatch(NodeHeader *counter)
  {
    auto *curr = BatchNext(counter);
    while (curr != counter) {
      auto *next = BatchNext(curr);
      Dispose(curr);
      curr = next;
    }
    Dispose(counter);
    batches_freed_.fetch_add(1, std::memory_order_relaxed);
  }

  /// Pads a non-empty batch with library nodes up to `target` members.
  static void
  Pad(LocalBatch &batch, const std::size_t target)
  {
    while (batch.size < target) {
      batch.Push(new NodeHeader{}, std::numeric_limits<Word>::max(), true);
    }
  }

 private:
  void
  Dispose(NodeHeader *node)
  {
    if (IsLibraryNode(node)) {
      delete node;
    } else {
      free_fn_(node, user_);
    }
  }

  FreeFn free_fn_;
  void *user_;
  std::size_t batch_min_;
  std::atomic<std::uint64_t> batches_freed_{0};
};

}  // namespace hyaline

#endif  // HYALINE_CORE_BATCH_HPP
