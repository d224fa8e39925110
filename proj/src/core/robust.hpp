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

#ifndef HYALINE_CORE_ROBUST_HPP
#define HYALINE_CORE_ROBUST_HPP

// C++ standard libraries
#include <atomic>
#include <cstdint>

// local sources
#include "core/smr_core.hpp"

namespace hyaline
{
/**
 * @brief Global allocation era; every `freq`-th allocation of a thread ticks it.
 *
 * Eras are 64-bit on every build and are assumed never to overflow.
 */
template <class Hooks = NoStepHooks>
class EraClock
{
 public:
  explicit EraClock(const Word freq) : freq_{freq == 0 ? 1 : freq} {}

  [[nodiscard]] Word
  Now() const
  {
    Hooks::Before(Step::kEraLoad);
    return era_.load(std::memory_order_seq_cst);
  }

  /// Stamps `node` with its birth era; `alloc_counter` is the caller's own counter.
  Word
  InitNode(NodeHeader *node, Word &alloc_counter)
  {
    if (alloc_counter++ % freq_ == 0) {
      Hooks::Before(Step::kEraFaa);
      era_.fetch_add(1, std::memory_order_seq_cst);
    }
    const Word birth = Now();
    SharedWord(node).store(birth, std::memory_order_relaxed);
    return birth;
  }

  [[nodiscard]] Word
  Freq() const
  {
    return freq_;
  }

 private:
  alignas(kCacheLine) std::atomic<Word> era_{0};
  Word freq_;
};

/// Raises `access` to `era` unless it already is at least `era`; returns the
/// resulting value. Used when several threads share the slot.
template <class Hooks = NoStepHooks>
Word
TouchShared(std::atomic<Word> &access, const Word era)
{
  for (;;) {
    Hooks::Before(Step::kAccessLoad);
    Word cur = access.load(std::memory_order_seq_cst);
    if (cur >= era) return cur;
    Hooks::Before(Step::kAccessCas);
    if (access.compare_exchange_strong(cur, era, std::memory_order_seq_cst)) return era;
  }
}

/// Owner-exclusive slots only need a plain store.
template <class Hooks = NoStepHooks>
Word
TouchOwned(std::atomic<Word> &access, const Word era)
{
  Hooks::Before(Step::kAccessStore);
  access.store(era, std::memory_order_seq_cst);
  return era;
}

/**
 * @brief Read-validate loop shared by Hyaline-S and Hyaline-1S.
 *
 * Returns a value of `link` read while the slot's access era equalled the global
 * era, so a batch holding the returned node cannot skip this slot.
 */
template <class Hooks, class TouchFn>
std::uintptr_t
DerefValidated(const std::atomic<std::uintptr_t> &link,
               std::atomic<Word> &access_era,
               const EraClock<Hooks> &clock,
               TouchFn &&touch)
{
  Hooks::Before(Step::kAccessLoad);
  Word access = access_era.load(std::memory_order_seq_cst);
  for (;;) {
    Hooks::Before(Step::kLinkLoad);
    const auto value = link.load(std::memory_order_seq_cst);
    const Word era = clock.Now();
    if (access == era) return value;
    access = touch(access_era, era);
  }
}

}  // namespace hyaline

#endif  // HYALINE_CORE_ROBUST_HPP
