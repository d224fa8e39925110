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

#ifndef HYALINE_CORE_SMR_CORE_HPP
#define HYALINE_CORE_SMR_CORE_HPP

// C++ standard libraries
#include <array>
#include <atomic>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <new>
#include <stdexcept>

// local sources
#include "hyaline/hyaline.h"

#if !defined(__x86_64__) && !defined(__aarch64__)
#error "a native two-word compare-and-swap is required"
#endif

namespace hyaline
{
/*######################################################################################
 * Counter arithmetic
 *####################################################################################*/

/// Batch counters and head reference counts are native unsigned words.
using Word = std::uint64_t;

static_assert(sizeof(std::uintptr_t) == sizeof(Word), "64-bit targets only");

/**
 * @brief The wrap-around constant that cancels after `k` additions.
 *
 * Returns floor((2^N - 1) / k) + 1 reduced modulo 2^N, where N is the bit width of
 * `W`. For a power-of-two `k` this is 2^(N - log2 k), and k * result == 0 mod 2^N.
 */
template <class W>
constexpr W
AdjsFor(const W k)
{
  static_assert(std::numeric_limits<W>::is_integer && !std::numeric_limits<W>::is_signed);
  return static_cast<W>(std::numeric_limits<W>::max() / k + 1U);
}

/// Runtime form with an explicit word width (32 or 64). Throws std::invalid_argument
/// for a zero or non-power-of-two `k`, or an unsupported width.
Word ComputeAdjs(Word k, unsigned word_bits);

/// The only arithmetic applied to batch counters.
constexpr Word
WrapAdd(const Word counter, const Word delta)
{
  return counter + delta;
}

constexpr std::uint32_t
WrapAdd32(const std::uint32_t counter, const std::uint32_t delta)
{
  return counter + delta;
}

/// Next power of two >= v (v >= 1).
constexpr std::size_t
NextPow2(const std::size_t v)
{
  return std::bit_ceil(v);
}

/*######################################################################################
 * Node header and local batches
 *####################################################################################*/

using NodeHeader = ::hyl_node;
using FreeFn = ::hyl_free_fn;

static_assert(sizeof(NodeHeader) == 3 * sizeof(Word));

/// Bit 0 of batch_next: the node was allocated by the library to pad a batch.
constexpr std::uintptr_t kLibraryNodeBit = 1;

inline std::atomic_ref<std::uintptr_t>
SharedWord(NodeHeader *node)
{
  return std::atomic_ref<std::uintptr_t>{node->link};
}

inline NodeHeader *
AsNode(const std::uintptr_t word)
{
  return reinterpret_cast<NodeHeader *>(word);
}

inline std::uintptr_t
AsWord(const NodeHeader *node)
{
  return reinterpret_cast<std::uintptr_t>(node);
}

inline NodeHeader *
BatchNext(const NodeHeader *node)
{
  return AsNode(node->batch_next & ~kLibraryNodeBit);
}

inline bool
IsLibraryNode(const NodeHeader *node)
{
  return (node->batch_next & kLibraryNodeBit) != 0;
}

/// Counter node of the batch `node` belongs to. Only valid for non-counter nodes.
inline NodeHeader *
CounterOf(const NodeHeader *node)
{
  return AsNode(node->ref_node);
}

/// The counter node keeps its batch's Adjs in the ref_node word.
inline Word
BatchAdjs(const NodeHeader *counter)
{
  return counter->ref_node;
}

/**
 * @brief Nodes retired by one thread that have not been handed to the slots yet.
 *
 * The first node pushed becomes the counter node; later nodes are prepended, so
 * first_node -> ... -> nref_node, and sealing closes the cycle back to first_node.
 */
struct LocalBatch {
  NodeHeader *nref_node{nullptr};
  NodeHeader *first_node{nullptr};
  Word min_birth{std::numeric_limits<Word>::max()};
  std::size_t size{0};

  [[nodiscard]] bool
  Empty() const
  {
    return size == 0;
  }

  /// `birth` is the node's birth era (ignored by non-robust schemes).
  void
  Push(NodeHeader *node, const Word birth, const bool library_node = false)
  {
    const std::uintptr_t tag = library_node ? kLibraryNodeBit : 0;
    if (size == 0) {
      nref_node = node;
      first_node = node;
      node->batch_next = tag;
    } else {
      node->ref_node = AsWord(nref_node);
      node->batch_next = AsWord(first_node) | tag;
      first_node = node;
    }
    if (birth < min_birth) min_birth = birth;
    ++size;
  }

  /// Closes the cycle; afterwards BatchNext(nref_node) == first_node.
  void
  Seal()
  {
    nref_node->batch_next = (nref_node->batch_next & kLibraryNodeBit) | AsWord(first_node);
  }

  void
  Reset()
  {
    *this = LocalBatch{};
  }
};

/*######################################################################################
 * Two-word slot head
 *####################################################################################*/

/// [href, hptr]: threads active in the slot and the newest retired node.
struct HeadTuple {
  Word href{0};
  std::uintptr_t hptr{0};

  friend bool operator==(const HeadTuple &, const HeadTuple &) = default;
};

/**
 * @brief A HeadTuple updated with a native two-word compare-and-swap.
 *
 * Loads read the two words separately; every update goes through the two-word CAS,
 * which validates whatever was loaded. Callers only base unvalidated decisions on a
 * single word (e.g. href == 0).
 */
class alignas(16) AtomicHead
{
 public:
  AtomicHead() = default;
  AtomicHead(const AtomicHead &) = delete;
  auto operator=(const AtomicHead &) -> AtomicHead & = delete;

  [[nodiscard]] HeadTuple
  Load() const
  {
    HeadTuple h;
    h.href = std::atomic_ref<const Word>{words_[0]}.load(std::memory_order_seq_cst);
    h.hptr = std::atomic_ref<const Word>{words_[1]}.load(std::memory_order_seq_cst);
    return h;
  }

  /// Sequentially consistent; on failure `expected` receives the current value.
  bool
  CompareExchange(HeadTuple &expected, const HeadTuple desired)
  {
    const auto want = Pack(expected);
    const auto prev = __sync_val_compare_and_swap(Raw(), want, Pack(desired));
    if (prev == want) return true;
    expected = Unpack(prev);
    return false;
  }

  HeadTuple
  Exchange(const HeadTuple desired)
  {
    auto cur = Load();
    while (!CompareExchange(cur, desired)) {
    }
    return cur;
  }

  /// Two-word fetch-add on href, emulated with the CAS loop.
  HeadTuple
  FetchAddRef(const Word delta)
  {
    auto cur = Load();
    while (!CompareExchange(cur, HeadTuple{cur.href + delta, cur.hptr})) {
    }
    return cur;
  }

 private:
  using Pair = unsigned __int128;

  static Pair
  Pack(const HeadTuple h)
  {
    return (static_cast<Pair>(h.hptr) << 64U) | h.href;
  }

  static HeadTuple
  Unpack(const Pair p)
  {
    return HeadTuple{static_cast<Word>(p), static_cast<std::uintptr_t>(p >> 64U)};
  }

  Pair *
  Raw()
  {
    return reinterpret_cast<Pair *>(words_.data());
  }

  alignas(16) std::array<Word, 2> words_{};
};

/*######################################################################################
 * Slot directory
 *####################################################################################*/

/// Where a slot lives: directory entry and offset within that entry's array.
struct SlotLocation {
  unsigned index;
  std::size_t offset;

  friend bool operator==(const SlotLocation &, const SlotLocation &) = default;
};

/// Entry 0 holds slots [0, kmin); entry j >= 1 holds [2^(j-1) kmin, 2^j kmin).
constexpr SlotLocation
LocateSlot(const std::size_t slot, const std::size_t kmin)
{
  // bit_width(q) == log2(q) + 1 with log2(0) == -1
  const auto index = static_cast<unsigned>(std::bit_width(slot / kmin));
  const std::size_t start = index == 0 ? 0 : (kmin << (index - 1));
  return SlotLocation{index, slot - start};
}

/// First slot held by directory entry `index`.
constexpr std::size_t
EntryStart(const unsigned index, const std::size_t kmin)
{
  return index == 0 ? 0 : (kmin << (index - 1));
}

/**
 * @brief Fixed table of slot arrays; the slot count doubles on each growth.
 *
 * Arrays are never moved or freed before the directory itself is destroyed, so a
 * reference to a slot stays valid for the directory's lifetime.
 */
template <class SlotT>
class SlotDirectory
{
 public:
  static constexpr unsigned kEntries = 64;

  explicit SlotDirectory(const std::size_t kmin) : kmin_{kmin}, k_{kmin}
  {
    if (kmin == 0 || !std::has_single_bit(kmin)) {
      throw std::invalid_argument{"slot count must be a power of two"};
    }
    dir_[0].store(new SlotT[kmin], std::memory_order_relaxed);
  }

  SlotDirectory(const SlotDirectory &) = delete;
  auto operator=(const SlotDirectory &) -> SlotDirectory & = delete;

  ~SlotDirectory()
  {
    for (auto &entry : dir_) delete[] entry.load(std::memory_order_relaxed);
  }

  [[nodiscard]] std::size_t
  Size() const
  {
    return k_.load(std::memory_order_acquire);
  }

  [[nodiscard]] std::size_t
  Kmin() const
  {
    return kmin_;
  }

  SlotT &
  operator[](const std::size_t slot)
  {
    const auto loc = LocateSlot(slot, kmin_);
    auto *array = dir_[loc.index].load(std::memory_order_acquire);
    assert(array != nullptr);
    return array[loc.offset];
  }

  /**
   * @brief Doubles the slot count from `observed`, unless someone already did.
   *
   * The new array is installed with one CAS; a loser discards its buffer.
   * @return the slot count after the call.
   */
  std::size_t
  Grow(const std::size_t observed)
  {
    const auto index = LocateSlot(observed, kmin_).index;
    if (index >= kEntries) throw std::length_error{"slot directory exhausted"};
    if (dir_[index].load(std::memory_order_acquire) == nullptr) {
      auto *fresh = new SlotT[observed];
      SlotT *expected = nullptr;
      if (!dir_[index].compare_exchange_strong(expected, fresh, std::memory_order_acq_rel)) {
        delete[] fresh;
        discarded_.fetch_add(1, std::memory_order_relaxed);
      }
    }
    auto cur = observed;
    k_.compare_exchange_strong(cur, observed * 2, std::memory_order_acq_rel);
    return k_.load(std::memory_order_acquire);
  }

  /// Buffers allocated by losing Grow() calls.
  [[nodiscard]] std::size_t
  Discarded() const
  {
    return discarded_.load(std::memory_order_relaxed);
  }

  [[nodiscard]] bool
  EntryInstalled(const unsigned index) const
  {
    return dir_[index].load(std::memory_order_acquire) != nullptr;
  }

 private:
  const std::size_t kmin_;
  std::atomic<std::size_t> k_;
  std::atomic<std::size_t> discarded_{0};
  std::array<std::atomic<SlotT *>, kEntries> dir_{};
};

/*######################################################################################
 * Step hooks
 *####################################################################################*/

/// Shared-memory steps of the schemes, in the granularity of the interleaving model.
enum class Step : unsigned char {
  kHeadLoad,
  kHeadCas,
  kHeadStore,
  kHeadExchange,
  kCounterFaa,
  kAccessLoad,
  kAccessCas,
  kAccessStore,
  kEraLoad,
  kEraFaa,
  kAcksLoad,
  kAcksFaa,
  kLinkLoad,
  kUnlink,
};

/// Production hooks: nothing happens between steps.
struct NoStepHooks {
  static void
  Before(Step)
  {
  }
};

inline constexpr std::size_t kCacheLine = 128;

}  // namespace hyaline

#endif  // HYALINE_CORE_SMR_CORE_HPP
