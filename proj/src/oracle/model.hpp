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

#ifndef HYALINE_ORACLE_MODEL_HPP
#define HYALINE_ORACLE_MODEL_HPP

// C++ standard libraries
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyaline::oracle
{
/*######################################################################################
 * Configuration and programs
 *####################################################################################*/

enum class Variant : std::uint8_t { kHyaline, kHyaline1, kHyalineS, kHyaline1S };

inline constexpr int kMaxThreads = 4;
inline constexpr int kMaxSlots = 4;
inline constexpr int kMaxBatches = 3;
/// Nodes per batch: one per slot plus the counter node.
inline constexpr int kNodesPerBatch = kMaxSlots + 1;

[[nodiscard]] bool IsRobust(Variant v);
[[nodiscard]] bool IsSingle(Variant v);
[[nodiscard]] std::string_view VariantName(Variant v);
[[nodiscard]] std::optional<Variant> VariantFromName(std::string_view name);

enum class OpKind : std::uint8_t { kEnter, kLeave, kTrim, kRetire, kInitNode, kDeref, kStall, kGrow };

struct Op {
  OpKind kind;
  /// Slot for kEnter, batch for kRetire / kInitNode / kDeref.
  std::uint8_t arg{0};
};

struct Config {
  Variant variant{Variant::kHyaline};
  /// Worker threads.
  int threads{2};
  int slots{1};
  int batches{1};
  /// Extra threads that enter slot 0, dereference batch 0 and never return.
  int stalled{0};
  /// Workers trim once before leaving.
  bool trim{false};
  std::uint64_t max_states{2'000'000};
  /// Deliberately broken retire: the final empty-slot adjustment is one Adjs short.
  bool mutate_skip_adjs{false};
};

struct Program {
  int slots{1};
  std::vector<std::vector<Op>> threads;
  /// Threads listed here are stubs (excluded from completeness checks).
  std::vector<bool> stub;
};

/**
 * @brief The standard program of a configuration.
 *
 * Worker t enters slot t mod k (its own slot for Hyaline-1), retires every batch b with
 * b mod threads == t, optionally trims, then leaves. Robust workers stamp their batches
 * first and dereference batch t mod batches after entering. Hyaline-1 uses
 * max(slots, all threads) slots since every thread owns one.
 */
Program BuildProgram(const Config &config);

/// Slots the standard program runs with.
int EffectiveSlots(const Config &config);

/*######################################################################################
 * Invariants
 *####################################################################################*/

enum Invariant : std::uint32_t {
  kExactlyOnceFree = 1U << 0U,
  kNoFreeWhileHandleLive = 1U << 1U,
  kNoAccessAfterFree = 1U << 2U,
  kWrapSumZeroAtFree = 1U << 3U,
  kAdjsCountEqualsK = 1U << 4U,
  kCasFailureImpliesConcurrentSuccess = 1U << 5U,
  kStepCountBounds = 1U << 6U,
  kAcksBalanced = 1U << 7U,
};

inline constexpr std::uint32_t kAllInvariants = 0xffU;

/// Looks up an invariant by its registered name.
[[nodiscard]] std::optional<Invariant> InvariantFromName(std::string_view name);
[[nodiscard]] std::string_view InvariantName(Invariant inv);
[[nodiscard]] std::vector<std::string_view> InvariantNames();

/*######################################################################################
 * State
 *####################################################################################*/

using NodeId = std::int8_t;
inline constexpr NodeId kNull = -1;

constexpr NodeId
MakeNode(const int batch, const int ordinal)
{
  return static_cast<NodeId>(batch * kNodesPerBatch + ordinal);
}

constexpr int
BatchOf(const NodeId node)
{
  return node / kNodesPerBatch;
}

constexpr int
OrdinalOf(const NodeId node)
{
  return node % kNodesPerBatch;
}

struct SlotState {
  /// Hyaline-1: 0 or 1, the owner bit.
  std::uint64_t href{0};
  NodeId hptr{kNull};
  std::uint64_t access{0};
  std::int64_t acks{0};
  /// Successful head updates so far (ghost).
  std::uint32_t version{0};
};

struct BatchState {
  std::uint64_t counter{0};
  NodeId next[kMaxSlots]{kNull, kNull, kNull, kNull};
  std::uint8_t k{0};
  std::uint64_t adjs{0};
  std::uint64_t birth{0};
  bool born{false};
  bool reachable{false};
  bool unlinked{false};
  bool retired{false};
  /// The retire operation has made its final adjustment (or needed none).
  bool closed{false};
  std::uint8_t frees{0};
  std::int8_t freed_by{-1};
  // ghosts
  std::uint8_t units{0};
  std::uint8_t accounted{0};
};

enum class Phase : std::uint8_t {
  kOpStart,
  kDone,
  kStalled,
  // enter
  kEnterLoad,
  kEnterCas,
  kEnter1Store,
  // leave
  kLeaveLoad,
  kLeaveCas,
  kLeaveAdjust,
  kLeave1Exchange,
  // trim
  kTrimLoad,
  // traversal and robust ack subtraction
  kTraverse,
  kAcksSub,
  // retire
  kRetireUnlink,
  kRetireLoad,
  kRetireAccess,
  kRetireCas,
  kRetirePredAdjust,
  kRetireAcks,
  kRetireFinalAdjust,
  kRetire1Load,
  kRetire1Access,
  kRetire1Cas,
  kRetire1Final,
  // eras
  kEraFaa,
  kEraLoad,
  kDerefAccessLoad,
  kDerefLinkLoad,
  kDerefEraLoad,
  kTouchLoad,
  kTouchCas,
  kTouchStore,
  // growth
  kGrow,
};

struct ThreadState {
  std::uint8_t pc{0};
  Phase phase{Phase::kOpStart};
  bool active{false};
  std::uint8_t slot{0};
  NodeId handle{kNull};
  // locals
  std::uint64_t h_href{0};
  NodeId h_hptr{kNull};
  NodeId curr{kNull};
  NodeId next{kNull};
  std::uint32_t seen_version{0};
  std::uint8_t rslot{0};
  std::uint8_t ord{0};
  bool do_adj{false};
  std::uint64_t empty{0};
  std::uint64_t inserts{0};
  NodeId pred{kNull};
  std::uint64_t pred_href{0};
  NodeId cursor{kNull};
  NodeId trav_handle{kNull};
  std::uint64_t visited{0};
  std::uint64_t access_local{0};
  std::uint64_t era_local{0};
  bool link_value{false};
  // ghosts
  std::uint8_t may_hold{0};
  std::uint8_t op_steps{0};
  std::uint8_t head_updates{0};
  std::uint8_t inserted_during{0};
};

struct State {
  SlotState slots[kMaxSlots]{};
  std::uint8_t k{1};
  BatchState batches[kMaxBatches]{};
  ThreadState threads[kMaxThreads]{};
  std::uint64_t era{0};
  std::uint8_t total_frees{0};

  /// Canonical byte encoding used for duplicate pruning and equality.
  [[nodiscard]] std::string Encode(int threads, int batches) const;
};

/// One free: which batch, freed by which thread.
struct FreeEvent {
  int batch;
  int thread;

  friend bool operator==(const FreeEvent &, const FreeEvent &) = default;
};

/*######################################################################################
 * Step machine
 *####################################################################################*/

/// Counters reported over an exploration.
struct StepStats {
  std::uint64_t frees{0};
  std::uint64_t max_retire_head_updates{0};
  std::uint64_t max_enter_steps{0};
  std::uint64_t max_leave_steps{0};
};

/**
 * @brief Executes the shared-memory steps of the modelled scheme, one per call.
 *
 * The machine is a pure function of (program, schedule). Each Step() performs exactly
 * one shared atomic operation of one thread, mirroring where the production code
 * places its step hooks, followed by that thread's local computation up to its next
 * shared operation.
 */
class Machine
{
 public:
  Machine(Variant variant, Program program, std::uint32_t invariants = kAllInvariants,
          bool mutate_skip_adjs = false);

  [[nodiscard]] const State &
  Current() const
  {
    return state_;
  }

  void Reset(const State &state);

  [[nodiscard]] State Initial() const;

  [[nodiscard]] int
  Threads() const
  {
    return static_cast<int>(program_.threads.size());
  }

  [[nodiscard]] int
  Batches() const
  {
    return batches_;
  }

  [[nodiscard]] bool Runnable(int thread) const;
  [[nodiscard]] bool AnyRunnable() const;

  /// Runs one step of `thread`; false if a registered invariant broke.
  bool Step(int thread);

  /// Checks the end-of-run invariants; false on violation.
  bool CheckTerminal();

  [[nodiscard]] const std::string &
  Violation() const
  {
    return violation_;
  }

  [[nodiscard]] const std::vector<FreeEvent> &
  Frees() const
  {
    return frees_;
  }

  void
  ClearFrees()
  {
    frees_.clear();
  }

  [[nodiscard]] const StepStats &
  Stats() const
  {
    return stats_;
  }

  [[nodiscard]] Variant
  GetVariant() const
  {
    return variant_;
  }

 private:
  void Settle(int t);
  void BeginOp(int t);
  void FinishOp(int t);
  void Execute(int t);

  void Adjust(int t, int batch, std::uint64_t units, std::uint64_t extra);
  void Free(int t, int batch);
  void TouchNode(NodeId node, const char *what);
  void StartTraverse(int t, NodeId from, NodeId handle);
  void EndTraverse(int t);
  void RetireNextSlot(int t);
  void RetireEnd(int t);
  void Retire1Check(int t);

  void Fail(Invariant inv, const std::string &what);

  Variant variant_;
  Program program_;
  std::uint32_t invariants_;
  bool mutate_;
  int batches_{0};
  State state_{};
  std::string violation_;
  std::vector<FreeEvent> frees_;
  StepStats stats_;
};

/*######################################################################################
 * Exploration and replay
 *####################################################################################*/

struct ExploreResult {
  bool passed{false};
  /// The state bound was hit before the exploration finished.
  bool bounded{false};
  std::uint64_t states{0};
  std::uint64_t terminal_states{0};
  StepStats stats{};
  std::string violation;
  /// Schedule reaching the violation, as comma-separated thread indices.
  std::string witness;
};

/**
 * @brief Depth-first exploration of every interleaving, pruning states already seen.
 */
class Explorer
{
 public:
  explicit Explorer(const Config &config);
  Explorer(const Config &config, Program program);

  /// Restricts checking to the named invariants (call repeatedly to add more).
  /// Throws std::invalid_argument on an unknown name.
  void Register(std::string_view name);

  ExploreResult Run();

 private:
  Config config_;
  Program program_;
  std::uint32_t invariants_{0};
  bool custom_{false};
};

struct ReplayResult {
  bool ok{false};
  std::string error;
  State final{};
  std::vector<FreeEvent> frees;
  /// Every thread finished or stalled.
  bool complete{false};
};

/// Runs `schedule` (thread indices) on the program; stops at the first invalid entry.
ReplayResult Replay(Variant variant, const Program &program, const std::vector<int> &schedule,
                    bool check_terminal = true);

std::vector<int> ParseSchedule(std::string_view text);
std::string FormatSchedule(const std::vector<int> &schedule);

}  // namespace hyaline::oracle

#endif  // HYALINE_ORACLE_MODEL_HPP
