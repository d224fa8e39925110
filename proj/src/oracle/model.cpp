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

#include "oracle/model.hpp"

// C++ standard libraries
#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <utility>

// local sources
#include "core/smr_core.hpp"

namespace hyaline::oracle
{
namespace
{
constexpr std::array<std::pair<Invariant, std::string_view>, 8> kInvariantNames{{
    {kExactlyOnceFree, "exactly-once-free"},
    {kNoFreeWhileHandleLive, "no-free-while-handle-live"},
    {kNoAccessAfterFree, "no-access-after-free"},
    {kWrapSumZeroAtFree, "wrap-sum-zero-at-free"},
    {kAdjsCountEqualsK, "adjs-count-equals-k"},
    {kCasFailureImpliesConcurrentSuccess, "cas-failure-implies-concurrent-success"},
    {kStepCountBounds, "step-count-bounds"},
    {kAcksBalanced, "acks-balanced-at-quiescence"},
}};

void
PutVarint(std::string &out, std::uint64_t v)
{
  while (v >= 0x80U) {
    out.push_back(static_cast<char>((v & 0x7fU) | 0x80U));
    v >>= 7U;
  }
  out.push_back(static_cast<char>(v));
}

void
PutSigned(std::string &out, const std::int64_t v)
{
  // zigzag
  PutVarint(out, (static_cast<std::uint64_t>(v) << 1U) ^ static_cast<std::uint64_t>(v >> 63));
}

void
PutByte(std::string &out, const int v)
{
  out.push_back(static_cast<char>(v));
}

}  // namespace

/*######################################################################################
 * Names and programs
 *####################################################################################*/

bool
IsRobust(const Variant v)
{
  return v == Variant::kHyalineS || v == Variant::kHyaline1S;
}

bool
IsSingle(const Variant v)
{
  return v == Variant::kHyaline1 || v == Variant::kHyaline1S;
}

std::string_view
VariantName(const Variant v)
{
  switch (v) {
    case Variant::kHyaline:
      return "hyaline";
    case Variant::kHyaline1:
      return "hyaline1";
    case Variant::kHyalineS:
      return "hyaline-s";
    case Variant::kHyaline1S:
      return "hyaline1s";
  }
  return "?";
}

std::optional<Variant>
VariantFromName(const std::string_view name)
{
  for (const auto v :
       {Variant::kHyaline, Variant::kHyaline1, Variant::kHyalineS, Variant::kHyaline1S}) {
    if (VariantName(v) == name) return v;
  }
  if (name == "hyaline-1") return Variant::kHyaline1;
  if (name == "hyaline-1s") return Variant::kHyaline1S;
  return std::nullopt;
}

std::optional<Invariant>
InvariantFromName(const std::string_view name)
{
  for (const auto &[inv, n] : kInvariantNames) {
    if (n == name) return inv;
  }
  return std::nullopt;
}

std::string_view
InvariantName(const Invariant inv)
{
  for (const auto &[i, n] : kInvariantNames) {
    if (i == inv) return n;
  }
  return "?";
}

std::vector<std::string_view>
InvariantNames()
{
  std::vector<std::string_view> names;
  for (const auto &entry : kInvariantNames) names.push_back(entry.second);
  return names;
}

int
EffectiveSlots(const Config &config)
{
  if (IsSingle(config.variant)) return std::max(config.slots, config.threads + config.stalled);
  return config.slots;
}

Program
BuildProgram(const Config &config)
{
  const int k = EffectiveSlots(config);
  if (config.threads < 1 || config.stalled < 0 || config.threads + config.stalled > kMaxThreads) {
    throw std::invalid_argument{"unsupported thread count"};
  }
  if (k < 1 || k > kMaxSlots) throw std::invalid_argument{"unsupported slot count"};
  if (config.batches < 0 || config.batches > kMaxBatches) {
    throw std::invalid_argument{"unsupported batch count"};
  }
  if (config.stalled > 0 && config.batches < 1) {
    throw std::invalid_argument{"stalled threads need a batch to hold"};
  }
  const bool robust = IsRobust(config.variant);
  const bool single = IsSingle(config.variant);

  Program program;
  program.slots = k;
  for (int t = 0; t < config.threads; ++t) {
    std::vector<Op> ops;
    if (robust) {
      for (int b = t; b < config.batches; b += config.threads) {
        ops.push_back({OpKind::kInitNode, static_cast<std::uint8_t>(b)});
      }
    }
    ops.push_back({OpKind::kEnter, static_cast<std::uint8_t>(single ? t : t % k)});
    if (robust && config.batches > 0) {
      ops.push_back({OpKind::kDeref, static_cast<std::uint8_t>(t % config.batches)});
    }
    for (int b = t; b < config.batches; b += config.threads) {
      ops.push_back({OpKind::kRetire, static_cast<std::uint8_t>(b)});
    }
    if (config.trim) ops.push_back({OpKind::kTrim, 0});
    ops.push_back({OpKind::kLeave, 0});
    program.threads.push_back(std::move(ops));
    program.stub.push_back(false);
  }
  for (int j = 0; j < config.stalled; ++j) {
    const int slot = single ? config.threads + j : 0;
    program.threads.push_back({{OpKind::kEnter, static_cast<std::uint8_t>(slot)},
                               {OpKind::kDeref, 0},
                               {OpKind::kStall, 0}});
    program.stub.push_back(true);
  }
  return program;
}

/*######################################################################################
 * State encoding
 *####################################################################################*/

std::string
State::Encode(const int threads, const int batches) const
{
  std::string out;
  out.reserve(256);
  PutByte(out, k);
  PutVarint(out, era);
  for (const auto &s : slots) {
    PutVarint(out, s.href);
    PutByte(out, s.hptr);
    PutVarint(out, s.access);
    PutSigned(out, s.acks);
    PutVarint(out, s.version);
  }
  for (int i = 0; i < batches; ++i) {
    const auto &b = this->batches[i];
    PutVarint(out, b.counter);
    for (const auto n : b.next) PutByte(out, n);
    PutByte(out, b.k);
    PutVarint(out, b.birth);
    PutByte(out, (b.born ? 1 : 0) | (b.reachable ? 2 : 0) | (b.unlinked ? 4 : 0) |
                     (b.retired ? 8 : 0) | (b.closed ? 16 : 0));
    PutByte(out, b.frees);
    PutByte(out, b.freed_by);
    PutByte(out, b.units);
    PutByte(out, b.accounted);
  }
  for (int i = 0; i < threads; ++i) {
    const auto &t = this->threads[i];
    PutByte(out, t.pc);
    PutByte(out, static_cast<int>(t.phase));
    PutByte(out, (t.active ? 1 : 0) | (t.do_adj ? 2 : 0) | (t.link_value ? 4 : 0));
    PutByte(out, t.slot);
    PutByte(out, t.handle);
    PutVarint(out, t.h_href);
    PutByte(out, t.h_hptr);
    PutByte(out, t.curr);
    PutByte(out, t.next);
    PutVarint(out, t.seen_version);
    PutByte(out, t.rslot);
    PutByte(out, t.ord);
    PutVarint(out, t.empty);
    PutVarint(out, t.inserts);
    PutByte(out, t.pred);
    PutVarint(out, t.pred_href);
    PutByte(out, t.cursor);
    PutByte(out, t.trav_handle);
    PutVarint(out, t.visited);
    PutVarint(out, t.access_local);
    PutVarint(out, t.era_local);
    PutByte(out, t.may_hold);
    PutByte(out, t.op_steps);
    PutByte(out, t.head_updates);
    PutByte(out, t.inserted_during);
  }
  return out;
}

/*######################################################################################
 * Machine
 *####################################################################################*/

Machine::Machine(const Variant variant, Program program, const std::uint32_t invariants,
                 const bool mutate_skip_adjs)
    : variant_{variant},
      program_{std::move(program)},
      invariants_{invariants},
      mutate_{mutate_skip_adjs}
{
  if (program_.threads.empty() || program_.threads.size() > kMaxThreads) {
    throw std::invalid_argument{"unsupported thread count"};
  }
  if (program_.slots < 1 || program_.slots > kMaxSlots) {
    throw std::invalid_argument{"unsupported slot count"};
  }
  if (program_.stub.size() < program_.threads.size()) {
    program_.stub.resize(program_.threads.size(), false);
  }
  for (const auto &ops : program_.threads) {
    for (const auto &op : ops) {
      const bool batch_arg =
          op.kind == OpKind::kRetire || op.kind == OpKind::kInitNode || op.kind == OpKind::kDeref;
      if (batch_arg) {
        if (op.arg >= kMaxBatches) throw std::invalid_argument{"batch index out of range"};
        batches_ = std::max(batches_, op.arg + 1);
      }
      if (op.kind == OpKind::kEnter && op.arg >= kMaxSlots) {
        throw std::invalid_argument{"slot index out of range"};
      }
    }
  }
  state_ = Initial();
}

State
Machine::Initial() const
{
  Machine copy{*this};
  copy.state_ = State{};
  copy.state_.k = static_cast<std::uint8_t>(program_.slots);
  for (auto &b : copy.state_.batches) {
    // batches of non-robust programs are published before the run starts
    b.born = !IsRobust(variant_);
    b.reachable = b.born;
  }
  for (int t = 0; t < Threads(); ++t) copy.Settle(t);
  return copy.state_;
}

void
Machine::Reset(const State &state)
{
  state_ = state;
  violation_.clear();
}

bool
Machine::Runnable(const int thread) const
{
  const auto phase = state_.threads[thread].phase;
  return phase != Phase::kDone && phase != Phase::kStalled;
}

bool
Machine::AnyRunnable() const
{
  for (int t = 0; t < Threads(); ++t) {
    if (Runnable(t)) return true;
  }
  return false;
}

bool
Machine::Step(const int thread)
{
  if (!Runnable(thread)) throw std::logic_error{"thread is not runnable"};
  auto &t = state_.threads[thread];
  if (t.op_steps < std::numeric_limits<std::uint8_t>::max()) ++t.op_steps;
  Execute(thread);
  Settle(thread);
  return violation_.empty();
}

void
Machine::Fail(const Invariant inv, const std::string &what)
{
  if ((invariants_ & inv) == 0 || !violation_.empty()) return;
  violation_ = std::string{InvariantName(inv)} + ": " + what;
}

void
Machine::Settle(const int t)
{
  while (state_.threads[t].phase == Phase::kOpStart) BeginOp(t);
}

void
Machine::BeginOp(const int t)
{
  auto &th = state_.threads[t];
  const auto &ops = program_.threads[t];
  if (th.pc >= ops.size()) {
    th.phase = Phase::kDone;
    return;
  }
  const auto op = ops[th.pc];
  th.op_steps = 0;
  th.head_updates = 0;
  const bool single = IsSingle(variant_);
  switch (op.kind) {
    case OpKind::kEnter:
      th.slot = op.arg;
      th.phase = single ? Phase::kEnter1Store : Phase::kEnterLoad;
      break;
    case OpKind::kLeave:
      th.may_hold = 0;
      th.phase = single ? Phase::kLeave1Exchange : Phase::kLeaveLoad;
      break;
    case OpKind::kTrim:
      th.may_hold = 0;
      th.phase = Phase::kTrimLoad;
      break;
    case OpKind::kRetire:
      th.phase = Phase::kRetireUnlink;
      break;
    case OpKind::kInitNode:
      th.phase = Phase::kEraFaa;
      break;
    case OpKind::kDeref:
      th.phase = IsRobust(variant_) ? Phase::kDerefAccessLoad : Phase::kDerefLinkLoad;
      break;
    case OpKind::kStall:
      th.phase = Phase::kStalled;
      break;
    case OpKind::kGrow:
      th.phase = Phase::kGrow;
      break;
  }
}

void
Machine::FinishOp(const int t)
{
  auto &th = state_.threads[t];
  const auto kind = program_.threads[t][th.pc].kind;
  if (kind == OpKind::kEnter) {
    stats_.max_enter_steps = std::max<std::uint64_t>(stats_.max_enter_steps, th.op_steps);
    if (IsSingle(variant_) && th.op_steps != 1) {
      Fail(kStepCountBounds, "enter took " + std::to_string(th.op_steps) + " steps");
    }
  } else if (kind == OpKind::kLeave) {
    stats_.max_leave_steps = std::max<std::uint64_t>(stats_.max_leave_steps, th.op_steps);
    if (IsSingle(variant_) && th.op_steps > 1U + th.inserted_during) {
      Fail(kStepCountBounds, "leave took " + std::to_string(th.op_steps) + " steps with " +
                                 std::to_string(th.inserted_during) + " batches inserted");
    }
  } else if (kind == OpKind::kRetire) {
    stats_.max_retire_head_updates =
        std::max<std::uint64_t>(stats_.max_retire_head_updates, th.head_updates);
  }
  ++th.pc;
  th.phase = Phase::kOpStart;
}

void
Machine::TouchNode(const NodeId node, const char *what)
{
  const auto b = BatchOf(node);
  if (state_.batches[b].frees > 0) {
    Fail(kNoAccessAfterFree, std::string{what} + " touched freed batch " + std::to_string(b));
  }
}

void
Machine::Free(const int t, const int b)
{
  auto &batch = state_.batches[b];
  if (batch.frees > 0) Fail(kExactlyOnceFree, "batch " + std::to_string(b) + " freed twice");
  if (batch.frees < std::numeric_limits<std::uint8_t>::max()) ++batch.frees;
  batch.freed_by = static_cast<std::int8_t>(t);
  ++state_.total_frees;
  ++stats_.frees;
  frees_.push_back({b, t});
  for (int u = 0; u < Threads(); ++u) {
    if ((state_.threads[u].may_hold & (1U << b)) != 0) {
      Fail(kNoFreeWhileHandleLive,
           "batch " + std::to_string(b) + " freed while thread " + std::to_string(u) + " holds it");
    }
  }
  if (IsSingle(variant_)) {
    if (!batch.closed) {
      Fail(kWrapSumZeroAtFree, "batch " + std::to_string(b) + " freed before its insert count");
    }
  } else if (batch.units != batch.k || batch.k * batch.adjs != 0) {
    Fail(kWrapSumZeroAtFree, "batch " + std::to_string(b) + " freed with " +
                                 std::to_string(batch.units) + " of " + std::to_string(batch.k) +
                                 " Adjs");
  }
}

void
Machine::Adjust(const int t, const int b, const std::uint64_t units, const std::uint64_t extra)
{
  auto &batch = state_.batches[b];
  if (batch.frees > 0) Fail(kNoAccessAfterFree, "adjust of freed batch " + std::to_string(b));
  const auto val = WrapAdd(units * batch.adjs, extra);
  batch.units = static_cast<std::uint8_t>(batch.units + units);
  batch.counter = WrapAdd(batch.counter, val);
  if (batch.counter == 0) Free(t, b);
}

void
Machine::StartTraverse(const int t, const NodeId from, const NodeId handle)
{
  auto &th = state_.threads[t];
  th.cursor = from;
  th.trav_handle = handle;
  th.visited = 0;
  if (from == kNull) {
    EndTraverse(t);
  } else {
    th.phase = Phase::kTraverse;
  }
}

void
Machine::EndTraverse(const int t)
{
  auto &th = state_.threads[t];
  if (variant_ == Variant::kHyalineS) {
    th.phase = Phase::kAcksSub;
    return;
  }
  if (program_.threads[t][th.pc].kind == OpKind::kLeave) th.handle = kNull;
  FinishOp(t);
}

void
Machine::RetireNextSlot(const int t)
{
  auto &th = state_.threads[t];
  const auto b = program_.threads[t][th.pc].arg;
  ++th.rslot;
  if (th.rslot < state_.batches[b].k) {
    th.phase = IsSingle(variant_) ? Phase::kRetire1Load : Phase::kRetireLoad;
  } else {
    RetireEnd(t);
  }
}

void
Machine::RetireEnd(const int t)
{
  auto &th = state_.threads[t];
  const auto b = program_.threads[t][th.pc].arg;
  auto &batch = state_.batches[b];
  if (batch.accounted != batch.k || batch.k * batch.adjs != 0) {
    Fail(kAdjsCountEqualsK, "batch " + std::to_string(b) + " accounted " +
                                std::to_string(batch.accounted) + " of " +
                                std::to_string(batch.k) + " slots");
  }
  if (th.head_updates > batch.k) {
    Fail(kStepCountBounds, "retire made " + std::to_string(th.head_updates) + " head updates");
  }
  if (IsSingle(variant_)) {
    th.phase = Phase::kRetire1Final;
  } else if (th.do_adj) {
    th.phase = Phase::kRetireFinalAdjust;
  } else {
    batch.closed = true;
    FinishOp(t);
  }
}

void
Machine::Retire1Check(const int t)
{
  auto &th = state_.threads[t];
  if (th.h_href == 0) {
    const auto b = program_.threads[t][th.pc].arg;
    ++state_.batches[b].accounted;
    RetireNextSlot(t);
  } else {
    th.phase = IsRobust(variant_) ? Phase::kRetire1Access : Phase::kRetire1Cas;
  }
}

void
Machine::Execute(const int t)
{
  auto &th = state_.threads[t];
  const auto op = program_.threads[t][th.pc];
  auto &slot = state_.slots[th.slot];
  const bool robust = IsRobust(variant_);

  auto next_of = [this](const NodeId node) {
    return state_.batches[BatchOf(node)].next[OrdinalOf(node)];
  };
  auto cas_failed = [&](const SlotState &s) {
    if (s.version == th.seen_version) {
      Fail(kCasFailureImpliesConcurrentSuccess, "compare-and-swap failed on an unchanged head");
    }
  };

  switch (th.phase) {
    case Phase::kEnterLoad:
      th.h_href = slot.href;
      th.h_hptr = slot.hptr;
      th.seen_version = slot.version;
      th.phase = Phase::kEnterCas;
      break;

    case Phase::kEnterCas:
      if (slot.href == th.h_href && slot.hptr == th.h_hptr) {
        ++slot.href;
        ++slot.version;
        th.active = true;
        th.handle = th.h_hptr;
        th.inserted_during = 0;
        FinishOp(t);
      } else {
        cas_failed(slot);
        th.phase = Phase::kEnterLoad;
      }
      break;

    case Phase::kEnter1Store:
      slot.href = 1;
      slot.hptr = kNull;
      ++slot.version;
      th.active = true;
      th.handle = kNull;
      th.inserted_during = 0;
      FinishOp(t);
      break;

    case Phase::kLeaveLoad:
      th.h_href = slot.href;
      th.h_hptr = slot.hptr;
      th.seen_version = slot.version;
      th.curr = slot.hptr;
      th.next = kNull;
      if (th.curr != th.handle && th.curr != kNull) {
        TouchNode(th.curr, "leave");
        th.next = next_of(th.curr);
      }
      th.phase = Phase::kLeaveCas;
      break;

    case Phase::kLeaveCas:
      if (slot.href == th.h_href && slot.hptr == th.h_hptr) {
        slot.href = th.h_href - 1;
        slot.hptr = th.h_href == 1 ? kNull : th.h_hptr;
        ++slot.version;
        th.active = false;
        if (th.h_href == 1 && th.curr != kNull) {
          th.phase = Phase::kLeaveAdjust;
        } else if (th.curr != th.handle) {
          StartTraverse(t, th.next, th.handle);
        } else {
          th.handle = kNull;
          FinishOp(t);
        }
      } else {
        cas_failed(slot);
        th.phase = Phase::kLeaveLoad;
      }
      break;

    case Phase::kLeaveAdjust:
      Adjust(t, BatchOf(th.curr), 1, 0);
      if (th.curr != th.handle) {
        StartTraverse(t, th.next, th.handle);
      } else {
        th.handle = kNull;
        FinishOp(t);
      }
      break;

    case Phase::kLeave1Exchange: {
      const auto first = slot.hptr;
      slot.href = 0;
      slot.hptr = kNull;
      ++slot.version;
      th.active = false;
      StartTraverse(t, first, th.handle);
      break;
    }

    case Phase::kTrimLoad: {
      const auto curr = slot.hptr;
      if (curr != th.handle && curr != kNull) {
        TouchNode(curr, "trim");
        const auto old = th.handle;
        th.handle = curr;
        StartTraverse(t, next_of(curr), old);
      } else {
        th.handle = curr;
        FinishOp(t);
      }
      break;
    }

    case Phase::kTraverse: {
      const auto node = th.cursor;
      TouchNode(node, "traverse");
      const auto b = BatchOf(node);
      const auto nxt = next_of(node);
      ++th.visited;
      auto &batch = state_.batches[b];
      const auto prev = batch.counter;
      batch.counter = WrapAdd(batch.counter, ~std::uint64_t{0});
      if (prev == 1) Free(t, b);
      if (node == th.trav_handle || nxt == kNull) {
        EndTraverse(t);
      } else {
        th.cursor = nxt;
      }
      break;
    }

    case Phase::kAcksSub:
      slot.acks -= static_cast<std::int64_t>(th.visited);
      if (op.kind == OpKind::kLeave) th.handle = kNull;
      FinishOp(t);
      break;

    case Phase::kRetireUnlink: {
      auto &batch = state_.batches[op.arg];
      batch.reachable = false;
      batch.unlinked = true;
      batch.retired = true;
      batch.k = state_.k;
      batch.adjs = IsSingle(variant_) ? 0 : ComputeAdjs(state_.k, 64);
      batch.counter = 0;
      if (!robust) {
        for (int u = 0; u < Threads(); ++u) {
          auto &other = state_.threads[u];
          if (!other.active || other.phase == Phase::kDone) continue;
          const auto kind = program_.threads[u][other.pc].kind;
          if (kind == OpKind::kLeave || kind == OpKind::kTrim) continue;
          other.may_hold = static_cast<std::uint8_t>(other.may_hold | (1U << op.arg));
        }
      }
      th.rslot = 0;
      th.ord = 0;
      th.do_adj = false;
      th.empty = 0;
      th.inserts = 0;
      th.phase = IsSingle(variant_) ? Phase::kRetire1Load : Phase::kRetireLoad;
      break;
    }

    case Phase::kRetireLoad: {
      const auto &s = state_.slots[th.rslot];
      th.h_href = s.href;
      th.h_hptr = s.hptr;
      th.seen_version = s.version;
      if (th.h_href == 0) {
        th.do_adj = true;
        ++th.empty;
        ++state_.batches[op.arg].accounted;
        RetireNextSlot(t);
      } else {
        th.phase = robust ? Phase::kRetireAccess : Phase::kRetireCas;
      }
      break;
    }

    case Phase::kRetireAccess:
      if (state_.slots[th.rslot].access < state_.batches[op.arg].birth) {
        th.do_adj = true;
        ++th.empty;
        ++state_.batches[op.arg].accounted;
        RetireNextSlot(t);
      } else {
        th.phase = Phase::kRetireCas;
      }
      break;

    case Phase::kRetireCas: {
      auto &s = state_.slots[th.rslot];
      auto &batch = state_.batches[op.arg];
      const auto node = MakeNode(op.arg, th.ord);
      TouchNode(node, "retire");
      batch.next[th.ord] = th.h_hptr;
      if (s.href == th.h_href && s.hptr == th.h_hptr) {
        s.hptr = node;
        ++s.version;
        ++th.head_updates;
        ++batch.accounted;
        ++th.ord;
        th.pred = th.h_hptr;
        th.pred_href = th.h_href;
        if (th.pred != kNull) {
          th.phase = Phase::kRetirePredAdjust;
        } else {
          // nobody will traverse a missing predecessor, so there is nothing to ack
          RetireNextSlot(t);
        }
      } else {
        cas_failed(s);
        th.phase = Phase::kRetireLoad;
      }
      break;
    }

    case Phase::kRetirePredAdjust:
      Adjust(t, BatchOf(th.pred), 1, th.pred_href);
      if (robust) {
        th.phase = Phase::kRetireAcks;
      } else {
        RetireNextSlot(t);
      }
      break;

    case Phase::kRetireAcks:
      state_.slots[th.rslot].acks += static_cast<std::int64_t>(th.pred_href);
      RetireNextSlot(t);
      break;

    case Phase::kRetireFinalAdjust: {
      auto units = th.empty;
      if (mutate_ && units > 0) --units;
      state_.batches[op.arg].closed = true;
      Adjust(t, op.arg, units, 0);
      FinishOp(t);
      break;
    }

    case Phase::kRetire1Load: {
      const auto &s = state_.slots[th.rslot];
      th.h_href = s.href;
      th.h_hptr = s.hptr;
      th.seen_version = s.version;
      Retire1Check(t);
      break;
    }

    case Phase::kRetire1Access:
      if (state_.slots[th.rslot].access < state_.batches[op.arg].birth) {
        ++state_.batches[op.arg].accounted;
        RetireNextSlot(t);
      } else {
        th.phase = Phase::kRetire1Cas;
      }
      break;

    case Phase::kRetire1Cas: {
      auto &s = state_.slots[th.rslot];
      auto &batch = state_.batches[op.arg];
      const auto node = MakeNode(op.arg, th.ord);
      TouchNode(node, "retire");
      batch.next[th.ord] = th.h_hptr;
      if (s.href == th.h_href && s.hptr == th.h_hptr) {
        s.hptr = node;
        ++s.version;
        ++th.head_updates;
        ++batch.accounted;
        ++th.ord;
        ++th.inserts;
        for (int u = 0; u < Threads(); ++u) {
          auto &owner = state_.threads[u];
          if (owner.active && owner.slot == th.rslot) ++owner.inserted_during;
        }
        RetireNextSlot(t);
      } else {
        cas_failed(s);
        th.h_href = s.href;
        th.h_hptr = s.hptr;
        th.seen_version = s.version;
        Retire1Check(t);
      }
      break;
    }

    case Phase::kRetire1Final:
      state_.batches[op.arg].closed = true;
      Adjust(t, op.arg, 0, th.inserts);
      FinishOp(t);
      break;

    case Phase::kEraFaa:
      ++state_.era;
      th.phase = Phase::kEraLoad;
      break;

    case Phase::kEraLoad: {
      auto &batch = state_.batches[op.arg];
      batch.birth = state_.era;
      batch.born = true;
      batch.reachable = true;
      FinishOp(t);
      break;
    }

    case Phase::kDerefAccessLoad:
      th.access_local = slot.access;
      th.phase = Phase::kDerefLinkLoad;
      break;

    case Phase::kDerefLinkLoad:
      th.link_value = state_.batches[op.arg].reachable;
      if (robust) {
        th.phase = Phase::kDerefEraLoad;
      } else {
        if (th.link_value) th.may_hold = static_cast<std::uint8_t>(th.may_hold | (1U << op.arg));
        FinishOp(t);
      }
      break;

    case Phase::kDerefEraLoad:
      th.era_local = state_.era;
      if (th.access_local == th.era_local) {
        if (th.link_value) th.may_hold = static_cast<std::uint8_t>(th.may_hold | (1U << op.arg));
        FinishOp(t);
      } else {
        th.phase = variant_ == Variant::kHyalineS ? Phase::kTouchLoad : Phase::kTouchStore;
      }
      break;

    case Phase::kTouchLoad:
      th.access_local = slot.access;
      th.phase = th.access_local >= th.era_local ? Phase::kDerefLinkLoad : Phase::kTouchCas;
      break;

    case Phase::kTouchCas:
      if (slot.access == th.access_local) {
        slot.access = th.era_local;
        th.access_local = th.era_local;
        th.phase = Phase::kDerefLinkLoad;
      } else {
        th.phase = Phase::kTouchLoad;
      }
      break;

    case Phase::kTouchStore:
      slot.access = th.era_local;
      th.access_local = th.era_local;
      th.phase = Phase::kDerefLinkLoad;
      break;

    case Phase::kGrow:
      state_.k = static_cast<std::uint8_t>(std::min(state_.k * 2, kMaxSlots));
      FinishOp(t);
      break;

    case Phase::kOpStart:
    case Phase::kDone:
    case Phase::kStalled:
      throw std::logic_error{"no step to execute"};
  }
}

bool
Machine::CheckTerminal()
{
  bool stubs = false;
  for (int t = 0; t < Threads(); ++t) stubs = stubs || program_.stub[t];
  if (stubs) return violation_.empty();
  for (int b = 0; b < batches_; ++b) {
    const auto &batch = state_.batches[b];
    if (!batch.retired) continue;
    if (!IsSingle(variant_) && batch.units != batch.k) {
      Fail(kWrapSumZeroAtFree, "batch " + std::to_string(b) + " ended with " +
                                   std::to_string(batch.units) + " of " +
                                   std::to_string(batch.k) + " Adjs");
    }
    if (batch.frees != 1) {
      Fail(kExactlyOnceFree, "batch " + std::to_string(b) + " freed " +
                                 std::to_string(batch.frees) + " times");
    }
  }
  if (variant_ == Variant::kHyalineS) {
    for (int s = 0; s < kMaxSlots; ++s) {
      if (state_.slots[s].acks != 0) {
        Fail(kAcksBalanced, "slot " + std::to_string(s) + " ended with acks " +
                                std::to_string(state_.slots[s].acks));
      }
    }
  }
  return violation_.empty();
}

/*######################################################################################
 * Exploration
 *####################################################################################*/

Explorer::Explorer(const Config &config) : config_{config}, program_{BuildProgram(config)} {}

Explorer::Explorer(const Config &config, Program program)
    : config_{config}, program_{std::move(program)}, custom_{true}
{
}

void
Explorer::Register(const std::string_view name)
{
  const auto inv = InvariantFromName(name);
  if (!inv.has_value()) throw std::invalid_argument{"unknown invariant: " + std::string{name}};
  invariants_ |= *inv;
}

ExploreResult
Explorer::Run()
{
  ExploreResult result;
  const auto invariants = invariants_ == 0 ? kAllInvariants : invariants_;
  Machine machine{config_.variant, program_, invariants, config_.mutate_skip_adjs};
  const int threads = machine.Threads();
  const int batches = machine.Batches();

  struct Frame {
    State state;
    int next_thread;
  };
  std::vector<Frame> stack;
  std::vector<int> path;
  std::unordered_set<std::string> seen;

  const auto initial = machine.Initial();
  seen.insert(initial.Encode(threads, batches));
  stack.push_back({initial, 0});
  result.states = 1;

  auto witness = [&](const int last) {
    auto schedule = path;
    if (last >= 0) schedule.push_back(last);
    return FormatSchedule(schedule);
  };

  while (!stack.empty()) {
    auto &frame = stack.back();
    machine.Reset(frame.state);
    if (frame.next_thread == 0 && !machine.AnyRunnable()) {
      ++result.terminal_states;
      if (!machine.CheckTerminal()) {
        result.violation = machine.Violation();
        result.witness = witness(-1);
        result.stats = machine.Stats();
        return result;
      }
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    int t = frame.next_thread;
    while (t < threads && !machine.Runnable(t)) ++t;
    if (t >= threads) {
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    frame.next_thread = t + 1;
    if (!machine.Step(t)) {
      result.violation = machine.Violation();
      result.witness = witness(t);
      result.stats = machine.Stats();
      return result;
    }
    if (!seen.insert(machine.Current().Encode(threads, batches)).second) continue;
    if (++result.states > config_.max_states) {
      result.bounded = true;
      result.stats = machine.Stats();
      return result;
    }
    stack.push_back({machine.Current(), 0});
    path.push_back(t);
  }
  result.passed = true;
  result.stats = machine.Stats();
  return result;
}

ReplayResult
Replay(const Variant variant, const Program &program, const std::vector<int> &schedule,
       const bool check_terminal)
{
  ReplayResult result;
  Machine machine{variant, program};
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const int t = schedule[i];
    if (t < 0 || t >= machine.Threads() || !machine.Runnable(t)) {
      result.error = "thread " + std::to_string(t) + " cannot run at position " + std::to_string(i);
      result.final = machine.Current();
      result.frees = machine.Frees();
      return result;
    }
    if (!machine.Step(t)) {
      result.error = machine.Violation();
      result.final = machine.Current();
      result.frees = machine.Frees();
      return result;
    }
  }
  result.complete = !machine.AnyRunnable();
  if (result.complete && check_terminal && !machine.CheckTerminal()) {
    result.error = machine.Violation();
  } else {
    result.ok = true;
  }
  result.final = machine.Current();
  result.frees = machine.Frees();
  return result;
}

std::vector<int>
ParseSchedule(const std::string_view text)
{
  std::vector<int> schedule;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ',' || text[pos] == ' ')) ++pos;
    if (pos >= text.size()) break;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{}) throw std::invalid_argument{"malformed schedule"};
    schedule.push_back(value);
    pos = static_cast<std::size_t>(ptr - text.data());
  }
  return schedule;
}

std::string
FormatSchedule(const std::vector<int> &schedule)
{
  std::string out;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += std::to_string(schedule[i]);
  }
  return out;
}

}  // namespace hyaline::oracle
