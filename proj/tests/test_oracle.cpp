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

// C++ standard libraries
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

// external sources
#include <gtest/gtest.h>

// local sources
#include "core/hyaline.hpp"
#include "core/hyaline1.hpp"
#include "oracle/model.hpp"

namespace hyaline::test
{
using oracle::Config;
using oracle::Explorer;
using oracle::FreeEvent;
using oracle::Machine;
using oracle::Op;
using oracle::OpKind;
using oracle::Program;
using oracle::Variant;

namespace
{
Config
Make(const Variant variant, const int threads, const int slots, const int batches,
     const int stalled = 0, const bool trim = false)
{
  Config c;
  c.variant = variant;
  c.threads = threads;
  c.slots = slots;
  c.batches = batches;
  c.stalled = stalled;
  c.trim = trim;
  return c;
}

/// The three-thread, one-slot program of the worked example: two threads each retire
/// one batch, a third only enters and leaves.
Program
WorkedExample()
{
  Program p;
  p.slots = 1;
  p.threads = {
      {{OpKind::kEnter, 0}, {OpKind::kRetire, 0}, {OpKind::kLeave, 0}},
      {{OpKind::kEnter, 0}, {OpKind::kRetire, 1}, {OpKind::kLeave, 0}},
      {{OpKind::kEnter, 0}, {OpKind::kLeave, 0}},
  };
  p.stub = {false, false, false};
  return p;
}

}  // namespace

/*######################################################################################
 * Exhaustive exploration
 *####################################################################################*/

class OracleSafetyTest : public ::testing::TestWithParam<Config>
{
};

TEST_P(OracleSafetyTest, NoViolations)
{
  const auto config = GetParam();
  Explorer explorer{config};
  const auto r = explorer.Run();
  EXPECT_TRUE(r.passed) << r.violation << "\nwitness: " << r.witness;
  EXPECT_FALSE(r.bounded);
  EXPECT_GT(r.terminal_states, 0U);
  EXPECT_LE(r.stats.max_retire_head_updates,
            static_cast<std::uint64_t>(oracle::EffectiveSlots(config)));
  if (oracle::IsSingle(config.variant)) {
    EXPECT_EQ(r.stats.max_enter_steps, 1U);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Configs, OracleSafetyTest,
    ::testing::Values(Make(Variant::kHyaline, 2, 1, 1), Make(Variant::kHyaline, 2, 2, 1),
                      Make(Variant::kHyaline, 3, 1, 1), Make(Variant::kHyaline, 2, 1, 2),
                      Make(Variant::kHyaline, 2, 2, 2, 0, true),
                      Make(Variant::kHyaline, 2, 1, 1, 1),
                      Make(Variant::kHyaline1, 2, 1, 1), Make(Variant::kHyaline1, 2, 2, 1),
                      Make(Variant::kHyaline1, 3, 1, 1), Make(Variant::kHyaline1, 2, 1, 2),
                      Make(Variant::kHyaline1, 2, 1, 2, 0, true),
                      Make(Variant::kHyaline1, 2, 1, 1, 1),
                      Make(Variant::kHyalineS, 2, 1, 1), Make(Variant::kHyalineS, 2, 2, 1, 1),
                      Make(Variant::kHyalineS, 2, 2, 2, 0, true),
                      Make(Variant::kHyaline1S, 2, 1, 1),
                      Make(Variant::kHyaline1S, 2, 1, 2, 1)),
    [](const ::testing::TestParamInfo<Config> &info) {
      std::string name{oracle::VariantName(info.param.variant)};
      std::erase(name, '-');
      name += "_t" + std::to_string(info.param.threads) + "_s" +
              std::to_string(info.param.slots) + "_b" + std::to_string(info.param.batches) +
              "_x" + std::to_string(info.param.stalled) + (info.param.trim ? "_trim" : "");
      return name;
    });

TEST(OracleTest, WorkedExampleFreesBothBatches)
{
  const auto schedule = oracle::ParseSchedule("0,0,0,0,0,1,1,1,1,1,2,2,0,0,0,1,1,1,1,2,2,2");
  const auto r = oracle::Replay(Variant::kHyaline, WorkedExample(), schedule);
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_TRUE(r.complete);
  ASSERT_EQ(r.frees.size(), 2U);
  EXPECT_EQ(r.frees[0], (FreeEvent{0, 1}));
  EXPECT_EQ(r.frees[1], (FreeEvent{1, 2}));
}

TEST(OracleTest, WorkedExampleIsSafeUnderEveryInterleaving)
{
  Explorer explorer{Make(Variant::kHyaline, 3, 1, 2), WorkedExample()};
  const auto r = explorer.Run();
  EXPECT_TRUE(r.passed) << r.violation;
}

TEST(OracleTest, ReplayRejectsInvalidSchedule)
{
  const auto r = oracle::Replay(Variant::kHyaline, WorkedExample(), {2, 2, 2, 2, 2});
  EXPECT_FALSE(r.ok);
}

TEST(OracleTest, MissingAdjsIsCaughtWithWitness)
{
  auto config = Make(Variant::kHyaline, 1, 2, 1);
  config.mutate_skip_adjs = true;
  Explorer explorer{config};
  explorer.Register("wrap-sum-zero-at-free");
  const auto r = explorer.Run();
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.violation.rfind("wrap-sum-zero-at-free", 0), 0U) << r.violation;
  EXPECT_FALSE(r.witness.empty());

  // the witness is a valid schedule of the same program
  Machine m{Variant::kHyaline, oracle::BuildProgram(config), oracle::kWrapSumZeroAtFree, true};
  bool violated = false;
  for (const auto t : oracle::ParseSchedule(r.witness)) {
    ASSERT_TRUE(m.Runnable(t));
    if (!m.Step(t)) {
      violated = true;
      break;
    }
  }
  EXPECT_TRUE(violated);
}

TEST(OracleTest, UnknownInvariantIsRejected)
{
  Explorer explorer{Make(Variant::kHyaline, 1, 1, 1)};
  EXPECT_THROW(explorer.Register("no-such-invariant"), std::invalid_argument);
}

TEST(OracleTest, InvariantNamesRoundTrip)
{
  for (const auto name : oracle::InvariantNames()) {
    const auto inv = oracle::InvariantFromName(name);
    ASSERT_TRUE(inv.has_value()) << name;
    EXPECT_EQ(oracle::InvariantName(*inv), name);
  }
}

TEST(OracleTest, GrowthMixesBatchesOfDifferentSlotCounts)
{
  Program p;
  p.slots = 1;
  p.threads = {
      {{OpKind::kEnter, 0}, {OpKind::kRetire, 0}, {OpKind::kLeave, 0}},
      {{OpKind::kGrow, 0}, {OpKind::kEnter, 1}, {OpKind::kRetire, 1}, {OpKind::kLeave, 0}},
  };
  p.stub = {false, false};
  Explorer explorer{Make(Variant::kHyaline, 2, 1, 2), p};
  const auto r = explorer.Run();
  EXPECT_TRUE(r.passed) << r.violation << "\nwitness: " << r.witness;
}

TEST(OracleTest, ExplorationIsDeterministic)
{
  const auto config = Make(Variant::kHyaline, 2, 2, 2, 0, true);
  const auto a = Explorer{config}.Run();
  const auto b = Explorer{config}.Run();
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.terminal_states, b.terminal_states);
  EXPECT_EQ(a.stats.frees, b.stats.frees);
}

TEST(OracleTest, ReplayIsDeterministic)
{
  const auto program = oracle::BuildProgram(Make(Variant::kHyaline1, 3, 1, 2, 0, true));
  std::mt19937 rng{11};
  for (int round = 0; round < 50; ++round) {
    Machine m{Variant::kHyaline1, program};
    std::vector<int> schedule;
    while (m.AnyRunnable()) {
      std::vector<int> runnable;
      for (int t = 0; t < m.Threads(); ++t) {
        if (m.Runnable(t)) runnable.push_back(t);
      }
      const int t = runnable[rng() % runnable.size()];
      schedule.push_back(t);
      ASSERT_TRUE(m.Step(t)) << m.Violation();
    }
    const auto a = oracle::Replay(Variant::kHyaline1, program, schedule);
    const auto b = oracle::Replay(Variant::kHyaline1, program, schedule);
    ASSERT_TRUE(a.ok);
    EXPECT_EQ(a.final.Encode(3, 2), b.final.Encode(3, 2));
    EXPECT_EQ(a.frees, b.frees);
    EXPECT_EQ(a.final.Encode(3, 2), m.Current().Encode(3, 2));
  }
}

TEST(OracleTest, ScheduleTextRoundTrips)
{
  const std::vector<int> s{0, 1, 1, 2, 0};
  EXPECT_EQ(oracle::FormatSchedule(s), "0,1,1,2,0");
  EXPECT_EQ(oracle::ParseSchedule("0,1,1,2,0"), s);
}

TEST(OracleTest, SingleSlotVariantLeaveIsBoundedByInsertions)
{
  const auto r = Explorer{Make(Variant::kHyaline1, 2, 1, 2)}.Run();
  ASSERT_TRUE(r.passed) << r.violation;
  EXPECT_EQ(r.stats.max_enter_steps, 1U);
  // one exchange plus at most one traversal step per batch
  EXPECT_LE(r.stats.max_leave_steps, 3U);
}

/*######################################################################################
 * Agreement with the production code
 *####################################################################################*/

namespace
{
/// Lets exactly one worker run between two consecutive step hooks.
class Turnstile
{
 public:
  enum class State { kRunning, kParked, kDone };

  explicit Turnstile(const int threads) : states_(threads, State::kRunning) {}

  void
  Park(const int id)
  {
    std::unique_lock lock{mutex_};
    states_[id] = State::kParked;
    cv_.notify_all();
    cv_.wait(lock, [&] { return grant_ == id; });
    grant_ = -1;
    states_[id] = State::kRunning;
  }

  void
  Finish(const int id)
  {
    std::lock_guard lock{mutex_};
    states_[id] = State::kDone;
    cv_.notify_all();
  }

  /// Waits until no worker is running.
  void
  Quiesce()
  {
    std::unique_lock lock{mutex_};
    cv_.wait(lock, [&] {
      for (const auto s : states_) {
        if (s == State::kRunning) return false;
      }
      return grant_ == -1;
    });
  }

  /// Runs worker `id` up to its next hook (or to completion).
  void
  Grant(const int id)
  {
    {
      std::lock_guard lock{mutex_};
      grant_ = id;
      cv_.notify_all();
    }
    Quiesce();
  }

  State
  Get(const int id)
  {
    std::lock_guard lock{mutex_};
    return states_[id];
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<State> states_;
  int grant_{-1};
};

thread_local Turnstile *tls_turnstile = nullptr;
thread_local int tls_worker = -1;

struct TurnstileHooks {
  static void
  Before(Step)
  {
    if (tls_turnstile != nullptr) tls_turnstile->Park(tls_worker);
  }
};

struct Observed {
  std::vector<FreeEvent> frees;
  const std::vector<std::vector<NodeHeader>> *batches{nullptr};

  static void
  Callback(NodeHeader *node, void *user)
  {
    auto *self = static_cast<Observed *>(user);
    for (std::size_t b = 0; b < self->batches->size(); ++b) {
      // the counter node goes last, so it marks the batch as freed
      if (node == &(*self->batches)[b][0]) {
        self->frees.push_back({static_cast<int>(b), tls_worker});
      }
    }
  }
};

/**
 * @brief Runs `program` on the production scheme under a random schedule chosen
 * from the model's runnable threads, comparing free events, batch counters and slot
 * heads after every step.
 */
template <class Scheme>
void
Agree(const Variant variant, const Program &program, const int batches, std::mt19937 &rng)
{
  const int threads = static_cast<int>(program.threads.size());
  const auto k = static_cast<std::size_t>(program.slots);
  std::vector<std::vector<NodeHeader>> nodes(batches, std::vector<NodeHeader>(k + 1));
  Observed observed;
  observed.batches = &nodes;

  std::unique_ptr<Scheme> scheme;
  if constexpr (std::is_same_v<Scheme, BasicHyaline<false, TurnstileHooks>>) {
    scheme = std::make_unique<Scheme>(HyalineOptions{k, 1, 1, 8192}, Observed::Callback,
                                      &observed);
  } else {
    scheme = std::make_unique<Scheme>(Hyaline1Options{k, 1, 1}, Observed::Callback, &observed);
  }

  std::vector<typename Scheme::Thread> handles;
  for (int t = 0; t < threads; ++t) handles.push_back(scheme->Attach());

  Turnstile turnstile{threads};
  std::vector<std::thread> workers;
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      tls_turnstile = &turnstile;
      tls_worker = t;
      auto &h = handles[t];
      for (const auto &op : program.threads[t]) {
        switch (op.kind) {
          case OpKind::kEnter:
            if constexpr (requires { scheme->EnterAt(h, std::size_t{0}); }) {
              scheme->EnterAt(h, op.arg);
            } else {
              scheme->Enter(h);
            }
            break;
          case OpKind::kRetire:
            TurnstileHooks::Before(Step::kUnlink);
            for (auto &n : nodes[op.arg]) scheme->Retire(h, &n);
            break;
          case OpKind::kTrim:
            scheme->Trim(h);
            break;
          case OpKind::kLeave:
            scheme->Leave(h);
            break;
          default:
            break;
        }
      }
      tls_turnstile = nullptr;
      turnstile.Finish(t);
    });
  }

  Machine m{variant, program};
  std::vector<int> schedule;
  turnstile.Quiesce();
  for (;;) {
    for (int t = 0; t < threads; ++t) {
      const bool parked = turnstile.Get(t) == Turnstile::State::kParked;
      ASSERT_EQ(parked, m.Runnable(t)) << "thread " << t << " after "
                                       << oracle::FormatSchedule(schedule);
    }
    ASSERT_EQ(observed.frees, m.Frees()) << oracle::FormatSchedule(schedule);
    const auto &state = m.Current();
    for (int b = 0; b < batches; ++b) {
      const auto &mb = state.batches[b];
      if (!mb.retired || mb.frees > 0) continue;
      EXPECT_EQ(SharedWord(&nodes[b][0]).load(), mb.counter)
          << "batch " << b << " after " << oracle::FormatSchedule(schedule);
    }
    for (std::size_t s = 0; s < k; ++s) {
      const auto head = scheme->PeekHead(s);
      if constexpr (std::is_same_v<std::remove_cv_t<decltype(head)>, HeadTuple>) {
        EXPECT_EQ(head.href, state.slots[s].href) << oracle::FormatSchedule(schedule);
      } else {
        EXPECT_EQ(head & kActiveBit, state.slots[s].href) << oracle::FormatSchedule(schedule);
      }
    }

    std::vector<int> runnable;
    for (int t = 0; t < threads; ++t) {
      if (m.Runnable(t)) runnable.push_back(t);
    }
    if (runnable.empty()) break;
    const int t = runnable[rng() % runnable.size()];
    schedule.push_back(t);
    ASSERT_TRUE(m.Step(t)) << m.Violation();
    turnstile.Grant(t);
  }
  for (auto &w : workers) w.join();
  for (auto &h : handles) scheme->Detach(h);
  EXPECT_EQ(observed.frees.size(), static_cast<std::size_t>(batches));
}

}  // namespace

TEST(OracleAgreementTest, HyalineMatchesModelOnRandomSchedules)
{
  std::mt19937 rng{2026};
  const std::vector<Config> configs{
      Make(Variant::kHyaline, 2, 1, 2, 0, true), Make(Variant::kHyaline, 3, 2, 2),
      Make(Variant::kHyaline, 3, 1, 3, 0, true), Make(Variant::kHyaline, 2, 4, 3)};
  for (int round = 0; round < 1000; ++round) {
    const auto &c = configs[round % configs.size()];
    Agree<BasicHyaline<false, TurnstileHooks>>(Variant::kHyaline, oracle::BuildProgram(c),
                                               c.batches, rng);
    if (HasFatalFailure() || HasNonfatalFailure()) return;
  }
}

TEST(OracleAgreementTest, Hyaline1MatchesModelOnRandomSchedules)
{
  std::mt19937 rng{2027};
  const std::vector<Config> configs{Make(Variant::kHyaline1, 2, 1, 2, 0, true),
                                    Make(Variant::kHyaline1, 3, 1, 2),
                                    Make(Variant::kHyaline1, 3, 3, 3, 0, true)};
  for (int round = 0; round < 1000; ++round) {
    const auto &c = configs[round % configs.size()];
    Agree<BasicHyaline1<false, TurnstileHooks>>(Variant::kHyaline1, oracle::BuildProgram(c),
                                                c.batches, rng);
    if (HasFatalFailure() || HasNonfatalFailure()) return;
  }
}

}  // namespace hyaline::test
