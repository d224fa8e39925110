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

#include "bench/bench.hpp"

// C++ standard libraries
#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <memory>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

// local sources
#include "core/ebr.hpp"
#include "core/hyaline.hpp"
#include "core/hyaline1.hpp"
#include "core/names.hpp"
#include "ds/list.hpp"

namespace hyaline::bench
{
namespace
{
using Clock = std::chrono::steady_clock;

/// Operations between two publications of a worker's op count.
constexpr std::uint64_t kPublishEvery = 64;

struct alignas(kCacheLine) WorkerSlot {
  std::atomic<std::uint64_t> ops{0};
  std::uint64_t frees{0};
};

enum class Role { kStall, kWriter, kReader };

/// Seeds one stream per (seed, thread) pair.
std::mt19937_64
StreamFor(const std::uint64_t seed, const std::uint64_t index)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32U)};
  return std::mt19937_64{seq};
}

template <class Scheme, template <class> class Structure>
hyl_status
RunWith(Scheme &scheme, ds::SafetyLedger &ledger, const hyl_bench_config &config,
        hyl_bench_record &record)
{
  using Thread = typename Scheme::Thread;
  Structure<Scheme> structure{scheme, ledger, config.cas_restart};

  const auto key_range = static_cast<std::int64_t>(config.key_range);
  {
    auto rng = StreamFor(config.seed, ~std::uint64_t{0});
    std::uniform_int_distribution<std::int64_t> keys{0, key_range - 1};
    auto main = scheme.Attach();
    const auto target = std::min<std::uint64_t>(config.prefill, config.key_range);
    for (std::uint64_t inserted = 0; inserted < target;) {
      const auto key = keys(rng);
      if (structure.Insert(main, key, key)) ++inserted;
    }
    scheme.Detach(main);
  }

  const unsigned n = config.threads;
  std::vector<Role> roles(n, Role::kWriter);
  for (unsigned i = 0; i < n; ++i) {
    if (i < config.stall) {
      roles[i] = Role::kStall;
    } else if (i >= n - config.readers) {
      roles[i] = Role::kReader;
    }
  }

  std::vector<Thread> threads(n);
  auto slots = std::make_unique<WorkerSlot[]>(n);
  std::atomic<bool> stop{false};
  std::atomic<bool> release{false};
  std::atomic<unsigned> stalled_ready{0};
  std::barrier start{static_cast<std::ptrdiff_t>(n + 1)};
  std::int64_t stalled_acks = 0;

  auto worker = [&](const unsigned i) {
    ds::tls_free_counter = &slots[i].frees;
    threads[i] = scheme.Attach();
    auto &t = threads[i];
    auto rng = StreamFor(config.seed, i);
    std::uniform_int_distribution<std::int64_t> keys{0, key_range - 1};
    std::uniform_int_distribution<int> percent{0, 99};
    start.arrive_and_wait();

    if (roles[i] == Role::kStall) {
      scheme.Enter(t);
      (void)scheme.Deref(t, structure.Entry(0));
      stalled_ready.fetch_add(1, std::memory_order_release);
      while (!release.load(std::memory_order_acquire)) {
        std::this_thread::sleep_for(std::chrono::milliseconds{1});
      }
      scheme.Leave(t);
      ds::tls_free_counter = nullptr;
      return;
    }

    std::uint64_t ops = 0;
    while (!stop.load(std::memory_order_relaxed)) {
      if (ledger.abort.load(std::memory_order_relaxed)) break;
      const auto key = keys(rng);
      if (roles[i] == Role::kReader) {
        (void)structure.Get(t, key);
      } else if (config.workload == HYL_WORKLOAD_WRITE) {
        if (percent(rng) < 50) {
          structure.Insert(t, key, key);
        } else {
          structure.Remove(t, key);
        }
      } else {
        const int p = percent(rng);
        if (p < 90) {
          (void)structure.Get(t, key);
        } else if (p < 95) {
          structure.Insert(t, key, key);
        } else {
          structure.Remove(t, key);
        }
      }
      if (++ops % kPublishEvery == 0) slots[i].ops.store(ops, std::memory_order_relaxed);
    }
    slots[i].ops.store(ops, std::memory_order_relaxed);
    ds::tls_free_counter = nullptr;
  };

  std::vector<std::thread> workers;
  workers.reserve(n);
  for (unsigned i = 0; i < n; ++i) workers.emplace_back(worker, i);
  start.arrive_and_wait();
  const auto begin = Clock::now();

  auto total_ops = [&] {
    std::uint64_t sum = 0;
    for (unsigned i = 0; i < n; ++i) sum += slots[i].ops.load(std::memory_order_relaxed);
    return sum;
  };
  auto unreclaimed = [&] {
    const auto freed = ledger.freed.load(std::memory_order_relaxed);
    const auto retired = ledger.retired.load(std::memory_order_relaxed);
    return retired > freed ? retired - freed : 0;
  };

  std::vector<double> samples;
  std::vector<double> window_ops;
  std::uint64_t last_ops = 0;
  const auto duration = std::chrono::duration<double>(config.duration_s);
  for (unsigned s = 1; s <= HYL_BENCH_MAX_SAMPLES; ++s) {
    const auto at = begin + std::chrono::duration_cast<Clock::duration>(std::chrono::seconds{s});
    if (at - begin > duration) break;
    std::this_thread::sleep_until(at);
    const auto ops = total_ops();
    samples.push_back(static_cast<double>(unreclaimed()));
    window_ops.push_back(static_cast<double>(ops - last_ops));
    last_ops = ops;
    if (ledger.abort.load(std::memory_order_relaxed)) break;
  }
  std::this_thread::sleep_until(begin + std::chrono::duration_cast<Clock::duration>(duration));
  if (samples.empty()) {
    samples.push_back(static_cast<double>(unreclaimed()));
    window_ops.push_back(static_cast<double>(total_ops()));
  }

  if constexpr (requires { scheme.Acks(std::size_t{0}); }) {
    if (config.stall > 0) {
      while (stalled_ready.load(std::memory_order_acquire) < config.stall) {
        std::this_thread::yield();
      }
      stalled_acks = scheme.Acks(threads[0].Slot());
    }
  }
  stop.store(true, std::memory_order_release);
  for (unsigned i = 0; i < n; ++i) {
    if (roles[i] != Role::kStall) workers[i].join();
  }
  const auto elapsed = std::chrono::duration<double>(Clock::now() - begin).count();
  // stalled threads still hold their slots here
  record.unreclaimed_final = unreclaimed();
  release.store(true, std::memory_order_release);
  for (unsigned i = 0; i < n; ++i) {
    if (roles[i] == Role::kStall) workers[i].join();
  }

  for (auto &t : threads) scheme.Detach(t);

  record.ops_total = total_ops();
  record.elapsed_s = elapsed;
  record.throughput_ops_s = elapsed > 0 ? static_cast<double>(record.ops_total) / elapsed : 0.0;
  record.unreclaimed_avg_per_op = AveragePerOp(samples, window_ops);
  record.samples = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    record.unreclaimed[i] = static_cast<std::uint64_t>(samples[i]);
  }
  record.retired_total = ledger.retired.load(std::memory_order_relaxed);
  record.freed_total = ledger.freed.load(std::memory_order_relaxed);

  std::uint64_t min_frees = UINT64_MAX;
  std::uint64_t max_frees = 0;
  std::uint64_t reader_frees = 0;
  std::uint64_t worker_frees = 0;
  for (unsigned i = 0; i < n; ++i) {
    if (roles[i] == Role::kStall) continue;
    const auto f = slots[i].frees;
    min_frees = std::min(min_frees, f);
    max_frees = std::max(max_frees, f);
    worker_frees += f;
    if (roles[i] == Role::kReader) reader_frees += f;
  }
  record.frees_min_thread = min_frees == UINT64_MAX ? 0 : min_frees;
  record.frees_max_thread = max_frees;
  record.reader_free_fraction =
      worker_frees > 0 ? static_cast<double>(reader_frees) / static_cast<double>(worker_frees)
                       : 0.0;
  record.stalled_slot_acks = stalled_acks;
  record.final_slots = scheme.Slots();
  record.use_after_free = ledger.use_after_free.load(std::memory_order_relaxed);
  record.double_free = ledger.double_free.load(std::memory_order_relaxed);
  return record.use_after_free + record.double_free > 0 ? HYL_EVIOLATE : HYL_OK;
}

template <class Scheme>
hyl_status
RunStructure(Scheme &scheme, ds::SafetyLedger &ledger, const hyl_bench_config &config,
             hyl_bench_record &record)
{
  if (config.structure == HYL_DS_LIST) return RunWith<Scheme, ds::List>(scheme, ledger, config, record);
  return RunWith<Scheme, ds::HashMap>(scheme, ledger, config, record);
}

}  // namespace

void
DefaultConfig(hyl_bench_config &config)
{
  config = hyl_bench_config{};
  config.scheme = HYL_SCHEME_HYALINE;
  config.structure = HYL_DS_HASHMAP;
  config.workload = HYL_WORKLOAD_WRITE;
  config.threads = 4;
  config.readers = 0;
  config.duration_s = 10.0;
  config.prefill = 50000;
  config.key_range = 100001;
  config.slots = 0;
  config.batch_min = 64;
  config.freq = 150;
  config.threshold = 8192;
  config.epochf = 150;
  config.emptyf = 120;
  config.stall = 0;
  config.seed = 1;
  config.cas_restart = static_cast<unsigned>(ds::kDefaultRestartAfter);
}

std::size_t
EffectiveSlots(const hyl_bench_config &config)
{
  if (config.slots != 0) return config.slots;
  return std::min<std::size_t>(128, NextPow2(std::max(config.threads, 1U)));
}

void
Validate(const hyl_bench_config &config)
{
  if (config.threads == 0) throw std::invalid_argument{"threads must be positive"};
  if (config.stall + config.readers > config.threads) {
    throw std::invalid_argument{"stalled plus reader threads exceed the thread count"};
  }
  if (config.key_range == 0) throw std::invalid_argument{"key range must be positive"};
  if (config.key_range > static_cast<std::uint64_t>(INT64_MAX)) {
    throw std::invalid_argument{"key range too large"};
  }
  if (!(config.duration_s > 0.0)) throw std::invalid_argument{"duration must be positive"};
  if (config.batch_min == 0) throw std::invalid_argument{"batch_min must be positive"};
  const auto slots = EffectiveSlots(config);
  if (!std::has_single_bit(slots)) throw std::invalid_argument{"slots must be a power of two"};
  if (SchemeName(config.scheme) == "unknown") throw std::invalid_argument{"unknown scheme"};
  if (config.structure != HYL_DS_LIST && config.structure != HYL_DS_HASHMAP) {
    throw std::invalid_argument{"unknown structure"};
  }
  if (config.workload != HYL_WORKLOAD_WRITE && config.workload != HYL_WORKLOAD_READ) {
    throw std::invalid_argument{"unknown workload"};
  }
}

hyl_status
Run(const hyl_bench_config &config, hyl_bench_record &record)
{
  Validate(config);
  std::memset(&record, 0, sizeof(record));
  record.config = config;
  record.config.slots = EffectiveSlots(config);

  ds::SafetyLedger ledger;
  const auto free_fn = &ds::FreeListNode;
  const std::size_t owners = config.threads + 1U;
  switch (config.scheme) {
    case HYL_SCHEME_HYALINE: {
      Hyaline scheme{{record.config.slots, config.batch_min, config.freq, config.threshold},
                     free_fn, &ledger};
      return RunStructure(scheme, ledger, config, record);
    }
    case HYL_SCHEME_HYALINE_S: {
      HyalineS scheme{{record.config.slots, config.batch_min, config.freq, config.threshold},
                      free_fn, &ledger};
      return RunStructure(scheme, ledger, config, record);
    }
    case HYL_SCHEME_HYALINE1: {
      Hyaline1 scheme{{owners, config.batch_min, config.freq}, free_fn, &ledger};
      return RunStructure(scheme, ledger, config, record);
    }
    case HYL_SCHEME_HYALINE1S: {
      Hyaline1S scheme{{owners, config.batch_min, config.freq}, free_fn, &ledger};
      return RunStructure(scheme, ledger, config, record);
    }
    case HYL_SCHEME_EBR: {
      Ebr scheme{{owners, config.epochf, config.emptyf}, free_fn, &ledger};
      return RunStructure(scheme, ledger, config, record);
    }
    case HYL_SCHEME_NONE: {
      hyl_status status = HYL_OK;
      {
        NoReclaim scheme{free_fn, &ledger};
        status = RunStructure(scheme, ledger, config, record);
      }
      return status;
    }
  }
  throw std::invalid_argument{"unknown scheme"};
}

double
AveragePerOp(const std::vector<double> &unreclaimed, const std::vector<double> &window_ops)
{
  double sum = 0.0;
  std::size_t windows = 0;
  for (std::size_t i = 0; i < unreclaimed.size() && i < window_ops.size(); ++i) {
    if (window_ops[i] <= 0.0) continue;
    sum += unreclaimed[i] / window_ops[i];
    ++windows;
  }
  return windows == 0 ? 0.0 : sum / static_cast<double>(windows);
}

const std::vector<std::string> &
CsvColumns()
{
  static const std::vector<std::string> columns{
      "scheme",          "structure",        "workload",         "threads",
      "duration_s",      "ops_total",        "throughput_ops_s", "unreclaimed_avg_per_op",
      "unreclaimed_final", "frees_min_thread", "frees_max_thread", "reader_free_fraction",
      "seed"};
  return columns;
}

void
WriteCsvHeader(std::ostream &out)
{
  const auto &columns = CsvColumns();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) out << ',';
    out << columns[i];
  }
  out << '\n';
}

void
WriteCsvRow(std::ostream &out, const hyl_bench_record &record)
{
  const auto &c = record.config;
  out << SchemeName(c.scheme) << ',' << StructureName(c.structure) << ','
      << WorkloadName(c.workload) << ',' << c.threads << ',' << std::setprecision(6)
      << c.duration_s << ',' << record.ops_total << ',' << std::fixed << std::setprecision(1)
      << record.throughput_ops_s << ',' << std::defaultfloat << std::setprecision(6)
      << record.unreclaimed_avg_per_op << ',' << record.unreclaimed_final << ','
      << record.frees_min_thread << ',' << record.frees_max_thread << ','
      << record.reader_free_fraction << ',' << c.seed << '\n';
}

}  // namespace hyaline::bench
