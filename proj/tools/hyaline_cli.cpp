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

// Command-line front end: `bench` runs one measurement, `oracle` explores every
// interleaving of a small configuration.

// C++ standard libraries
#include <cstdio>
#include <memory>
#include <string>

// external sources
#include "CLI11.hpp"

// local sources
#include "hyaline/hyaline.h"

namespace
{
int
Report(const hyl_status status, const char *what)
{
  std::fprintf(stderr, "%s: %s (%s)\n", what, hyl_status_string(status), hyl_last_error());
  return 2;
}

struct BenchArgs {
  std::string scheme{"hyaline"};
  std::string ds{"hashmap"};
  std::string workload{"write"};
  std::string csv;
  bool series{false};
};

int
RunBench(const BenchArgs &args, hyl_bench_config config)
{
  if (const auto s = hyl_scheme_from_name(args.scheme.c_str(), &config.scheme); s != HYL_OK) {
    return Report(s, "--scheme");
  }
  if (const auto s = hyl_structure_from_name(args.ds.c_str(), &config.structure); s != HYL_OK) {
    return Report(s, "--ds");
  }
  if (const auto s = hyl_workload_from_name(args.workload.c_str(), &config.workload);
      s != HYL_OK) {
    return Report(s, "--workload");
  }

  // the record carries a few kilobytes of samples
  auto record = std::make_unique<hyl_bench_record>();
  const auto status = hyl_bench_run(&config, record.get());
  if (status != HYL_OK && status != HYL_EVIOLATE) return Report(status, "bench");

  std::printf("%s %s/%s threads=%u ops=%llu throughput=%.0f ops/s unreclaimed/op=%.6f "
              "unreclaimed_final=%llu retired=%llu freed=%llu slots=%zu\n",
              hyl_scheme_name(config.scheme), hyl_structure_name(config.structure),
              hyl_workload_name(config.workload), config.threads,
              static_cast<unsigned long long>(record->ops_total), record->throughput_ops_s,
              record->unreclaimed_avg_per_op,
              static_cast<unsigned long long>(record->unreclaimed_final),
              static_cast<unsigned long long>(record->retired_total),
              static_cast<unsigned long long>(record->freed_total), record->final_slots);
  if (config.stall > 0 && config.scheme == HYL_SCHEME_HYALINE_S) {
    std::printf("stalled slot acks=%lld\n", static_cast<long long>(record->stalled_slot_acks));
  }

  if (args.series) {
    std::printf("unreclaimed per second:");
    for (std::size_t i = 0; i < record->samples; ++i) {
      std::printf(" %llu", static_cast<unsigned long long>(record->unreclaimed[i]));
    }
    std::printf("\n");
  }
  if (!args.csv.empty()) {
    if (const auto s = hyl_bench_append_csv(record.get(), 1, args.csv.c_str()); s != HYL_OK) {
      return Report(s, "--csv");
    }
  }
  if (status == HYL_EVIOLATE) {
    std::fprintf(stderr, "safety abort: use_after_free=%llu double_free=%llu\n",
                 static_cast<unsigned long long>(record->use_after_free),
                 static_cast<unsigned long long>(record->double_free));
    return 1;
  }
  return 0;
}

int
RunOracle(const std::string &variant, hyl_oracle_config config)
{
  if (const auto s = hyl_variant_from_name(variant.c_str(), &config.variant); s != HYL_OK) {
    return Report(s, "--variant");
  }
  hyl_oracle_result result{};
  const auto status = hyl_oracle_run(&config, &result);
  std::printf("variant=%s threads=%u slots=%u batches=%u stalled=%u states=%llu terminal=%llu\n",
              variant.c_str(), config.threads, config.slots, config.batches, config.stalled,
              static_cast<unsigned long long>(result.states),
              static_cast<unsigned long long>(result.terminal_states));
  switch (status) {
    case HYL_OK:
      std::printf("PASS max_retire_head_updates=%u max_enter_steps=%u max_leave_steps=%u\n",
                  result.max_retire_head_updates, result.max_enter_steps,
                  result.max_leave_steps);
      return 0;
    case HYL_EVIOLATE:
      std::printf("FAIL %s\nwitness: %s\n", result.violation, result.witness);
      return 1;
    default:
      return Report(status, "oracle");
  }
}

}  // namespace

int
main(int argc, char **argv)
{
  CLI::App app{"Hyaline memory reclamation: benchmark and interleaving oracle"};
  app.require_subcommand(1);

  BenchArgs bench_args;
  hyl_bench_config bench{};
  hyl_bench_config_default(&bench);
  auto *b = app.add_subcommand("bench", "Run one throughput / memory measurement");
  b->add_option("--scheme", bench_args.scheme, "hyaline|hyaline1|hyaline-s|hyaline1s|ebr|none")
      ->capture_default_str();
  b->add_option("--ds", bench_args.ds, "list|hashmap")->capture_default_str();
  b->add_option("--workload", bench_args.workload, "write|read")->capture_default_str();
  b->add_option("--threads", bench.threads)->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--readers", bench.readers, "Trailing get-only threads")->capture_default_str();
  b->add_option("--duration", bench.duration_s, "Seconds")->capture_default_str();
  b->add_option("--prefill", bench.prefill)->capture_default_str();
  b->add_option("--key-range", bench.key_range)->capture_default_str();
  b->add_option("--slots", bench.slots, "0 picks min(128, next power of two >= threads)")
      ->capture_default_str();
  b->add_option("--batch-min", bench.batch_min)->capture_default_str();
  b->add_option("--freq", bench.freq)->capture_default_str();
  b->add_option("--threshold", bench.threshold)->capture_default_str();
  b->add_option("--epochf", bench.epochf)->capture_default_str();
  b->add_option("--emptyf", bench.emptyf)->capture_default_str();
  b->add_option("--stall", bench.stall, "Leading threads that stall inside an operation")
      ->capture_default_str();
  b->add_option("--seed", bench.seed)->capture_default_str();
  b->add_option("--cas-restart", bench.cas_restart)->capture_default_str();
  b->add_option("--csv", bench_args.csv, "Append the record to this file");
  b->add_flag("--series", bench_args.series, "Print the unreclaimed time series");

  std::string variant{"hyaline"};
  hyl_oracle_config oracle{};
  oracle.threads = 2;
  oracle.slots = 1;
  oracle.batches = 1;
  oracle.max_states = 2'000'000;
  bool trim = false;
  auto *o = app.add_subcommand("oracle", "Explore every interleaving of a small program");
  o->add_option("--variant", variant, "hyaline|hyaline1|hyaline-s|hyaline1s")
      ->capture_default_str();
  o->add_option("--threads", oracle.threads)->capture_default_str()->check(CLI::Range(1, 4));
  o->add_option("--slots", oracle.slots)->capture_default_str()->check(CLI::Range(1, 4));
  o->add_option("--batches", oracle.batches)->capture_default_str()->check(CLI::Range(1, 3));
  o->add_option("--stalled", oracle.stalled, "Extra threads that stall in slot 0")
      ->capture_default_str();
  o->add_flag("--trim", trim, "Workers trim once before leaving");
  o->add_option("--max-states", oracle.max_states)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (b->parsed()) return RunBench(bench_args, bench);
  oracle.trim = trim ? 1 : 0;
  return RunOracle(variant, oracle);
}
