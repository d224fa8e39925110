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

#include "hyaline/hyaline.h"

// C++ standard libraries
#include <algorithm>
#include <atomic>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <type_traits>

// local sources
#include "bench/bench.hpp"
#include "core/ebr.hpp"
#include "core/hyaline.hpp"
#include "core/hyaline1.hpp"
#include "core/names.hpp"
#include "oracle/model.hpp"

static_assert(sizeof(std::atomic<std::uintptr_t>) == sizeof(std::uintptr_t));
static_assert(std::atomic<std::uintptr_t>::is_always_lock_free);

/*######################################################################################
 * Opaque handles
 *####################################################################################*/

struct hyl_thread {
  virtual ~hyl_thread() = default;
  virtual hyl_status Enter() = 0;
  virtual hyl_status EnterSlot(std::size_t slot) = 0;
  virtual hyl_status Leave() = 0;
  virtual hyl_status Trim() = 0;
  virtual std::size_t Slot() const = 0;
  virtual void InitNode(hyl_node *node) = 0;
  virtual std::uintptr_t Deref(const std::atomic<std::uintptr_t> &link) = 0;
  virtual hyl_status Retire(hyl_node *node) = 0;
  virtual hyl_status Flush() = 0;
  virtual hyl_status Detach() = 0;
};

struct hyl_scheme {
  virtual ~hyl_scheme() = default;
  virtual hyl_thread *Attach() = 0;
  virtual std::size_t Slots() const = 0;
  virtual std::uint64_t BatchesFreed() const = 0;
  std::atomic<std::size_t> attached{0};
};

namespace
{
thread_local std::string last_error;

hyl_status
Fail(const hyl_status status, const char *what)
{
  last_error = what;
  return status;
}

/// Runs `fn`, translating exceptions into status codes.
template <class Fn>
hyl_status
Guard(Fn &&fn)
{
  try {
    return fn();
  } catch (const hyaline::SlotExhausted &e) {
    return Fail(HYL_ENOSLOT, e.what());
  } catch (const std::bad_alloc &) {
    return Fail(HYL_ENOMEM, "out of memory");
  } catch (const std::invalid_argument &e) {
    return Fail(HYL_EINVAL, e.what());
  } catch (const std::length_error &e) {
    return Fail(HYL_EINVAL, e.what());
  } catch (const std::logic_error &e) {
    return Fail(HYL_ESTATE, e.what());
  } catch (const std::exception &e) {
    return Fail(HYL_EINTERNAL, e.what());
  } catch (...) {
    return Fail(HYL_EINTERNAL, "unknown error");
  }
}

template <class Scheme>
class SchemeImpl;

template <class Scheme>
class ThreadImpl final : public hyl_thread
{
 public:
  ThreadImpl(SchemeImpl<Scheme> &owner, typename Scheme::Thread t) : owner_{owner}, t_{std::move(t)}
  {
  }

  hyl_status
  Enter() override
  {
    if (t_.Active()) return Fail(HYL_ESTATE, "thread is already inside an operation");
    Impl().Enter(t_);
    return HYL_OK;
  }

  hyl_status
  EnterSlot(const std::size_t slot) override
  {
    if constexpr (requires { Impl().EnterAt(t_, slot); }) {
      if (t_.Active()) return Fail(HYL_ESTATE, "thread is already inside an operation");
      if (slot >= Impl().Slots()) return Fail(HYL_EINVAL, "slot index out of range");
      Impl().EnterAt(t_, slot);
      return HYL_OK;
    } else {
      return Fail(HYL_EINVAL, "scheme does not support choosing a slot");
    }
  }

  hyl_status
  Leave() override
  {
    if (!t_.Active()) return Fail(HYL_ESTATE, "thread is not inside an operation");
    Impl().Leave(t_);
    return HYL_OK;
  }

  hyl_status
  Trim() override
  {
    if (!t_.Active()) return Fail(HYL_ESTATE, "thread is not inside an operation");
    Impl().Trim(t_);
    return HYL_OK;
  }

  std::size_t
  Slot() const override
  {
    if constexpr (requires { t_.Slot(); }) {
      return t_.Slot();
    } else {
      return 0;
    }
  }

  void
  InitNode(hyl_node *node) override
  {
    Impl().InitNode(t_, node);
  }

  std::uintptr_t
  Deref(const std::atomic<std::uintptr_t> &link) override
  {
    return Impl().Deref(t_, link);
  }

  hyl_status
  Retire(hyl_node *node) override
  {
    Impl().Retire(t_, node);
    return HYL_OK;
  }

  hyl_status
  Flush() override
  {
    Impl().Flush(t_);
    return HYL_OK;
  }

  hyl_status
  Detach() override
  {
    if (t_.Active()) return Fail(HYL_ESTATE, "leave before detaching");
    Impl().Detach(t_);
    owner_.attached.fetch_sub(1, std::memory_order_relaxed);
    return HYL_OK;
  }

 private:
  Scheme &
  Impl()
  {
    return owner_.Impl();
  }

  SchemeImpl<Scheme> &owner_;
  typename Scheme::Thread t_;
};

template <class Scheme>
class SchemeImpl final : public hyl_scheme
{
 public:
  template <class... Args>
  explicit SchemeImpl(Args &&...args) : impl_{std::forward<Args>(args)...}
  {
  }

  hyl_thread *
  Attach() override
  {
    auto *t = new ThreadImpl<Scheme>{*this, impl_.Attach()};
    attached.fetch_add(1, std::memory_order_relaxed);
    return t;
  }

  std::size_t
  Slots() const override
  {
    return impl_.Slots();
  }

  std::uint64_t
  BatchesFreed() const override
  {
    if constexpr (requires { impl_.BatchesFreed(); }) {
      return impl_.BatchesFreed();
    } else {
      return 0;
    }
  }

  Scheme &
  Impl()
  {
    return impl_;
  }

 private:
  Scheme impl_;
};

hyl_status
WriteCsv(const hyl_bench_record *records, const std::size_t count, const char *path,
         const bool append)
{
  if (path == nullptr || (records == nullptr && count > 0)) {
    return Fail(HYL_EINVAL, "null argument");
  }
  std::error_code ec;
  const bool fresh = !append || !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
  std::ofstream out{path, append ? std::ios::app : std::ios::trunc};
  if (!out) return Fail(HYL_EIO, "cannot open the output file");
  if (fresh) hyaline::bench::WriteCsvHeader(out);
  for (std::size_t i = 0; i < count; ++i) hyaline::bench::WriteCsvRow(out, records[i]);
  out.flush();
  if (!out) return Fail(HYL_EIO, "write failed");
  return HYL_OK;
}

void
CopyText(char *dst, const std::size_t size, const std::string &src)
{
  const auto n = std::min(size - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

}  // namespace

/*######################################################################################
 * Status and names
 *####################################################################################*/

extern "C" {

const char *
hyl_status_string(const hyl_status status)
{
  switch (status) {
    case HYL_OK:
      return "ok";
    case HYL_EINVAL:
      return "invalid argument";
    case HYL_ENOMEM:
      return "out of memory";
    case HYL_ESTATE:
      return "invalid thread state";
    case HYL_ENOSLOT:
      return "no free slot";
    case HYL_EIO:
      return "i/o error";
    case HYL_EVIOLATE:
      return "safety violation";
    case HYL_EBOUND:
      return "state bound exceeded";
    case HYL_EINTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char *
hyl_last_error(void)
{
  return last_error.c_str();
}

const char *
hyl_scheme_name(const hyl_scheme_kind kind)
{
  return hyaline::SchemeName(kind).data();
}

hyl_status
hyl_scheme_from_name(const char *name, hyl_scheme_kind *out)
{
  if (name == nullptr || out == nullptr) return Fail(HYL_EINVAL, "null argument");
  const auto kind = hyaline::SchemeFromName(name);
  if (!kind.has_value()) return Fail(HYL_EINVAL, "unknown scheme name");
  *out = *kind;
  return HYL_OK;
}

void
hyl_config_default(const hyl_scheme_kind kind, hyl_config *config)
{
  if (config == nullptr) return;
  *config = hyl_config{};
  config->kind = kind;
  config->slots = 128;
  config->max_threads = 128;
  config->batch_min = 64;
  config->freq = 150;
  config->threshold = 8192;
  config->epochf = 150;
  config->emptyf = 120;
}

hyl_status
hyl_compute_adjs(const uint64_t k, const unsigned word_bits, uint64_t *out)
{
  if (out == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] {
    *out = hyaline::ComputeAdjs(k, word_bits);
    return HYL_OK;
  });
}

/*######################################################################################
 * Schemes and threads
 *####################################################################################*/

hyl_status
hyl_scheme_create(const hyl_config *config, hyl_free_fn free_fn, void *user, hyl_scheme **out)
{
  if (config == nullptr || free_fn == nullptr || out == nullptr) {
    return Fail(HYL_EINVAL, "null argument");
  }
  *out = nullptr;
  return Guard([&] {
    using namespace hyaline;
    const HyalineOptions general{config->slots, config->batch_min, config->freq,
                                 config->threshold};
    const Hyaline1Options single{config->max_threads, config->batch_min, config->freq};
    switch (config->kind) {
      case HYL_SCHEME_HYALINE:
        *out = new SchemeImpl<Hyaline>{general, free_fn, user};
        break;
      case HYL_SCHEME_HYALINE_S:
        *out = new SchemeImpl<HyalineS>{general, free_fn, user};
        break;
      case HYL_SCHEME_HYALINE1:
        *out = new SchemeImpl<Hyaline1>{single, free_fn, user};
        break;
      case HYL_SCHEME_HYALINE1S:
        *out = new SchemeImpl<Hyaline1S>{single, free_fn, user};
        break;
      case HYL_SCHEME_EBR:
        *out = new SchemeImpl<Ebr>{
            EbrOptions{config->max_threads, config->epochf, config->emptyf}, free_fn, user};
        break;
      case HYL_SCHEME_NONE:
        *out = new SchemeImpl<NoReclaim>{free_fn, user};
        break;
      default:
        return Fail(HYL_EINVAL, "unknown scheme kind");
    }
    return HYL_OK;
  });
}

void
hyl_scheme_destroy(hyl_scheme *scheme)
{
  delete scheme;
}

size_t
hyl_scheme_slots(const hyl_scheme *scheme)
{
  return scheme == nullptr ? 0 : scheme->Slots();
}

uint64_t
hyl_scheme_batches_freed(const hyl_scheme *scheme)
{
  return scheme == nullptr ? 0 : scheme->BatchesFreed();
}

hyl_status
hyl_thread_attach(hyl_scheme *scheme, hyl_thread **out)
{
  if (scheme == nullptr || out == nullptr) return Fail(HYL_EINVAL, "null argument");
  *out = nullptr;
  return Guard([&] {
    *out = scheme->Attach();
    return HYL_OK;
  });
}

hyl_status
hyl_thread_detach(hyl_thread *thread)
{
  if (thread == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] {
    const auto status = thread->Detach();
    if (status == HYL_OK) delete thread;
    return status;
  });
}

hyl_status
hyl_enter(hyl_thread *thread)
{
  if (thread == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] { return thread->Enter(); });
}

hyl_status
hyl_enter_slot(hyl_thread *thread, const size_t slot)
{
  if (thread == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] { return thread->EnterSlot(slot); });
}

hyl_status
hyl_leave(hyl_thread *thread)
{
  if (thread == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] { return thread->Leave(); });
}

hyl_status
hyl_trim(hyl_thread *thread)
{
  if (thread == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] { return thread->Trim(); });
}

size_t
hyl_thread_slot(const hyl_thread *thread)
{
  return thread == nullptr ? 0 : thread->Slot();
}

void
hyl_init_node(hyl_thread *thread, hyl_node *node)
{
  if (thread == nullptr || node == nullptr) return;
  thread->InitNode(node);
}

uintptr_t
hyl_deref(hyl_thread *thread, const uintptr_t *link)
{
  if (thread == nullptr || link == nullptr) return 0;
  return thread->Deref(*reinterpret_cast<const std::atomic<std::uintptr_t> *>(link));
}

hyl_status
hyl_retire(hyl_thread *thread, hyl_node *node)
{
  if (thread == nullptr || node == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] { return thread->Retire(node); });
}

hyl_status
hyl_flush(hyl_thread *thread)
{
  if (thread == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] { return thread->Flush(); });
}

/*######################################################################################
 * Benchmark
 *####################################################################################*/

void
hyl_bench_config_default(hyl_bench_config *config)
{
  if (config != nullptr) hyaline::bench::DefaultConfig(*config);
}

hyl_status
hyl_structure_from_name(const char *name, hyl_structure *out)
{
  if (name == nullptr || out == nullptr) return Fail(HYL_EINVAL, "null argument");
  const auto s = hyaline::StructureFromName(name);
  if (!s.has_value()) return Fail(HYL_EINVAL, "unknown structure name");
  *out = *s;
  return HYL_OK;
}

hyl_status
hyl_workload_from_name(const char *name, hyl_workload *out)
{
  if (name == nullptr || out == nullptr) return Fail(HYL_EINVAL, "null argument");
  const auto w = hyaline::WorkloadFromName(name);
  if (!w.has_value()) return Fail(HYL_EINVAL, "unknown workload name");
  *out = *w;
  return HYL_OK;
}

const char *
hyl_structure_name(const hyl_structure s)
{
  return hyaline::StructureName(s).data();
}

const char *
hyl_workload_name(const hyl_workload w)
{
  return hyaline::WorkloadName(w).data();
}

hyl_status
hyl_bench_run(const hyl_bench_config *config, hyl_bench_record *record)
{
  if (config == nullptr || record == nullptr) return Fail(HYL_EINVAL, "null argument");
  return Guard([&] {
    const auto status = hyaline::bench::Run(*config, *record);
    if (status == HYL_EVIOLATE) last_error = "magic-word check fired";
    return status;
  });
}

hyl_status
hyl_bench_write_csv(const hyl_bench_record *records, const size_t count, const char *path)
{
  return Guard([&] { return WriteCsv(records, count, path, false); });
}

hyl_status
hyl_bench_append_csv(const hyl_bench_record *records, const size_t count, const char *path)
{
  return Guard([&] { return WriteCsv(records, count, path, true); });
}

/*######################################################################################
 * Oracle
 *####################################################################################*/

hyl_status
hyl_variant_from_name(const char *name, hyl_variant *out)
{
  if (name == nullptr || out == nullptr) return Fail(HYL_EINVAL, "null argument");
  const auto v = hyaline::oracle::VariantFromName(name);
  if (!v.has_value()) return Fail(HYL_EINVAL, "unknown variant name");
  *out = static_cast<hyl_variant>(*v);
  return HYL_OK;
}

hyl_status
hyl_oracle_run(const hyl_oracle_config *config, hyl_oracle_result *result)
{
  if (config == nullptr || result == nullptr) return Fail(HYL_EINVAL, "null argument");
  if (config->variant > HYL_VARIANT_HYALINE1S) return Fail(HYL_EINVAL, "unknown variant");
  return Guard([&] {
    hyaline::oracle::Config c;
    c.variant = static_cast<hyaline::oracle::Variant>(config->variant);
    c.threads = static_cast<int>(config->threads);
    c.slots = static_cast<int>(config->slots);
    c.batches = static_cast<int>(config->batches);
    c.stalled = static_cast<int>(config->stalled);
    c.trim = config->trim != 0;
    if (config->max_states != 0) c.max_states = config->max_states;

    hyaline::oracle::Explorer explorer{c};
    const auto r = explorer.Run();
    *result = hyl_oracle_result{};
    result->passed = r.passed ? 1 : 0;
    result->states = r.states;
    result->terminal_states = r.terminal_states;
    result->frees = r.stats.frees;
    result->max_retire_head_updates = static_cast<unsigned>(r.stats.max_retire_head_updates);
    result->max_enter_steps = static_cast<unsigned>(r.stats.max_enter_steps);
    result->max_leave_steps = static_cast<unsigned>(r.stats.max_leave_steps);
    CopyText(result->violation, sizeof(result->violation), r.violation);
    CopyText(result->witness, sizeof(result->witness), r.witness);
    if (r.bounded) return Fail(HYL_EBOUND, "state bound exceeded");
    if (!r.passed) return Fail(HYL_EVIOLATE, "invariant violated");
    return HYL_OK;
  });
}

}  // extern "C"
