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

#ifndef HYALINE_HYALINE_H
#define HYALINE_HYALINE_H

/*
 * C interface of the Hyaline safe-memory-reclamation library.
 *
 * Every object crossing this boundary is either a plain C struct or an opaque
 * handle created and destroyed through the functions below. Functions that can
 * fail return an hyl_status; the last error message of the calling thread is
 * available through hyl_last_error().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HYALINE_BUILDING_LIBRARY)
#define HYL_API __declspec(dllexport)
#else
#define HYL_API __declspec(dllimport)
#endif
#else
#define HYL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hyl_status {
  HYL_OK = 0,
  HYL_EINVAL = 1,    /* bad argument or configuration */
  HYL_ENOMEM = 2,    /* allocation failure */
  HYL_ESTATE = 3,    /* call not allowed in the current thread state */
  HYL_ENOSLOT = 4,   /* no free slot left (owner-slot schemes) */
  HYL_EIO = 5,       /* file could not be written */
  HYL_EVIOLATE = 6,  /* a safety check fired (benchmark or oracle) */
  HYL_EBOUND = 7,    /* oracle state-space bound exceeded */
  HYL_EINTERNAL = 8
} hyl_status;

typedef enum hyl_scheme_kind {
  HYL_SCHEME_HYALINE = 0,
  HYL_SCHEME_HYALINE1 = 1,
  HYL_SCHEME_HYALINE_S = 2,
  HYL_SCHEME_HYALINE1S = 3,
  HYL_SCHEME_EBR = 4,
  HYL_SCHEME_NONE = 5
} hyl_scheme_kind;

/*
 * Intrusive three-word header every reclaimable node embeds.
 *
 * link:       batch counter (counter node), retirement-list link, or birth era
 * ref_node:   address of the batch's counter node; on the counter node itself
 *             the batch's wrap-around adjustment constant
 * batch_next: next node of the same batch (cyclic); bit 0 marks nodes owned by
 *             the library
 */
typedef struct hyl_node {
  uintptr_t link;
  uintptr_t ref_node;
  uintptr_t batch_next;
} hyl_node;

/* Invoked exactly once per retired node, on an arbitrary thread. */
typedef void (*hyl_free_fn)(hyl_node* node, void* user);

typedef struct hyl_config {
  hyl_scheme_kind kind;
  size_t slots;       /* Hyaline/-S: initial slot count (power of two) */
  size_t max_threads; /* Hyaline-1/-1S: number of owner slots; EBR: registry */
  size_t batch_min;   /* minimum batch size before sealing */
  uint64_t freq;      /* allocations per era tick (robust variants) */
  int64_t threshold;  /* ack count after which a slot is avoided (Hyaline-S) */
  uint64_t epochf;    /* EBR: operations per epoch increment */
  uint64_t emptyf;    /* EBR: retires per limbo scan */
} hyl_config;

typedef struct hyl_scheme hyl_scheme;
typedef struct hyl_thread hyl_thread;

HYL_API const char* hyl_status_string(hyl_status status);
HYL_API const char* hyl_last_error(void);
HYL_API const char* hyl_scheme_name(hyl_scheme_kind kind);
HYL_API hyl_status hyl_scheme_from_name(const char* name, hyl_scheme_kind* out);

/* Fills `config` with the library defaults for `kind`. */
HYL_API void hyl_config_default(hyl_scheme_kind kind, hyl_config* config);

/* Wrap-around adjustment constant floor((2^bits - 1) / k) + 1 mod 2^bits. */
HYL_API hyl_status hyl_compute_adjs(uint64_t k, unsigned word_bits, uint64_t* out);

HYL_API hyl_status hyl_scheme_create(const hyl_config* config, hyl_free_fn free_fn, void* user,
                                     hyl_scheme** out);
/* All threads must be detached first. */
HYL_API void hyl_scheme_destroy(hyl_scheme* scheme);
/* Current number of slots (grows for Hyaline-S). */
HYL_API size_t hyl_scheme_slots(const hyl_scheme* scheme);
/* Number of batches (or limbo scans for EBR) that released memory. */
HYL_API uint64_t hyl_scheme_batches_freed(const hyl_scheme* scheme);

HYL_API hyl_status hyl_thread_attach(hyl_scheme* scheme, hyl_thread** out);
/* Flushes the local batch and releases the thread's slot. */
HYL_API hyl_status hyl_thread_detach(hyl_thread* thread);

HYL_API hyl_status hyl_enter(hyl_thread* thread);
/* General Hyaline: enter a specific slot instead of the thread's default. */
HYL_API hyl_status hyl_enter_slot(hyl_thread* thread, size_t slot);
HYL_API hyl_status hyl_leave(hyl_thread* thread);
HYL_API hyl_status hyl_trim(hyl_thread* thread);
/* Slot the thread entered last (or owns). */
HYL_API size_t hyl_thread_slot(const hyl_thread* thread);

/* Stamps a freshly allocated node with its birth era (no-op for non-robust schemes). */
HYL_API void hyl_init_node(hyl_thread* thread, hyl_node* node);
/* Reads a shared link word; robust schemes validate it against the era clock. */
HYL_API uintptr_t hyl_deref(hyl_thread* thread, const uintptr_t* link);
HYL_API hyl_status hyl_retire(hyl_thread* thread, hyl_node* node);
/* Pads the pending batch with library nodes and retires it. */
HYL_API hyl_status hyl_flush(hyl_thread* thread);

/* ------------------------------------------------------------------------ */
/* Benchmark driver                                                          */
/* ------------------------------------------------------------------------ */

typedef enum hyl_structure { HYL_DS_LIST = 0, HYL_DS_HASHMAP = 1 } hyl_structure;
typedef enum hyl_workload { HYL_WORKLOAD_WRITE = 0, HYL_WORKLOAD_READ = 1 } hyl_workload;

typedef struct hyl_bench_config {
  hyl_scheme_kind scheme;
  hyl_structure structure;
  hyl_workload workload;
  unsigned threads;
  unsigned readers;   /* trailing threads that only run get() */
  double duration_s;
  uint64_t prefill;
  uint64_t key_range; /* keys are drawn from [0, key_range) */
  size_t slots;       /* 0 selects min(128, next power of two >= threads) */
  size_t batch_min;
  uint64_t freq;
  int64_t threshold;
  uint64_t epochf;
  uint64_t emptyf;
  unsigned stall;     /* leading threads that enter, deref once and stall */
  uint64_t seed;
  unsigned cas_restart; /* CAS failures before an operation restarts */
} hyl_bench_config;

#define HYL_BENCH_MAX_SAMPLES 4096

typedef struct hyl_bench_record {
  hyl_bench_config config;
  uint64_t ops_total;
  double elapsed_s;
  double throughput_ops_s;
  double unreclaimed_avg_per_op;
  uint64_t unreclaimed_final;
  uint64_t retired_total;
  uint64_t freed_total;          /* at shutdown, after every thread left and flushed */
  uint64_t frees_min_thread;
  uint64_t frees_max_thread;
  double reader_free_fraction;
  uint64_t use_after_free;       /* canary violations observed by readers */
  uint64_t double_free;          /* canary violations observed by the free callback */
  int64_t stalled_slot_acks;     /* Hyaline-S: acks of the first stalled thread's slot */
  size_t final_slots;
  size_t samples;                /* entries used in `unreclaimed` */
  uint64_t unreclaimed[HYL_BENCH_MAX_SAMPLES]; /* retired - freed, one sample per second */
} hyl_bench_record;

HYL_API void hyl_bench_config_default(hyl_bench_config* config);
HYL_API hyl_status hyl_structure_from_name(const char* name, hyl_structure* out);
HYL_API hyl_status hyl_workload_from_name(const char* name, hyl_workload* out);
HYL_API const char* hyl_structure_name(hyl_structure s);
HYL_API const char* hyl_workload_name(hyl_workload w);

/* Runs one measurement. Returns HYL_EVIOLATE when a canary check fired; the
   record is filled either way. */
HYL_API hyl_status hyl_bench_run(const hyl_bench_config* config, hyl_bench_record* record);

/* Writes the CSV header followed by one row per record. `count` may be 0. */
HYL_API hyl_status hyl_bench_write_csv(const hyl_bench_record* records, size_t count,
                                       const char* path);
/* Appends rows, writing the header first when the file is new or empty. */
HYL_API hyl_status hyl_bench_append_csv(const hyl_bench_record* records, size_t count,
                                        const char* path);

/* ------------------------------------------------------------------------ */
/* Interleaving oracle                                                       */
/* ------------------------------------------------------------------------ */

typedef enum hyl_variant {
  HYL_VARIANT_HYALINE = 0,
  HYL_VARIANT_HYALINE1 = 1,
  HYL_VARIANT_HYALINE_S = 2,
  HYL_VARIANT_HYALINE1S = 3
} hyl_variant;

typedef struct hyl_oracle_config {
  hyl_variant variant;
  unsigned threads;
  unsigned slots;
  unsigned batches;
  unsigned stalled;       /* extra stub threads: enter, deref, stall forever */
  int trim;               /* workers trim once before leaving */
  uint64_t max_states;
} hyl_oracle_config;

typedef struct hyl_oracle_result {
  int passed;
  uint64_t states;
  uint64_t terminal_states;
  uint64_t frees;
  unsigned max_retire_head_updates;
  unsigned max_enter_steps;
  unsigned max_leave_steps;
  char violation[256];    /* "invariant: detail", empty on pass */
  char witness[1024];     /* schedule as comma-separated thread indices */
} hyl_oracle_result;

HYL_API hyl_status hyl_variant_from_name(const char* name, hyl_variant* out);
HYL_API hyl_status hyl_oracle_run(const hyl_oracle_config* config, hyl_oracle_result* result);

#ifdef __cplusplus
}
#endif

#endif  // HYALINE_HYALINE_H
