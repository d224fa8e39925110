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

#ifndef HYALINE_BENCH_BENCH_HPP
#define HYALINE_BENCH_BENCH_HPP

// C++ standard libraries
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

// local sources
#include "hyaline/hyaline.h"

namespace hyaline::bench
{
void DefaultConfig(hyl_bench_config &config);

/// Slot count a run uses when the configuration leaves it at 0.
std::size_t EffectiveSlots(const hyl_bench_config &config);

/// Throws std::invalid_argument for an unusable configuration.
void Validate(const hyl_bench_config &config);

/**
 * @brief Prefills the structure, runs the workers for the configured duration and
 * fills `record`.
 *
 * @retval HYL_EVIOLATE if the magic-word detector fired.
 */
hyl_status Run(const hyl_bench_config &config, hyl_bench_record &record);

/// Column names of the CSV output, in order.
const std::vector<std::string> &CsvColumns();

void WriteCsvHeader(std::ostream &out);
void WriteCsvRow(std::ostream &out, const hyl_bench_record &record);

/// Mean over sampling windows of (unreclaimed sample / operations in the window).
double AveragePerOp(const std::vector<double> &unreclaimed, const std::vector<double> &window_ops);

}  // namespace hyaline::bench

#endif  // HYALINE_BENCH_BENCH_HPP
