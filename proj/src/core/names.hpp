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

#ifndef HYALINE_CORE_NAMES_HPP
#define HYALINE_CORE_NAMES_HPP

// C++ standard libraries
#include <optional>
#include <string_view>

// local sources
#include "hyaline/hyaline.h"

namespace hyaline
{
std::string_view SchemeName(hyl_scheme_kind kind);
std::optional<hyl_scheme_kind> SchemeFromName(std::string_view name);

std::string_view StructureName(hyl_structure s);
std::optional<hyl_structure> StructureFromName(std::string_view name);

std::string_view WorkloadName(hyl_workload w);
std::optional<hyl_workload> WorkloadFromName(std::string_view name);

}  // namespace hyaline

#endif  // HYALINE_CORE_NAMES_HPP
