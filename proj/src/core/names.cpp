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

#include "core/names.hpp"

// C++ standard libraries
#include <array>
#include <utility>

namespace hyaline
{
namespace
{
constexpr std::array<std::pair<hyl_scheme_kind, std::string_view>, 6> kSchemes{{
    {HYL_SCHEME_HYALINE, "hyaline"},
    {HYL_SCHEME_HYALINE1, "hyaline1"},
    {HYL_SCHEME_HYALINE_S, "hyaline-s"},
    {HYL_SCHEME_HYALINE1S, "hyaline1s"},
    {HYL_SCHEME_EBR, "ebr"},
    {HYL_SCHEME_NONE, "none"},
}};

}  // namespace

std::string_view
SchemeName(const hyl_scheme_kind kind)
{
  for (const auto &[k, name] : kSchemes) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<hyl_scheme_kind>
SchemeFromName(const std::string_view name)
{
  for (const auto &[k, n] : kSchemes) {
    if (n == name) return k;
  }
  // spellings with a dash before the 1
  if (name == "hyaline-1") return HYL_SCHEME_HYALINE1;
  if (name == "hyaline-1s") return HYL_SCHEME_HYALINE1S;
  if (name == "epoch") return HYL_SCHEME_EBR;
  return std::nullopt;
}

std::string_view
StructureName(const hyl_structure s)
{
  return s == HYL_DS_LIST ? "list" : "hashmap";
}

std::optional<hyl_structure>
StructureFromName(const std::string_view name)
{
  if (name == "list") return HYL_DS_LIST;
  if (name == "hashmap") return HYL_DS_HASHMAP;
  return std::nullopt;
}

std::string_view
WorkloadName(const hyl_workload w)
{
  return w == HYL_WORKLOAD_WRITE ? "write" : "read";
}

std::optional<hyl_workload>
WorkloadFromName(const std::string_view name)
{
  if (name == "write") return HYL_WORKLOAD_WRITE;
  if (name == "read") return HYL_WORKLOAD_READ;
  return std::nullopt;
}

}  // namespace hyaline
