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

#include "core/smr_core.hpp"

namespace hyaline
{
Word
ComputeAdjs(const Word k, const unsigned word_bits)
{
  if (k == 0 || !std::has_single_bit(k)) {
    throw std::invalid_argument{"slot count must be a non-zero power of two"};
  }
  switch (word_bits) {
    case 64:
      return AdjsFor<std::uint64_t>(k);
    case 32:
      if (k > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument{"slot count exceeds the word width"};
      }
      return AdjsFor<std::uint32_t>(static_cast<std::uint32_t>(k));
    default:
      throw std::invalid_argument{"word width must be 32 or 64"};
  }
}

}  // namespace hyaline
