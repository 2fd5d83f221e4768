// Copyright 2026 The dp_embed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPEMBED_VERSION_HPP_
#define DPEMBED_VERSION_HPP_

#include <cstdint>

namespace dpembed {

inline constexpr const char* kVersionString = "0.1.0";

// Version of the on-disk artifact container format.
inline constexpr std::uint32_t kFormatVersion = 1;

}  // namespace dpembed

#endif  // DPEMBED_VERSION_HPP_
