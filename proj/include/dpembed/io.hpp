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

#ifndef DPEMBED_IO_HPP_
#define DPEMBED_IO_HPP_

#include <string>

#include <Eigen/Dense>

#include "dpembed/data.hpp"
#include "dpembed/embedding.hpp"
#include "dpembed/generator.hpp"

namespace dpembed {

// All artifacts share one container: the magic bytes "DPEF", a little-
// endian u32 format version, a little-endian u64 header length, a JSON
// header describing the artifact and its array lengths, then the arrays
// as raw little-endian f64. Round trips are bit-exact. Loaders throw
// ParseError (with the failing byte offset) on malformed input and
// UnsupportedVersionError on a version mismatch; see docs/formats.md.

void save_embedding(const std::string& path, const MeanEmbedding& embedding);
MeanEmbedding load_embedding(const std::string& path);

void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);

// Generator parameters plus the architecture needed to rebuild it.
void save_generator(const std::string& path, const Generator& gen);
Generator load_generator(const std::string& path);

}  // namespace dpembed

#endif  // DPEMBED_IO_HPP_
