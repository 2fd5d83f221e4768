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

#include "dpembed/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dpembed/errors.hpp"
#include "dpembed/version.hpp"

namespace dpembed {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "artifact payloads are little-endian f64; big-endian hosts "
              "are not supported");

constexpr char kMagic[4] = {'D', 'P', 'E', 'F'};
// magic + u32 version + u64 header length
constexpr std::size_t kPreambleSize = 16;

struct NamedArray {
  std::string name;
  const double* data = nullptr;
  std::size_t length = 0;
};

void write_container(const std::string& path, json header,
                     const std::vector<NamedArray>& arrays) {
  json array_index = json::array();
  for (const NamedArray& a : arrays) {
    array_index.push_back({{"name", a.name}, {"length", a.length}});
  }
  header["arrays"] = std::move(array_index);
  const std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, 4);
  const std::uint32_t version = kFormatVersion;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint64_t header_len = header_bytes.size();
  out.write(reinterpret_cast<const char*>(&header_len), 8);
  out.write(header_bytes.data(),
            static_cast<std::streamsize>(header_bytes.size()));
  for (const NamedArray& a : arrays) {
    out.write(reinterpret_cast<const char*>(a.data),
              static_cast<std::streamsize>(a.length * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct Container {
  json header;
  std::vector<std::pair<std::string, std::vector<double>>> arrays;

  const std::vector<double>& array(const std::string& name) const {
    for (const auto& [array_name, values] : arrays) {
      if (array_name == name) return values;
    }
    throw ParseError("artifact is missing array '" + name + "'",
                     kPreambleSize);
  }
};

Container read_container(const std::string& path,
                         const std::string& expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());

  if (buf.size() < 4) throw ParseError("file too short for magic", buf.size());
  if (std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw ParseError("bad magic bytes, not a dp_embed artifact", 0);
  }
  if (buf.size() < 8) {
    throw ParseError("file too short for format version", buf.size());
  }
  std::uint32_t version = 0;
  std::memcpy(&version, buf.data() + 4, 4);
  if (version != kFormatVersion) {
    throw UnsupportedVersionError(
        "artifact format version " + std::to_string(version) +
            " is not supported (this build reads version " +
            std::to_string(kFormatVersion) + ")",
        version);
  }
  if (buf.size() < kPreambleSize) {
    throw ParseError("file too short for header length", buf.size());
  }
  std::uint64_t header_len = 0;
  std::memcpy(&header_len, buf.data() + 8, 8);
  if (kPreambleSize + header_len > buf.size()) {
    throw ParseError("truncated header (declared " +
                         std::to_string(header_len) + " bytes)",
                     buf.size());
  }

  Container c;
  try {
    c.header = json::parse(buf.data() + kPreambleSize,
                           buf.data() + kPreambleSize + header_len);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based within the header slice.
    throw ParseError(std::string("invalid header JSON: ") + e.what(),
                     kPreambleSize + (e.byte > 0 ? e.byte - 1 : 0));
  }

  std::size_t offset = kPreambleSize + header_len;
  try {
    if (c.header.at("kind").get<std::string>() != expected_kind) {
      throw ParseError("artifact kind '" +
                           c.header["kind"].get<std::string>() +
                           "' does not match expected '" + expected_kind +
                           "'",
                       kPreambleSize);
    }
    for (const json& entry : c.header.at("arrays")) {
      const std::string name = entry.at("name").get<std::string>();
      const std::uint64_t length = entry.at("length").get<std::uint64_t>();
      const std::uint64_t bytes = length * sizeof(double);
      if (offset + bytes > buf.size()) {
        throw ParseError("truncated payload for array '" + name +
                             "' (needs " + std::to_string(bytes) + " bytes)",
                         buf.size());
      }
      std::vector<double> values(length);
      if (length > 0) std::memcpy(values.data(), buf.data() + offset, bytes);
      c.arrays.emplace_back(name, std::move(values));
      offset += bytes;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed header: ") + e.what(),
                     kPreambleSize);
  }
  if (offset != buf.size()) {
    throw ParseError("unexpected trailing bytes", offset);
  }
  return c;
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

}  // namespace

void save_embedding(const std::string& path, const MeanEmbedding& e) {
  json header = {
      {"kind", "mean_embedding"},
      {"sample_count", e.sample_count},
      {"feature_dim", e.feature_dim},
      {"num_classes", e.num_classes},
      {"moments", e.moments},
      {"sigma", e.sigma},
  };
  if (!e.class_counts.empty()) header["class_counts"] = e.class_counts;
  std::vector<NamedArray> arrays = {
      {"part1", e.part1.data(), static_cast<std::size_t>(e.part1.size())}};
  if (e.moments == 2) {
    arrays.push_back(
        {"part2", e.part2.data(), static_cast<std::size_t>(e.part2.size())});
  }
  write_container(path, std::move(header), arrays);
}

MeanEmbedding load_embedding(const std::string& path) {
  Container c = read_container(path, "mean_embedding");
  MeanEmbedding e;
  try {
    e.sample_count = c.header.at("sample_count").get<std::int64_t>();
    e.feature_dim = c.header.at("feature_dim").get<std::int64_t>();
    e.num_classes = c.header.at("num_classes").get<int>();
    e.moments = c.header.at("moments").get<int>();
    e.sigma = c.header.at("sigma").get<double>();
    if (c.header.contains("class_counts")) {
      e.class_counts =
          c.header["class_counts"].get<std::vector<std::int64_t>>();
    }
  } catch (const json::exception& err) {
    throw ParseError(std::string("malformed embedding header: ") + err.what(),
                     kPreambleSize);
  }
  if (e.sample_count < 1 || e.feature_dim < 1 || e.num_classes < 1 ||
      (e.moments != 1 && e.moments != 2)) {
    throw ParseError("embedding header fields out of range", kPreambleSize);
  }
  if (!e.class_counts.empty() &&
      e.class_counts.size() != static_cast<std::size_t>(e.num_classes)) {
    throw ParseError("class_counts length does not match num_classes",
                     kPreambleSize);
  }
  e.part1 = to_vector(c.array("part1"));
  if (e.part1.size() != e.part_dim()) {
    throw ParseError("part1 length does not match feature_dim * num_classes",
                     kPreambleSize);
  }
  if (e.moments == 2) {
    e.part2 = to_vector(c.array("part2"));
    if (e.part2.size() != e.part_dim()) {
      throw ParseError("part2 length does not match feature_dim * num_classes",
                       kPreambleSize);
    }
  }
  return e;
}

void save_dataset(const std::string& path, const Dataset& d) {
  json header = {
      {"kind", "dataset"},
      {"input_dim", d.samples.rows()},
      {"num_samples", d.samples.cols()},
      {"labeled", !d.labels.empty()},
      {"num_classes", d.num_classes},
  };
  std::vector<double> labels(d.labels.begin(), d.labels.end());
  std::vector<NamedArray> arrays = {
      {"samples", d.samples.data(),
       static_cast<std::size_t>(d.samples.size())}};
  if (!labels.empty()) {
    arrays.push_back({"labels", labels.data(), labels.size()});
  }
  write_container(path, std::move(header), arrays);
}

Dataset load_dataset(const std::string& path) {
  Container c = read_container(path, "dataset");
  Eigen::Index input_dim = 0;
  Eigen::Index num_samples = 0;
  bool labeled = false;
  Dataset d;
  try {
    input_dim = c.header.at("input_dim").get<std::int64_t>();
    num_samples = c.header.at("num_samples").get<std::int64_t>();
    labeled = c.header.at("labeled").get<bool>();
    d.num_classes = c.header.at("num_classes").get<int>();
  } catch (const json::exception& err) {
    throw ParseError(std::string("malformed dataset header: ") + err.what(),
                     kPreambleSize);
  }
  if (input_dim < 1 || num_samples < 1 || d.num_classes < 1) {
    throw ParseError("dataset header fields out of range", kPreambleSize);
  }
  const std::vector<double>& samples = c.array("samples");
  if (samples.size() !=
      static_cast<std::size_t>(input_dim) * static_cast<std::size_t>(num_samples)) {
    throw ParseError("samples length does not match input_dim * num_samples",
                     kPreambleSize);
  }
  d.samples = Eigen::Map<const Eigen::MatrixXd>(samples.data(), input_dim,
                                                num_samples);
  if (labeled) {
    const std::vector<double>& labels = c.array("labels");
    if (labels.size() != static_cast<std::size_t>(num_samples)) {
      throw ParseError("labels length does not match num_samples",
                       kPreambleSize);
    }
    d.labels.reserve(labels.size());
    for (double v : labels) {
      const int label = static_cast<int>(v);
      if (double(label) != v || label < 0 || label >= d.num_classes) {
        throw ParseError("label value out of range", kPreambleSize);
      }
      d.labels.push_back(label);
    }
  }
  return d;
}

void save_generator(const std::string& path, const Generator& gen) {
  json header = {
      {"kind", "generator"},
      {"latent_dim", gen.latent_dim()},
      {"hidden_widths", gen.hidden_widths()},
      {"output_dim", gen.output_dim()},
  };
  const Eigen::VectorXd& theta = gen.parameters();
  write_container(
      path, std::move(header),
      {{"theta", theta.data(), static_cast<std::size_t>(theta.size())}});
}

Generator load_generator(const std::string& path) {
  Container c = read_container(path, "generator");
  int latent_dim = 0;
  int output_dim = 0;
  std::vector<int> hidden;
  try {
    latent_dim = c.header.at("latent_dim").get<int>();
    output_dim = c.header.at("output_dim").get<int>();
    hidden = c.header.at("hidden_widths").get<std::vector<int>>();
  } catch (const json::exception& err) {
    throw ParseError(std::string("malformed generator header: ") + err.what(),
                     kPreambleSize);
  }
  Eigen::VectorXd theta = to_vector(c.array("theta"));
  try {
    return Generator(latent_dim, std::move(hidden), output_dim,
                     std::move(theta));
  } catch (const std::exception& err) {
    throw ParseError(std::string("generator artifact inconsistent: ") +
                         err.what(),
                     kPreambleSize);
  }
}

}  // namespace dpembed
