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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpembed/errors.hpp"
#include "dpembed/feature_map.hpp"
#include "dpembed/rng.hpp"
#include "oracles.hpp"

using dpembed::AffineTanhLayer;
using dpembed::FeatureMap;
using dpembed::FeatureMapConfig;
using dpembed::Rng;
using dpembed::ShapeError;
using dpembed::split_seed;

namespace {

bool bit_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

FeatureMap seeded_map(int input_dim, std::vector<int> widths,
                      std::uint64_t seed, int moments) {
  FeatureMapConfig cfg;
  cfg.input_dim = input_dim;
  cfg.widths = std::move(widths);
  cfg.seed = seed;
  cfg.moments = moments;
  return FeatureMap::random(cfg);
}

}  // namespace

TEST_CASE("identity extractor returns the input") {
  FeatureMap map = FeatureMap::identity(2);
  CHECK(map.input_dim() == 2);
  CHECK(map.moments() == 1);
  CHECK(map.total_dim() == 2);
  CHECK(map.norm_bound() == 1.0);

  Eigen::MatrixXd x(2, 3);
  x << 3.0, -1.0, 0.5, 4.0, 2.0, -0.25;
  CHECK(bit_equal(map.extract(x), x));

  Eigen::MatrixXd bad(3, 1);
  bad.setOnes();
  CHECK_THROWS_AS(map.extract(bad), ShapeError);
}

TEST_CASE("zero-weight layers give zero features and zero phi") {
  std::vector<AffineTanhLayer> layers(2);
  layers[0].weight = Eigen::MatrixXd::Zero(3, 2);
  layers[0].bias = Eigen::VectorXd::Zero(3);
  layers[1].weight = Eigen::MatrixXd::Zero(2, 3);
  layers[1].bias = Eigen::VectorXd::Zero(2);
  FeatureMap map(layers, 2, 2, /*normalized=*/true);
  CHECK(map.total_dim() == 5);

  Eigen::MatrixXd x(2, 2);
  x << 1.0, -7.0, 2.0, 0.3;
  CHECK(map.extract(x).isZero(0.0));

  // Zero raw features map to zero vectors, not a division error.
  FeatureMap::Features f = map.phi(x);
  CHECK(f.part1.isZero(0.0));
  CHECK(f.part2.isZero(0.0));

  // The degenerate point also backpropagates a zero gradient.
  Eigen::MatrixXd cot = Eigen::MatrixXd::Ones(5, 2);
  CHECK(map.phi_vjp(x, cot, cot).isZero(0.0));
}

TEST_CASE("seeded two-layer extract matches the scalar-loop oracle") {
  FeatureMap map = seeded_map(2, {3, 2}, 7, 2);
  REQUIRE(map.total_dim() == 5);

  Eigen::MatrixXd x(2, 1);
  x << 1.0, 0.0;
  Eigen::MatrixXd raw = map.extract(x);
  std::vector<double> naive = oracles::naive_extract(map, {1.0, 0.0});
  REQUIRE(naive.size() == 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(std::abs(raw(i, 0) - naive[(std::size_t)i]) <= 1e-14);
  }

  // Values pinned for seed 7; anchors the seeded construction across builds.
  const double pinned[5] = {0x1.94515ad96ed09p-1, 0x1.71748c7adfcc4p-2,
                            -0x1.516150aa85c7cp-2, 0x1.e575032f0564bp-6,
                            -0x1.26295450c3792p-1};
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(raw(i, 0) == pinned[(std::size_t)i]);
  }

  const double pinned_phi1[5] = {0x1.722030f12258fp-1, 0x1.523621a387fa9p-2,
                                 -0x1.34d94c9b026ap-2, 0x1.bc673f268c36bp-6,
                                 -0x1.0d48f6e29b2d9p-1};
  const double pinned_phi2[5] = {0x1.b7ff3d9f5a72p-1, 0x1.6f63ef6570f0ap-3,
                                 0x1.325e2598dcba3p-3, 0x1.3d287548d626ap-10,
                                 0x1.d1ce75e3b2cb5p-2};
  FeatureMap::Features f = map.phi(x);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(f.part1(i, 0) == pinned_phi1[(std::size_t)i]);
    CHECK(f.part2(i, 0) == pinned_phi2[(std::size_t)i]);
  }

  // Broader agreement with the oracle on random inputs.
  Rng rng(99);
  for (int k = 0; k < 25; ++k) {
    Eigen::VectorXd xr = rng.gaussian_vector(2);
    Eigen::MatrixXd out = map.extract(xr);
    std::vector<double> ref =
        oracles::naive_extract(map, {xr(0), xr(1)});
    for (Eigen::Index i = 0; i < 5; ++i) {
      CHECK(std::abs(out(i, 0) - ref[(std::size_t)i]) <= 1e-13);
    }
  }
}

TEST_CASE("normalization arithmetic on a raw (3,4) vector") {
  FeatureMap map = FeatureMap::identity(2, /*moments=*/2);
  Eigen::MatrixXd x(2, 1);
  x << 3.0, 4.0;
  FeatureMap::Features f = map.phi(x);
  CHECK(f.part1(0, 0) == 0.6);
  CHECK(f.part1(1, 0) == 0.8);
  CHECK(f.part2(0, 0) == 9.0 / std::sqrt(337.0));
  CHECK(f.part2(1, 0) == 16.0 / std::sqrt(337.0));
  CHECK(std::abs(f.part1.col(0).norm() - 1.0) <= 1e-12);
  CHECK(std::abs(f.part2.col(0).norm() - 1.0) <= 1e-12);
}

TEST_CASE("norm contract and feature bound on 1000 random inputs") {
  FeatureMap map = seeded_map(3, {16, 8}, 11, 2);
  const double bound = map.norm_bound();
  CHECK(bound == std::sqrt(2.0));

  Rng rng(123);
  Eigen::MatrixXd x = rng.gaussian_matrix(3, 1000);
  FeatureMap::Features f = map.phi(x);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double n1 = f.part1.col(c).norm();
    const double n2 = f.part2.col(c).norm();
    CHECK(std::abs(n1 - 1.0) <= 1e-12);
    CHECK(std::abs(n2 - 1.0) <= 1e-12);
    const double total = std::sqrt(n1 * n1 + n2 * n2);
    CHECK(total <= bound + 1e-12);
    // Both parts are nonzero here, so the bound is attained.
    CHECK(std::abs(total - bound) <= 1e-12);
  }

  FeatureMap one = seeded_map(3, {16, 8}, 11, 1);
  CHECK(one.norm_bound() == 1.0);
  FeatureMap::Features g = one.phi(x);
  CHECK(g.part2.size() == 0);
  for (Eigen::Index c = 0; c < 10; ++c) {
    CHECK(std::abs(g.part1.col(c).norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("identical seeds produce bit-identical maps and outputs") {
  FeatureMap a = seeded_map(4, {8, 8, 4}, 2024, 2);
  FeatureMap b = seeded_map(4, {8, 8, 4}, 2024, 2);
  REQUIRE(a.layers().size() == b.layers().size());
  for (std::size_t j = 0; j < a.layers().size(); ++j) {
    CHECK(bit_equal(a.layers()[j].weight, b.layers()[j].weight));
    CHECK(bit_equal(a.layers()[j].bias, b.layers()[j].bias));
  }

  Rng rng(5);
  Eigen::MatrixXd x = rng.gaussian_matrix(4, 7);
  CHECK(bit_equal(a.extract(x), b.extract(x)));
  FeatureMap::Features fa = a.phi(x);
  FeatureMap::Features fb = b.phi(x);
  CHECK(bit_equal(fa.part1, fb.part1));
  CHECK(bit_equal(fa.part2, fb.part2));

  FeatureMap c = seeded_map(4, {8, 8, 4}, 2025, 2);
  CHECK_FALSE(bit_equal(a.layers()[0].weight, c.layers()[0].weight));
}

TEST_CASE("vjp: zero cotangent gives zero gradient") {
  FeatureMap map = seeded_map(2, {3, 2}, 7, 2);
  Eigen::MatrixXd x(2, 3);
  x << 0.4, -1.0, 2.0, 1.5, 0.0, -0.7;
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 3);
  CHECK(map.phi_vjp(x, zero, zero).isZero(0.0));
}

TEST_CASE("vjp: radial cotangent is annihilated by normalization") {
  FeatureMap map = FeatureMap::identity(2, /*moments=*/1);
  Eigen::MatrixXd x(2, 1);
  x << 1.0, 0.0;
  Eigen::MatrixXd cot(2, 1);
  cot << 3.5, 0.0;  // aligned with phi1(x)
  CHECK(map.phi_vjp(x, cot, Eigen::MatrixXd()).isZero(0.0));

  // General point: the pullback of a radial cotangent vanishes.
  x << 3.0, 4.0;
  cot = 2.0 * x;
  CHECK(map.phi_vjp(x, cot, Eigen::MatrixXd()).norm() <= 1e-15);
}

TEST_CASE("vjp matches central finite differences") {
  struct Case {
    FeatureMap map;
    int input_dim;
    int pairs;
  };
  FeatureMap deep = seeded_map(3, {16, 8}, 11, 2);
  std::vector<Case> cases;
  cases.push_back({seeded_map(2, {3, 2}, 7, 2), 2, 25});
  cases.push_back({deep, 3, 25});
  cases.push_back({seeded_map(3, {16, 8}, 11, 1), 3, 20});
  cases.push_back({FeatureMap::identity(3, 2), 3, 15});
  cases.push_back({deep.last_layer_map(), 3, 15});

  const double h = 1e-5;
  Rng rng(4242);
  for (const Case& tc : cases) {
    const Eigen::Index d = tc.map.total_dim();
    const int moments = tc.map.moments();
    for (int k = 0; k < tc.pairs; ++k) {
      Eigen::VectorXd x = rng.gaussian_vector(tc.input_dim);
      Eigen::MatrixXd cot1 = rng.gaussian_matrix(d, 1);
      Eigen::MatrixXd cot2 =
          moments == 2 ? rng.gaussian_matrix(d, 1) : Eigen::MatrixXd();

      auto loss = [&](const Eigen::VectorXd& p) {
        FeatureMap::Features f = tc.map.phi(p);
        double v = (f.part1.col(0).transpose() * cot1.col(0)).value();
        if (moments == 2) {
          v += (f.part2.col(0).transpose() * cot2.col(0)).value();
        }
        return v;
      };

      Eigen::MatrixXd vjp = tc.map.phi_vjp(x, cot1, cot2);
      Eigen::VectorXd fd(tc.input_dim);
      for (int i = 0; i < tc.input_dim; ++i) {
        fd(i) = oracles::central_difference(
            [&](double t) {
              Eigen::VectorXd p = x;
              p(i) = t;
              return loss(p);
            },
            x(i), h);
      }
      const double denom = std::max(fd.norm(), 1e-10);
      CHECK((vjp.col(0) - fd).norm() / denom <= 1e-4);
    }
  }
}

TEST_CASE("vjp shape errors") {
  FeatureMap map = seeded_map(2, {3, 2}, 7, 2);
  Eigen::MatrixXd x(2, 1);
  x << 0.3, -0.6;
  Eigen::MatrixXd good = Eigen::MatrixXd::Zero(5, 1);
  Eigen::MatrixXd bad_rows = Eigen::MatrixXd::Zero(4, 1);
  Eigen::MatrixXd bad_cols = Eigen::MatrixXd::Zero(5, 2);
  CHECK_THROWS_AS(map.phi_vjp(x, bad_rows, good), ShapeError);
  CHECK_THROWS_AS(map.phi_vjp(x, good, bad_cols), ShapeError);
  CHECK_THROWS_AS(map.phi_vjp(x, good, Eigen::MatrixXd()), ShapeError);

  FeatureMap one = seeded_map(2, {3, 2}, 7, 1);
  CHECK_THROWS_AS(one.phi_vjp(x, good, good), ShapeError);
  CHECK_NOTHROW(one.phi_vjp(x, good, Eigen::MatrixXd()));
}

TEST_CASE("constructor rejects inconsistent configurations") {
  std::vector<AffineTanhLayer> layers(1);
  layers[0].weight = Eigen::MatrixXd::Zero(3, 5);  // expects input_dim 5
  layers[0].bias = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(FeatureMap(layers, 2, 1, true), ShapeError);

  layers[0].weight = Eigen::MatrixXd::Zero(3, 2);
  layers[0].bias = Eigen::VectorXd::Zero(4);  // bias width mismatch
  CHECK_THROWS_AS(FeatureMap(layers, 2, 1, true), ShapeError);

  CHECK_THROWS_AS(FeatureMap::identity(0), std::domain_error);
  CHECK_THROWS_AS(FeatureMap::identity(2, 3), std::domain_error);

  FeatureMapConfig cfg;
  cfg.input_dim = 2;
  cfg.widths = {0};
  CHECK_THROWS_AS(FeatureMap::random(cfg), std::domain_error);
}

TEST_CASE("last-layer proxy view exposes only the final activations") {
  FeatureMap map = seeded_map(2, {3, 2}, 7, 1);
  FeatureMap proxy = map.last_layer_map();
  CHECK(proxy.moments() == 2);
  CHECK(proxy.last_layer_only());
  CHECK(proxy.total_dim() == 2);
  CHECK(proxy.norm_bound() == std::sqrt(2.0));

  Eigen::MatrixXd x(2, 1);
  x << 1.0, 0.0;
  Eigen::MatrixXd raw = proxy.extract(x);
  const double pinned[2] = {0x1.e575032f0564bp-6, -0x1.26295450c3792p-1};
  CHECK(raw(0, 0) == pinned[0]);
  CHECK(raw(1, 0) == pinned[1]);

  std::vector<double> naive = oracles::naive_extract(proxy, {1.0, 0.0});
  for (Eigen::Index i = 0; i < 2; ++i) {
    CHECK(std::abs(raw(i, 0) - naive[(std::size_t)i]) <= 1e-14);
  }

  FeatureMap::Features f = proxy.phi(x);
  CHECK(std::abs(f.part1.col(0).norm() - 1.0) <= 1e-12);
  CHECK(std::abs(f.part2.col(0).norm() - 1.0) <= 1e-12);
}
