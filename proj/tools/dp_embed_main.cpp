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

// dp_embed: command line front end for the dpembed library.
//
// The pipeline is calibrate -> sample-data -> embed -> train -> generate,
// plus verify-bounds for the Monte-Carlo error-bound suite and replay for
// bit-exact reruns. Every artifact-producing command writes a JSON manifest
// holding the resolved argument vector, the seeds and the privacy spec, so
// `dp_embed replay --manifest <m>` reproduces its outputs byte for byte.
// Failures print one JSON object to stderr and map to a distinct exit code
// per failure class (see kExit* below; 64..66 follow BSD sysexits).

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "dpembed/bounds.hpp"
#include "dpembed/data.hpp"
#include "dpembed/embedding.hpp"
#include "dpembed/errors.hpp"
#include "dpembed/feature_map.hpp"
#include "dpembed/generator.hpp"
#include "dpembed/io.hpp"
#include "dpembed/privacy.hpp"
#include "dpembed/rng.hpp"
#include "dpembed/training.hpp"
#include "dpembed/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;
constexpr int kExitArtifactFormat = 65;
constexpr int kExitMissingInput = 66;
constexpr int kExitShape = 67;
constexpr int kExitInvalidValue = 68;
constexpr int kExitCalibration = 69;
constexpr int kExitTraining = 70;
constexpr int kExitInternal = 71;
constexpr int kExitVerification = 72;
constexpr int kExitCannotWrite = 73;

int run_cli(const std::vector<std::string>& args);

void emit_error(const std::string& type, const std::string& message,
                json extra = json::object()) {
  extra["type"] = type;
  extra["message"] = message;
  std::cerr << json{{"error", extra}}.dump() << "\n";
}

// Shortest decimal form that parses back to the same double, so manifests
// and replayed argument vectors round-trip exactly.
std::string format_double(double value) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string join_widths(const std::vector<int>& widths) {
  if (widths.empty()) return "none";
  std::string text;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i > 0) text += ',';
    text += std::to_string(widths[i]);
  }
  return text;
}

std::vector<int> parse_width_list(const std::string& text) {
  if (text.empty() || text == "none") return {};
  std::vector<int> widths;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t pos = 0;
      const int width = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      widths.push_back(width);
    } catch (const std::exception&) {
      throw std::domain_error("invalid width list entry: '" + item + "'");
    }
  }
  if (widths.empty()) {
    throw std::domain_error("invalid width list: '" + text + "'");
  }
  return widths;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_json_file(const std::string& path) {
  return json::parse(read_text_file(path));
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& argv, const json& config,
                    const json& seeds, const json& privacy,
                    const std::vector<std::string>& artifacts) {
  const json manifest{{"kind", "run_manifest"},
                      {"tool_version", dpembed::kVersionString},
                      {"command", command},
                      {"argv", argv},
                      {"config", config},
                      {"seeds", seeds},
                      {"privacy", privacy},
                      {"artifacts", artifacts}};
  write_text_file(path, manifest.dump(2) + "\n");
}

dpembed::FeatureMap build_feature_map(int input_dim,
                                      const std::vector<int>& widths,
                                      std::uint64_t seed, int moments) {
  dpembed::FeatureMapConfig cfg;
  cfg.input_dim = input_dim;
  cfg.widths = widths;
  cfg.seed = seed;
  cfg.moments = moments;
  return dpembed::FeatureMap::random(cfg);
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateOptions {
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<double> release_ratios = {1.0};
  std::string out;
};

int cmd_calibrate(const CalibrateOptions& opt) {
  dpembed::PrivacySpec spec;
  spec.epsilon = opt.epsilon;
  spec.delta = opt.delta;
  for (double ratio : opt.release_ratios) {
    spec.releases.push_back({1.0, ratio});
  }
  const double base_sigma = dpembed::calibrate_sigma(spec);
  const double eff = dpembed::effective_sigma(spec.releases, base_sigma);
  const json result{
      {"epsilon", opt.epsilon},
      {"delta", opt.delta},
      {"release_ratios", opt.release_ratios},
      {"base_sigma", base_sigma},
      {"effective_sigma", eff},
      {"delta_achieved", dpembed::analytic_delta(opt.epsilon, eff, 1.0)},
      {"tool_version", dpembed::kVersionString},
  };
  const std::string text = result.dump(2) + "\n";
  std::cout << text;
  if (!opt.out.empty()) write_text_file(opt.out, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sample-data

struct SampleDataOptions {
  int dim = 2;
  int components = 2;
  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  bool labeled = false;
  std::string out;
};

int cmd_sample_data(const SampleDataOptions& opt) {
  const dpembed::SyntheticDatasetSpec spec = dpembed::random_mixture_spec(
      opt.dim, opt.components, opt.samples, opt.seed, opt.labeled);
  // Stream 0 of the master seed shapes the mixture, stream 1 draws from it.
  const std::uint64_t sampling_seed = dpembed::split_seed(opt.seed, 1);
  const dpembed::Dataset dataset = dpembed::sample_dataset(spec, sampling_seed);
  dpembed::save_dataset(opt.out, dataset);

  std::vector<std::string> argv{"sample-data",
                                "--dim",        std::to_string(opt.dim),
                                "--components", std::to_string(opt.components),
                                "--samples",    std::to_string(opt.samples),
                                "--seed",       std::to_string(opt.seed),
                                "--out",        opt.out};
  if (opt.labeled) argv.push_back("--labeled");

  const json config{{"dim", opt.dim},
                    {"components", opt.components},
                    {"samples", opt.samples},
                    {"labeled", opt.labeled},
                    {"out", opt.out}};
  const json seeds{{"spec", opt.seed}, {"sampling", sampling_seed}};
  const std::string manifest_path = opt.out + ".manifest.json";
  write_manifest(manifest_path, "sample-data", argv, config, seeds, nullptr,
                 {opt.out});

  const json summary{{"command", "sample-data"},
                     {"out", opt.out},
                     {"manifest", manifest_path},
                     {"samples", dataset.samples.cols()},
                     {"dim", dataset.samples.rows()},
                     {"num_classes", dataset.num_classes},
                     {"labeled", !dataset.labels.empty()}};
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// embed

struct EmbedOptions {
  std::string data;
  std::string out;
  int moments = 2;
  bool labeled = false;
  std::string map_widths = "32,32";
  std::uint64_t map_seed = 0;
  double sigma = 0.0;
  bool have_sigma = false;
  double epsilon = 0.0;
  double delta = 0.0;
  bool have_epsilon_delta = false;
  bool emit_proxy = false;
  std::string proxy_out;
  double stopping_ratio = 10.0;
  std::uint64_t seed = 0;
};

int cmd_embed(const EmbedOptions& opt) {
  const dpembed::Dataset dataset = dpembed::load_dataset(opt.data);
  if (opt.labeled && dataset.labels.empty()) {
    throw std::domain_error(
        "dataset has no labels; sample it with --labeled first");
  }
  const std::vector<int> widths = parse_width_list(opt.map_widths);
  const dpembed::FeatureMap map =
      build_feature_map(static_cast<int>(dataset.samples.rows()), widths,
                        opt.map_seed, opt.moments);

  const dpembed::MeanEmbedding clean =
      opt.labeled ? dpembed::embed_labeled(map, dataset.samples,
                                           dataset.labels, dataset.num_classes)
                  : dpembed::embed(map, dataset.samples);

  // The base noise multiplier is either given directly or calibrated so
  // that all noised releases together meet the (epsilon, delta) budget:
  // one release per embedding part at ratio 1, plus two proxy parts at the
  // stopping ratio when the proxy embedding is emitted.
  double base_sigma = opt.sigma;
  std::vector<double> release_ratios;
  if (opt.have_epsilon_delta) {
    release_ratios.assign(static_cast<std::size_t>(opt.moments), 1.0);
    if (opt.emit_proxy) {
      release_ratios.push_back(opt.stopping_ratio);
      release_ratios.push_back(opt.stopping_ratio);
    }
    dpembed::PrivacySpec spec;
    spec.epsilon = opt.epsilon;
    spec.delta = opt.delta;
    for (double ratio : release_ratios) spec.releases.push_back({1.0, ratio});
    base_sigma = dpembed::calibrate_sigma(spec);
  }
  if (!(base_sigma >= 0.0)) throw std::domain_error("sigma must be >= 0");

  const dpembed::MeanEmbedding privatized =
      dpembed::privatize(clean, base_sigma, opt.seed);
  dpembed::save_embedding(opt.out, privatized);
  std::vector<std::string> artifacts{opt.out};

  double sigma_stopping = 0.0;
  if (opt.emit_proxy) {
    // Checkpoint scoring embeds generator output, which carries no labels,
    // so the proxy is always released unlabeled.
    const dpembed::FeatureMap proxy_map = map.last_layer_map();
    const dpembed::MeanEmbedding proxy_clean =
        dpembed::embed(proxy_map, dataset.samples);
    sigma_stopping = base_sigma * opt.stopping_ratio;
    const dpembed::MeanEmbedding proxy_privatized = dpembed::privatize(
        proxy_clean, sigma_stopping, dpembed::split_seed(opt.seed, 1));
    dpembed::save_embedding(opt.proxy_out, proxy_privatized);
    artifacts.push_back(opt.proxy_out);
  }

  std::vector<std::string> argv{"embed",
                                "--data",       opt.data,
                                "--out",        opt.out,
                                "--moments",    std::to_string(opt.moments),
                                "--map-widths", join_widths(widths),
                                "--map-seed",   std::to_string(opt.map_seed),
                                "--seed",       std::to_string(opt.seed)};
  if (opt.labeled) argv.push_back("--labeled");
  if (opt.have_epsilon_delta) {
    argv.insert(argv.end(), {"--epsilon", format_double(opt.epsilon),
                             "--delta", format_double(opt.delta)});
  } else {
    argv.insert(argv.end(), {"--sigma", format_double(opt.sigma)});
  }
  if (opt.emit_proxy) {
    argv.insert(argv.end(),
                {"--emit-proxy", "--proxy-out", opt.proxy_out,
                 "--sigma-stopping-ratio", format_double(opt.stopping_ratio)});
  }

  json privacy{{"mode", opt.have_epsilon_delta ? "epsilon_delta" : "sigma"},
               {"base_sigma", base_sigma}};
  if (opt.have_epsilon_delta) {
    privacy["epsilon"] = opt.epsilon;
    privacy["delta"] = opt.delta;
    privacy["release_ratios"] = release_ratios;
  }
  if (opt.emit_proxy) privacy["sigma_stopping"] = sigma_stopping;

  const json config{{"data", opt.data},
                    {"out", opt.out},
                    {"moments", opt.moments},
                    {"labeled", opt.labeled},
                    {"map_widths", join_widths(widths)},
                    {"map_seed", opt.map_seed},
                    {"emit_proxy", opt.emit_proxy},
                    {"proxy_out", opt.proxy_out},
                    {"sigma_stopping_ratio", opt.stopping_ratio},
                    {"seed", opt.seed}};
  json seeds{{"noise", opt.seed}, {"map", opt.map_seed}};
  if (opt.emit_proxy) {
    seeds["proxy_noise"] = dpembed::split_seed(opt.seed, 1);
  }

  const std::string manifest_path = opt.out + ".manifest.json";
  write_manifest(manifest_path, "embed", argv, config, seeds, privacy,
                 artifacts);

  json summary{{"command", "embed"},
               {"out", opt.out},
               {"manifest", manifest_path},
               {"sample_count", privatized.sample_count},
               {"feature_dim", privatized.feature_dim},
               {"num_classes", privatized.num_classes},
               {"moments", privatized.moments},
               {"base_sigma", base_sigma}};
  if (opt.emit_proxy) {
    summary["proxy_out"] = opt.proxy_out;
    summary["sigma_stopping"] = sigma_stopping;
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string target;
  std::string proxy;
  std::string true_target;
  std::string out_dir;
  int data_dim = 0;
  std::string map_widths = "32,32";
  std::uint64_t map_seed = 0;
  int latent_dim = 4;
  std::string gen_widths = "16";
  std::uint64_t gen_seed = 0;
  int iterations = 1000;
  int batch_size = 64;
  double learning_rate = 1e-2;
  int eval_every = 10;
  int check_every = 100;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainOptions& opt) {
  const dpembed::MeanEmbedding target = dpembed::load_embedding(opt.target);
  if (target.num_classes != 1) {
    throw std::domain_error(
        "train needs an unlabeled target embedding (one class block); the "
        "synthetic side is embedded without labels");
  }

  const std::vector<int> map_widths = parse_width_list(opt.map_widths);
  const dpembed::FeatureMap map =
      build_feature_map(opt.data_dim, map_widths, opt.map_seed, target.moments);
  if (map.total_dim() != target.feature_dim) {
    throw dpembed::ShapeError(
        "feature map dimension " + std::to_string(map.total_dim()) +
        " does not match target feature_dim " +
        std::to_string(target.feature_dim) +
        "; check --data-dim, --map-widths and --map-seed");
  }

  std::optional<dpembed::MeanEmbedding> true_target;
  if (!opt.true_target.empty()) {
    true_target = dpembed::load_embedding(opt.true_target);
    if (true_target->moments != target.moments ||
        true_target->part_dim() != target.part_dim()) {
      throw dpembed::ShapeError(
          "true target embedding shape does not match the target");
    }
  }
  std::optional<dpembed::MeanEmbedding> proxy;
  if (!opt.proxy.empty()) {
    proxy = dpembed::load_embedding(opt.proxy);
    if (proxy->moments != 2 || proxy->num_classes != 1 ||
        proxy->feature_dim != map.last_layer_map().total_dim()) {
      throw dpembed::ShapeError(
          "proxy embedding must be unlabeled, two moments, last layer width");
    }
  }

  const std::vector<int> gen_widths = parse_width_list(opt.gen_widths);
  dpembed::GeneratorConfig gen_cfg;
  gen_cfg.latent_dim = opt.latent_dim;
  gen_cfg.hidden_widths = gen_widths;
  gen_cfg.output_dim = opt.data_dim;
  gen_cfg.seed = opt.gen_seed;
  dpembed::Generator gen = dpembed::Generator::random(gen_cfg);

  dpembed::TrainingConfig cfg;
  cfg.iterations = opt.iterations;
  cfg.batch_size = opt.batch_size;
  cfg.learning_rate = opt.learning_rate;
  cfg.eval_every = opt.eval_every;
  cfg.seed = opt.seed;
  if (proxy) {
    cfg.early_stopping =
        dpembed::EarlyStopConfig{proxy->sigma, opt.check_every};
  }

  const dpembed::TrainingResult result =
      dpembed::train(gen, target, map, cfg,
                     true_target ? &*true_target : nullptr,
                     proxy ? &*proxy : nullptr);

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);
  const std::string final_path = (dir / "theta_final.bin").string();
  const std::string selected_path = (dir / "theta_selected.bin").string();
  const std::string history_path = (dir / "history.jsonl").string();
  const std::string summary_path = (dir / "summary.json").string();
  const std::string manifest_path = (dir / "manifest.json").string();

  dpembed::save_generator(
      final_path, dpembed::Generator(opt.latent_dim, gen_widths, opt.data_dim,
                                     result.theta_final));
  dpembed::save_generator(
      selected_path, dpembed::Generator(opt.latent_dim, gen_widths,
                                        opt.data_dim, result.theta_selected));

  std::string history_text;
  for (const dpembed::EvalRecord& record : result.history) {
    // NaN true_loss (no --true-target) serializes as null.
    history_text += json{{"iteration", record.iteration},
                         {"private_loss", record.private_loss},
                         {"true_loss", record.true_loss}}
                        .dump();
    history_text += "\n";
  }
  write_text_file(history_path, history_text);

  json checkpoints = json::array();
  for (const dpembed::CheckpointRecord& cp : result.checkpoints) {
    checkpoints.push_back(
        {{"iteration", cp.iteration}, {"proxy_score", cp.proxy_score}});
  }
  const json summary{{"command", "train"},
                     {"iterations", opt.iterations},
                     {"selected_iteration", result.selected_iteration},
                     {"final_private_loss", result.history.back().private_loss},
                     {"final_true_loss", result.history.back().true_loss},
                     {"parameter_count", result.theta_final.size()},
                     {"checkpoints", checkpoints},
                     {"theta_final", final_path},
                     {"theta_selected", selected_path},
                     {"history", history_path},
                     {"manifest", manifest_path},
                     {"tool_version", dpembed::kVersionString}};
  write_text_file(summary_path, summary.dump(2) + "\n");

  std::vector<std::string> argv{
      "train",
      "--target",        opt.target,
      "--out",           opt.out_dir,
      "--data-dim",      std::to_string(opt.data_dim),
      "--map-widths",    join_widths(map_widths),
      "--map-seed",      std::to_string(opt.map_seed),
      "--latent-dim",    std::to_string(opt.latent_dim),
      "--gen-widths",    join_widths(gen_widths),
      "--gen-seed",      std::to_string(opt.gen_seed),
      "--iterations",    std::to_string(opt.iterations),
      "--batch-size",    std::to_string(opt.batch_size),
      "--learning-rate", format_double(opt.learning_rate),
      "--eval-every",    std::to_string(opt.eval_every),
      "--seed",          std::to_string(opt.seed)};
  if (proxy) {
    argv.insert(argv.end(), {"--proxy", opt.proxy, "--check-every",
                             std::to_string(opt.check_every)});
  }
  if (!opt.true_target.empty()) {
    argv.insert(argv.end(), {"--true-target", opt.true_target});
  }

  const json config{{"target", opt.target},
                    {"proxy", opt.proxy},
                    {"true_target", opt.true_target},
                    {"out", opt.out_dir},
                    {"data_dim", opt.data_dim},
                    {"map_widths", join_widths(map_widths)},
                    {"map_seed", opt.map_seed},
                    {"latent_dim", opt.latent_dim},
                    {"gen_widths", join_widths(gen_widths)},
                    {"gen_seed", opt.gen_seed},
                    {"iterations", opt.iterations},
                    {"batch_size", opt.batch_size},
                    {"learning_rate", opt.learning_rate},
                    {"eval_every", opt.eval_every},
                    {"check_every", opt.check_every},
                    {"seed", opt.seed}};
  const json seeds{{"training", opt.seed},
                   {"generator_init", opt.gen_seed},
                   {"map", opt.map_seed}};
  json privacy{{"target_sigma", target.sigma}};
  if (proxy) privacy["sigma_stopping"] = proxy->sigma;

  write_manifest(manifest_path, "train", argv, config, seeds, privacy,
                 {final_path, selected_path, history_path, summary_path});

  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  std::string generator_path;
  std::int64_t samples = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateOptions& opt) {
  const dpembed::Generator gen = dpembed::load_generator(opt.generator_path);
  if (opt.samples < 1) throw std::domain_error("samples must be >= 1");
  dpembed::Rng rng(dpembed::split_seed(opt.seed, 0));
  const Eigen::MatrixXd latents =
      rng.gaussian_matrix(gen.latent_dim(), opt.samples);
  dpembed::Dataset dataset;
  dataset.samples = gen.generate(latents);
  dataset.num_classes = 1;
  dpembed::save_dataset(opt.out, dataset);

  const std::vector<std::string> argv{"generate",
                                      "--generator", opt.generator_path,
                                      "--samples",   std::to_string(opt.samples),
                                      "--seed",      std::to_string(opt.seed),
                                      "--out",       opt.out};
  const json config{{"generator", opt.generator_path},
                    {"samples", opt.samples},
                    {"seed", opt.seed},
                    {"out", opt.out}};
  const json seeds{{"latents", opt.seed}};
  const std::string manifest_path = opt.out + ".manifest.json";
  write_manifest(manifest_path, "generate", argv, config, seeds, nullptr,
                 {opt.out});

  const json summary{{"command", "generate"},
                     {"out", opt.out},
                     {"manifest", manifest_path},
                     {"samples", dataset.samples.cols()},
                     {"dim", dataset.samples.rows()}};
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify-bounds

struct VerifyBoundsOptions {
  std::string config = "configs/bounds.json";
  std::string out;
};

int cmd_verify_bounds(const VerifyBoundsOptions& opt) {
  const json config = parse_json_file(opt.config);
  if (!config.contains("instances") || !config["instances"].is_array() ||
      config["instances"].empty()) {
    throw std::domain_error(
        "bounds config needs a non-empty 'instances' array");
  }
  const int default_draws = config.value("default_draws", 10000);

  json checks = json::array();
  int failed = 0;
  for (const json& inst : config["instances"]) {
    dpembed::BoundInputs inputs;
    inputs.cov.sigma = inst.at("sigma").get<double>();
    inputs.cov.m = inst.at("m").get<std::int64_t>();
    inputs.cov.dim = inst.at("dim").get<std::int64_t>();
    inputs.cov.moments = inst.at("moments").get<int>();
    inputs.cov.c1 = inst.value("c1", 1.0);
    inputs.cov.c2 = inst.value("c2", 1.0);
    inputs.mmd1_squared = inst.value("mmd1_squared", 0.0);
    inputs.mmd2_squared = inst.value("mmd2_squared", 0.0);
    inputs.rho = inst.value("rho", 0.05);
    inputs.norm_bound = inst.value(
        "norm_bound", inputs.cov.moments == 2 ? std::numbers::sqrt2 : 1.0);
    inputs.mmd_hat_at_optimum = inst.value("mmd_hat_at_optimum", 0.0);
    const int draws = inst.value("draws", default_draws);
    const std::uint64_t seed = inst.value("seed", std::uint64_t{0});
    const std::vector<std::string> kinds = inst.value(
        "kinds", std::vector<std::string>{"expected", "high_prob"});
    const std::string name = inst.value("name", std::string("instance"));

    for (const std::string& kind_name : kinds) {
      dpembed::BoundKind kind;
      if (kind_name == "expected") {
        kind = dpembed::BoundKind::kExpectedAbsError;
      } else if (kind_name == "high_prob") {
        kind = dpembed::BoundKind::kHighProbError;
      } else {
        throw std::domain_error("unknown bound kind: " + kind_name);
      }
      const dpembed::MonteCarloReport report =
          dpembed::monte_carlo_verify(kind, inputs, draws, seed);
      if (!report.pass) ++failed;
      checks.push_back({{"name", name},
                        {"kind", kind_name},
                        {"bound_name", report.bound_name},
                        {"bound_value", report.bound_value},
                        {"empirical_statistic", report.empirical_statistic},
                        {"allowed_statistic", report.allowed_statistic},
                        {"margin", report.margin},
                        {"pass", report.pass},
                        {"draws", report.draws},
                        {"seed", seed}});
    }
  }

  const json report{{"command", "verify-bounds"},
                    {"config", opt.config},
                    {"all_pass", failed == 0},
                    {"failed", failed},
                    {"checks", checks},
                    {"tool_version", dpembed::kVersionString}};
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!opt.out.empty()) write_text_file(opt.out, text);
  if (failed > 0) {
    emit_error("verification_failed",
               std::to_string(failed) + " bound check(s) failed");
    return kExitVerification;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayOptions {
  std::string manifest;
};

int cmd_replay(const ReplayOptions& opt) {
  const json manifest = parse_json_file(opt.manifest);
  if (manifest.value("kind", std::string()) != "run_manifest") {
    throw std::domain_error("not a run manifest: " + opt.manifest);
  }
  const std::string command = manifest.at("command").get<std::string>();
  if (command == "replay") {
    throw std::domain_error("refusing to replay a replay manifest");
  }
  const std::vector<std::string> argv =
      manifest.at("argv").get<std::vector<std::string>>();
  if (argv.empty()) throw std::domain_error("manifest argv is empty");
  return run_cli(argv);
}

// ---------------------------------------------------------------------------
// argument parsing and dispatch

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{
      "Differentially private synthetic data via one-shot noised "
      "feature-space mean embeddings"};
  app.name("dp_embed");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dpembed::kVersionString));

  CalibrateOptions cal;
  CLI::App* cal_cmd = app.add_subcommand(
      "calibrate", "Base noise multiplier for an (epsilon, delta) budget");
  cal_cmd->add_option("--epsilon", cal.epsilon, "Privacy budget epsilon")
      ->required();
  cal_cmd->add_option("--delta", cal.delta, "Privacy budget delta")
      ->required();
  cal_cmd
      ->add_option("--releases", cal.release_ratios,
                   "Noise multiplier ratio per composed release, e.g. 1,1,10")
      ->delimiter(',');
  cal_cmd->add_option("--out", cal.out, "Also write the JSON to this path");

  SampleDataOptions sd;
  CLI::App* sd_cmd = app.add_subcommand(
      "sample-data", "Draw a seeded Gaussian mixture dataset artifact");
  sd_cmd->add_option("--dim", sd.dim, "Input dimension")->required();
  sd_cmd->add_option("--components", sd.components, "Mixture components")
      ->required();
  sd_cmd->add_option("--samples", sd.samples, "Number of samples")->required();
  sd_cmd->add_option("--seed", sd.seed, "Mixture and sampling seed")
      ->capture_default_str();
  sd_cmd->add_flag("--labeled", sd.labeled,
                   "Store component indices as labels");
  sd_cmd->add_option("--out", sd.out, "Output dataset artifact")->required();

  EmbedOptions em;
  CLI::App* em_cmd = app.add_subcommand(
      "embed", "Release a privatized mean embedding of a dataset");
  em_cmd->add_option("--data", em.data, "Input dataset artifact")->required();
  em_cmd->add_option("--out", em.out, "Output embedding artifact")->required();
  em_cmd->add_option("--moments", em.moments, "Feature moments, 1 or 2")
      ->capture_default_str();
  em_cmd->add_flag("--labeled", em.labeled,
                   "Per-class blocks using the dataset labels");
  em_cmd
      ->add_option("--map-widths", em.map_widths,
                   "Extractor hidden widths ('none' = identity extractor)")
      ->capture_default_str();
  em_cmd->add_option("--map-seed", em.map_seed, "Extractor weight seed")
      ->capture_default_str();
  CLI::Option* sigma_opt = em_cmd->add_option(
      "--sigma", em.sigma, "Base noise multiplier (0 disables noise)");
  CLI::Option* eps_opt = em_cmd->add_option(
      "--epsilon", em.epsilon, "Privacy budget epsilon (calibrates sigma)");
  CLI::Option* delta_opt =
      em_cmd->add_option("--delta", em.delta, "Privacy budget delta");
  CLI::Option* emit_proxy_opt = em_cmd->add_flag(
      "--emit-proxy", em.emit_proxy,
      "Also release the early-stopping proxy (last layer, two moments)");
  CLI::Option* proxy_out_opt = em_cmd->add_option(
      "--proxy-out", em.proxy_out, "Output path for the proxy embedding");
  em_cmd
      ->add_option("--sigma-stopping-ratio", em.stopping_ratio,
                   "Proxy noise multiplier as a multiple of the base sigma")
      ->capture_default_str();
  em_cmd->add_option("--seed", em.seed, "Noise seed")->capture_default_str();
  sigma_opt->excludes(eps_opt)->excludes(delta_opt);
  eps_opt->needs(delta_opt);
  delta_opt->needs(eps_opt);
  emit_proxy_opt->needs(proxy_out_opt);
  proxy_out_opt->needs(emit_proxy_opt);

  TrainOptions tr;
  CLI::App* tr_cmd = app.add_subcommand(
      "train", "Fit a generator to a privatized embedding target");
  tr_cmd->add_option("--target", tr.target, "Privatized embedding artifact")
      ->required();
  tr_cmd->add_option("--out", tr.out_dir, "Run directory for outputs")
      ->required();
  tr_cmd
      ->add_option("--data-dim", tr.data_dim,
                   "Data dimension (= generator output, = extractor input)")
      ->required();
  tr_cmd
      ->add_option("--map-widths", tr.map_widths,
                   "Extractor hidden widths; must match the embed run")
      ->capture_default_str();
  tr_cmd->add_option("--map-seed", tr.map_seed, "Extractor weight seed")
      ->capture_default_str();
  tr_cmd->add_option("--latent-dim", tr.latent_dim, "Generator latent dim")
      ->capture_default_str();
  tr_cmd
      ->add_option("--gen-widths", tr.gen_widths,
                   "Generator hidden widths ('none' = linear generator)")
      ->capture_default_str();
  tr_cmd->add_option("--gen-seed", tr.gen_seed, "Generator init seed")
      ->capture_default_str();
  tr_cmd->add_option("--iterations", tr.iterations, "Adam iterations")
      ->capture_default_str();
  tr_cmd->add_option("--batch-size", tr.batch_size, "Fixed latent set size")
      ->capture_default_str();
  tr_cmd->add_option("--learning-rate", tr.learning_rate, "Adam step size")
      ->capture_default_str();
  tr_cmd->add_option("--eval-every", tr.eval_every, "Evaluation cadence")
      ->capture_default_str();
  CLI::Option* proxy_opt = tr_cmd->add_option(
      "--proxy", tr.proxy,
      "Privatized proxy embedding; enables DP early stopping");
  CLI::Option* check_opt =
      tr_cmd
          ->add_option("--check-every", tr.check_every,
                       "Checkpoint cadence for early stopping")
          ->capture_default_str();
  tr_cmd->add_option("--true-target", tr.true_target,
                     "Clean embedding for true-loss logging (not private)");
  tr_cmd->add_option("--seed", tr.seed, "Training seed (fixed latent set)")
      ->capture_default_str();
  check_opt->needs(proxy_opt);

  GenerateOptions ge;
  CLI::App* ge_cmd = app.add_subcommand(
      "generate", "Sample synthetic data from a trained generator");
  ge_cmd->add_option("--generator", ge.generator_path, "Generator artifact")
      ->required();
  ge_cmd->add_option("--samples", ge.samples, "Number of samples")->required();
  ge_cmd->add_option("--seed", ge.seed, "Latent seed")->capture_default_str();
  ge_cmd->add_option("--out", ge.out, "Output dataset artifact")->required();

  VerifyBoundsOptions vb;
  CLI::App* vb_cmd = app.add_subcommand(
      "verify-bounds", "Monte-Carlo check of the error-bound suite");
  vb_cmd->add_option("--config", vb.config, "Bounds config JSON")
      ->capture_default_str();
  vb_cmd->add_option("--out", vb.out, "Also write the report to this path");

  ReplayOptions rp;
  CLI::App* rp_cmd = app.add_subcommand(
      "replay", "Re-run a recorded command from its manifest, bit-exactly");
  rp_cmd->add_option("--manifest", rp.manifest, "Run manifest path")
      ->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("dp_embed");
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    emit_error("usage", e.what());
    return kExitUsage;
  }

  try {
    if (*cal_cmd) return cmd_calibrate(cal);
    if (*sd_cmd) return cmd_sample_data(sd);
    if (*em_cmd) {
      em.have_sigma = sigma_opt->count() > 0;
      em.have_epsilon_delta = eps_opt->count() > 0;
      if (!em.have_sigma && !em.have_epsilon_delta) {
        emit_error("usage",
                   "embed needs --sigma or both --epsilon and --delta");
        return kExitUsage;
      }
      return cmd_embed(em);
    }
    if (*tr_cmd) return cmd_train(tr);
    if (*ge_cmd) return cmd_generate(ge);
    if (*vb_cmd) return cmd_verify_bounds(vb);
    if (*rp_cmd) return cmd_replay(rp);
    emit_error("usage", "no subcommand given");
    return kExitUsage;
  } catch (const dpembed::ParseError& e) {
    emit_error("artifact_format", e.what(),
               {{"byte_offset", e.byte_offset()}});
    return kExitArtifactFormat;
  } catch (const dpembed::UnsupportedVersionError& e) {
    emit_error("unsupported_version", e.what(), {{"version", e.version()}});
    return kExitArtifactFormat;
  } catch (const dpembed::CalibrationError& e) {
    emit_error("calibration", e.what());
    return kExitCalibration;
  } catch (const dpembed::TrainingError& e) {
    emit_error("training", e.what(), {{"iteration", e.iteration()}});
    return kExitTraining;
  } catch (const dpembed::ShapeError& e) {
    emit_error("shape", e.what());
    return kExitShape;
  } catch (const json::exception& e) {
    emit_error("json", e.what());
    return kExitArtifactFormat;
  } catch (const std::domain_error& e) {
    emit_error("invalid_value", e.what());
    return kExitInvalidValue;
  } catch (const std::invalid_argument& e) {
    emit_error("invalid_value", e.what());
    return kExitInvalidValue;
  } catch (const std::runtime_error& e) {
    const std::string message = e.what();
    if (message.rfind("cannot open for reading", 0) == 0) {
      emit_error("missing_input", message);
      return kExitMissingInput;
    }
    if (message.rfind("cannot open for writing", 0) == 0 ||
        message.rfind("write failed", 0) == 0) {
      emit_error("cannot_write", message);
      return kExitCannotWrite;
    }
    emit_error("internal", message);
    return kExitInternal;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return kExitInternal;
  }
}

void configure_threads() {
  if (const char* env = std::getenv("DP_EMBED_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) {
      Eigen::setNbThreads(static_cast<int>(n));
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads();
  const std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args);
}
