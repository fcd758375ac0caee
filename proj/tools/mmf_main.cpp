/*
 * Copyright 2026 The MMF Library Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmf/dataset.hpp"
#include "mmf/errors.hpp"
#include "mmf/evaluation.hpp"
#include "mmf/harness.hpp"
#include "mmf/interpretability.hpp"
#include "mmf/io.hpp"
#include "mmf/mf.hpp"
#include "mmf/mmf.hpp"
#include "mmf/serialize.hpp"
#include "mmf/train_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Everything one run resolves to. Written to <out>/run_config.json and
// accepted back via --config, with explicit flags taking precedence.
struct RunConfig {
  std::string command;
  std::string ratings;
  std::string format = "auto";  // auto | tsv4 | csv3
  std::string attributes;
  std::string model_file;
  std::string out;
  std::string model_kind = "mmf";  // mf | mmf
  std::string variant = "full";
  std::string split_kind = "random";  // random | cold-start
  double test_fraction = -1;          // -1: default for the split kind
  mmf::TrainConfig train;
  bool clamp = false;
  int jobs = 1;
  std::string axis = "latent-dim";  // latent-dim | topic-count
  std::vector<int> values;
  std::vector<std::string> topic_files;  // "count=path"
  std::string user_id;
  std::string item_id;
  int neighbors = 5;
  std::string vector_kind = "attributes";  // users | attributes
  std::vector<std::string> ids;
  bool export_all = false;
};

json run_config_to_json(const RunConfig& c) {
  json j{
      {"command", c.command},
      {"ratings", c.ratings},
      {"format", c.format},
      {"attributes", c.attributes},
      {"model_file", c.model_file},
      {"out", c.out},
      {"model_kind", c.model_kind},
      {"variant", c.variant},
      {"split_kind", c.split_kind},
      {"test_fraction", c.test_fraction},
      {"dim", c.train.dim},
      {"lambda", c.train.lambda},
      {"learning_rate", c.train.learning_rate},
      {"epochs", c.train.epochs},
      {"batch", c.train.batch},
      {"seed", c.train.seed},
      {"regularize_weights", c.train.regularize_weights},
      {"clamp", c.clamp},
      {"jobs", c.jobs},
      {"axis", c.axis},
      {"values", c.values},
      {"topic_files", c.topic_files},
      {"user", c.user_id},
      {"item", c.item_id},
      {"neighbors", c.neighbors},
      {"vector_kind", c.vector_kind},
      {"ids", c.ids},
      {"all", c.export_all},
  };
  if (c.train.fallback_rating) j["fallback_rating"] = *c.train.fallback_rating;
  return j;
}

// Option registry so values from --config fill every flag the user did not
// pass explicitly.
class ConfigBinding {
 public:
  template <class T>
  void bind(CLI::Option* opt, T& field, const std::string& key) {
    appliers_.push_back([opt, &field, key](const json& j) {
      if (opt->count() == 0 && j.contains(key)) field = j.at(key).get<T>();
    });
  }

  void apply(const json& j) const {
    for (const auto& f : appliers_) f(j);
  }

 private:
  std::vector<std::function<void(const json&)>> appliers_;
};

struct CommandContext {
  RunConfig cfg;
  ConfigBinding binding;
  std::string config_path;
};

void add_common_train_options(CLI::App* cmd, CommandContext& ctx) {
  auto& c = ctx.cfg;
  ctx.binding.bind(cmd->add_option("--dim", c.train.dim, "Latent dimension"),
                   c.train.dim, "dim");
  ctx.binding.bind(
      cmd->add_option("--lr", c.train.learning_rate, "SGD learning rate"),
      c.train.learning_rate, "learning_rate");
  ctx.binding.bind(
      cmd->add_option("--epochs", c.train.epochs, "Training epochs"),
      c.train.epochs, "epochs");
  ctx.binding.bind(
      cmd->add_option("--lambda", c.train.lambda, "Factor regularization"),
      c.train.lambda, "lambda");
  ctx.binding.bind(cmd->add_option("--batch", c.train.batch,
                                   "Records per SGD update"),
                   c.train.batch, "batch");
  ctx.binding.bind(cmd->add_option("--seed", c.train.seed, "Random seed"),
                   c.train.seed, "seed");
  ctx.binding.bind(cmd->add_flag("--regularize-weights",
                                 c.train.regularize_weights,
                                 "Also decay preference/performance weights"),
                   c.train.regularize_weights, "regularize_weights");
}

void add_config_option(CLI::App* cmd, CommandContext& ctx) {
  cmd->add_option("--config", ctx.config_path,
                  "JSON run config; explicit flags override its fields");
}

void finalize_config(CommandContext& ctx) {
  if (ctx.config_path.empty()) return;
  std::ifstream in(ctx.config_path);
  if (!in) throw mmf::IoError("cannot open config '" + ctx.config_path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw mmf::ConfigError("config '" + ctx.config_path + "': " + e.what());
  }
  ctx.binding.apply(j);
}

mmf::RatingsFormat resolve_format(const std::string& format,
                                  const std::string& path) {
  if (format == "tsv4") return mmf::RatingsFormat::tsv4;
  if (format == "csv3") return mmf::RatingsFormat::csv3;
  if (format == "auto") {
    const auto ext = fs::path(path).extension().string();
    if (ext == ".data" || ext == ".tsv") return mmf::RatingsFormat::tsv4;
    if (ext == ".csv") return mmf::RatingsFormat::csv3;
    throw mmf::ConfigError("cannot infer ratings format from '" + path +
                           "'; pass --format tsv4|csv3");
  }
  throw mmf::ConfigError("unknown ratings format '" + format + "'");
}

mmf::RatingDataset load_ratings_checked(const RunConfig& c) {
  if (c.ratings.empty()) throw mmf::ConfigError("--ratings is required");
  return mmf::load_ratings(c.ratings, resolve_format(c.format, c.ratings));
}

mmf::AttributeCatalog load_attributes_checked(const RunConfig& c) {
  if (c.attributes.empty())
    throw mmf::ConfigError("--attributes is required for this command");
  return mmf::load_attributes(c.attributes);
}

fs::path prepare_out_dir(RunConfig& c, const std::string& command) {
  c.command = command;
  if (c.out.empty()) throw mmf::ConfigError("--out directory is required");
  fs::create_directories(c.out);
  std::ofstream out(fs::path(c.out) / "run_config.json");
  if (!out) throw mmf::IoError("cannot write run_config.json in '" + c.out +
                               "'");
  out << run_config_to_json(c).dump(2) << '\n';
  return fs::path(c.out);
}

std::map<int, fs::path> parse_topic_files(
    const std::vector<std::string>& spec) {
  std::map<int, fs::path> out;
  for (const std::string& entry : spec) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw mmf::ConfigError("--topic-file expects COUNT=PATH, got '" + entry +
                             "'");
    try {
      out[std::stoi(entry.substr(0, eq))] = entry.substr(eq + 1);
    } catch (const std::exception&) {
      throw mmf::ConfigError("bad topic count in '" + entry + "'");
    }
  }
  return out;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_stats(const RunConfig& c) {
  auto ds = load_ratings_checked(c);
  std::printf("ratings            %s\n", c.ratings.c_str());
  std::printf("records            %zu\n", ds.size());
  std::printf("users              %d\n", ds.num_users());
  std::printf("items              %d\n", ds.num_items());
  std::printf("duplicates         %zu\n", ds.duplicate_count());
  std::printf("rate               %s\n", fixed3(compute_rate(ds)).c_str());

  if (c.attributes.empty()) return 0;
  if (!fs::exists(c.attributes)) {
    std::fprintf(stderr,
                 "warning: attribute file '%s' not found; skipping the "
                 "attribute block\n",
                 c.attributes.c_str());
    return 0;
  }
  auto cat = mmf::load_attributes(c.attributes);
  std::printf("attributes         %s\n", c.attributes.c_str());
  for (const std::string& type : cat.types())
    std::printf("  %-16s %zu\n", type.c_str(), cat.type_size(type));
  std::printf("dense_rate         %s\n",
              fixed3(mmf::compute_dense_rate(cat, ds.item_ids())).c_str());
  std::printf("items_no_attrs     %zu\n",
              cat.items_without_attributes(ds.item_ids()).size());
  return 0;
}

int cmd_split(RunConfig& c) {
  auto ds = load_ratings_checked(c);
  mmf::SplitSpec spec;
  if (c.split_kind == "random")
    spec = mmf::SplitSpec::random(c.train.seed);
  else if (c.split_kind == "cold-start")
    spec = mmf::SplitSpec::cold_start(c.train.seed);
  else
    throw mmf::ConfigError("unknown split kind '" + c.split_kind + "'");
  if (c.test_fraction > 0) spec.test_fraction = c.test_fraction;
  c.test_fraction = spec.test_fraction;

  const fs::path out = prepare_out_dir(c, "split");
  auto parts = mmf::split(ds, spec);
  mmf::save_split(parts, spec, out);
  std::printf("train records      %zu\n", parts.train.size());
  std::printf("test records       %zu\n", parts.test.size());
  std::printf("test items         %d\n", parts.test.num_items());
  return 0;
}

int cmd_train(RunConfig& c) {
  auto ds = load_ratings_checked(c);
  const fs::path out = prepare_out_dir(c, "train");
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<double> trace;
  if (c.model_kind == "mf") {
    auto model = mmf::fit(ds, c.train);
    mmf::save_model(model, out / "model.json");
    trace.assign(model.loss_trace.begin(), model.loss_trace.end());
  } else if (c.model_kind == "mmf") {
    auto cat = load_attributes_checked(c);
    const auto missing = cat.items_without_attributes(ds.item_ids());
    if (!missing.empty())
      std::fprintf(stderr,
                   "warning: %zu items have no attributes and will predict "
                   "the global mean\n",
                   missing.size());
    auto model =
        mmf::fit(ds, cat, c.train, mmf::variant_from_name(c.variant));
    mmf::save_model(model, out / "model.json");
    trace.assign(model.loss_trace.begin(), model.loss_trace.end());
  } else {
    throw mmf::ConfigError("unknown model kind '" + c.model_kind + "'");
  }

  {
    std::ofstream trace_out(out / "loss_trace.csv");
    trace_out << "epoch,loss\n";
    for (std::size_t e = 0; e < trace.size(); ++e)
      trace_out << e << ',' << mmf::format_double(trace[e]) << '\n';
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::fprintf(stderr, "trained in %.2fs\n", seconds);
  if (!trace.empty())
    std::printf("final_loss         %s\n",
                mmf::format_double(trace.back()).c_str());
  std::printf("model              %s\n", (out / "model.json").c_str());
  return 0;
}

int cmd_eval(RunConfig& c) {
  if (c.model_file.empty()) throw mmf::ConfigError("--model is required");
  auto ds = load_ratings_checked(c);
  const fs::path out = prepare_out_dir(c, "eval");

  auto loaded = mmf::load_model(c.model_file);
  mmf::EvalResult result;
  if (std::holds_alternative<mmf::MfModel<double>>(loaded)) {
    result = mmf::evaluate(std::get<mmf::MfModel<double>>(loaded), ds,
                           c.clamp);
  } else {
    auto& model = std::get<mmf::MmfModel<double>>(loaded);
    auto cat = load_attributes_checked(c);
    mmf::check_catalog_compatible(model, cat);
    result = mmf::evaluate(model, cat, ds, c.clamp);
  }

  json j{
      {"rmse", result.rmse},
      {"rmse_raw", result.rmse_raw},
      {"rmse_clamped", result.rmse_clamped},
      {"count", result.count},
      {"unknown_user_fallbacks", result.unknown_user_fallbacks},
      {"unknown_item_fallbacks", result.unknown_item_fallbacks},
      {"no_attribute_fallbacks", result.no_attribute_fallbacks},
  };
  std::ofstream(out / "eval.json") << j.dump(2) << '\n';
  std::printf("rmse               %s\n", mmf::format_double(result.rmse).c_str());
  std::printf("fallbacks          %zu of %zu\n", result.fallbacks(),
              result.count);
  return 0;
}

int cmd_ablate(RunConfig& c) {
  auto ds = load_ratings_checked(c);
  auto cat = load_attributes_checked(c);
  c.train.clamp_eval = c.clamp;
  const fs::path out = prepare_out_dir(c, "ablate");
  auto report = mmf::run_ablation(ds, cat, c.train, c.jobs);
  mmf::save_report(report, out, "ablation");
  for (const auto& cell : report.cells)
    std::printf("%-12s rmse %s\n", cell.variant.c_str(),
                mmf::format_double(cell.eval.rmse).c_str());
  return 0;
}

int cmd_coldstart(RunConfig& c) {
  auto ds = load_ratings_checked(c);
  auto cat = load_attributes_checked(c);
  c.train.clamp_eval = c.clamp;
  if (c.test_fraction <= 0) c.test_fraction = 0.1;
  const fs::path out = prepare_out_dir(c, "coldstart");
  auto report = mmf::run_cold_start(ds, cat, c.train, c.test_fraction, c.jobs);
  mmf::save_report(report, out, "coldstart");
  for (const auto& cell : report.cells)
    std::printf("%-12s rmse %s (fallbacks %zu of %zu)\n",
                cell.label.c_str(),
                mmf::format_double(cell.eval.rmse).c_str(),
                cell.eval.fallbacks(), cell.eval.count);
  return 0;
}

int cmd_sweep(RunConfig& c) {
  auto ds = load_ratings_checked(c);
  auto cat = load_attributes_checked(c);
  c.train.clamp_eval = c.clamp;
  if (c.values.empty()) throw mmf::ConfigError("--values is required");
  mmf::SweepAxis axis;
  if (c.axis == "latent-dim")
    axis = mmf::SweepAxis::latent_dim;
  else if (c.axis == "topic-count")
    axis = mmf::SweepAxis::topic_count;
  else
    throw mmf::ConfigError("unknown sweep axis '" + c.axis + "'");
  const auto topic_files = parse_topic_files(c.topic_files);
  const fs::path out = prepare_out_dir(c, "sweep");
  auto report = mmf::run_sweep(ds, cat, c.train, axis, c.values, topic_files,
                               c.jobs);
  mmf::save_report(report, out, "sweep");
  for (const auto& cell : report.cells)
    std::printf("%-8s rmse %s\n", cell.label.c_str(),
                mmf::format_double(cell.eval.rmse).c_str());
  return 0;
}

int cmd_explain(RunConfig& c) {
  if (c.model_file.empty()) throw mmf::ConfigError("--model is required");
  auto ds = load_ratings_checked(c);
  auto cat = load_attributes_checked(c);
  auto loaded = mmf::load_model(c.model_file);
  if (!std::holds_alternative<mmf::MmfModel<double>>(loaded))
    throw mmf::ConfigError("explain needs an attribute model");
  auto& model = std::get<mmf::MmfModel<double>>(loaded);
  mmf::check_catalog_compatible(model, cat);

  const auto user = std::find(model.user_ids.begin(), model.user_ids.end(),
                              c.user_id);
  if (c.user_id.empty() || user == model.user_ids.end())
    throw mmf::ArgumentError("unknown user '" + c.user_id + "'");
  const auto item = std::find(model.item_ids.begin(), model.item_ids.end(),
                              c.item_id);
  if (c.item_id.empty() || item == model.item_ids.end())
    throw mmf::ArgumentError("unknown item '" + c.item_id + "'");
  const int user_idx = static_cast<int>(user - model.user_ids.begin());
  const int item_idx = static_cast<int>(item - model.item_ids.begin());

  const fs::path out = prepare_out_dir(c, "explain");
  auto breakdown = mmf::contribution_breakdown(model, cat, user_idx, item_idx);

  std::vector<std::optional<double>> aads;
  json entries = json::array();
  for (const auto& entry : breakdown.entries) {
    auto aad_value =
        mmf::aad(model, ds, cat, user_idx, entry.attribute, c.neighbors);
    aads.push_back(aad_value);
    json neighbors = json::array();
    for (int n : mmf::nearest_attributes(
             model, entry.attribute, c.neighbors,
             cat.indices_of_type(entry.type)))
      neighbors.push_back(cat.type_of(n) + ":" + cat.value_of(n));
    json e{
        {"type", entry.type},
        {"value", entry.value},
        {"raw", entry.raw},
        {"percent", entry.percent},
        {"percent_abs", entry.percent_abs},
        {"neighbors", neighbors},
    };
    e["aad"] = aad_value ? json(*aad_value) : json(nullptr);
    entries.push_back(std::move(e));
  }
  auto correlation = mmf::contribution_aad_correlation(breakdown, aads);
  json j{
      {"user", breakdown.user_id},
      {"item", breakdown.item_id},
      {"prediction", breakdown.prediction},
      {"entries", entries},
  };
  j["aad_correlation"] = correlation ? json(*correlation) : json(nullptr);
  std::ofstream(out / "explain.json") << j.dump(2) << '\n';

  std::printf("prediction         %s\n",
              mmf::format_double(breakdown.prediction).c_str());
  for (const auto& entry : breakdown.entries)
    std::printf("  %-10s %-18s %6.1f%%\n", entry.type.c_str(),
                entry.value.c_str(), entry.percent);
  if (correlation)
    std::printf("aad_correlation    %s\n",
                mmf::format_double(*correlation).c_str());
  return 0;
}

int cmd_export_vectors(RunConfig& c) {
  if (c.model_file.empty()) throw mmf::ConfigError("--model is required");
  auto loaded = mmf::load_model(c.model_file);
  if (!std::holds_alternative<mmf::MmfModel<double>>(loaded))
    throw mmf::ConfigError("export-vectors needs an attribute model");
  auto& model = std::get<mmf::MmfModel<double>>(loaded);
  const fs::path out = prepare_out_dir(c, "export-vectors");

  mmf::VectorKind kind;
  if (c.vector_kind == "users")
    kind = mmf::VectorKind::users;
  else if (c.vector_kind == "attributes")
    kind = mmf::VectorKind::attributes;
  else
    throw mmf::ConfigError("unknown vector kind '" + c.vector_kind + "'");

  std::vector<int> indices;
  if (c.export_all) {
    const int n = kind == mmf::VectorKind::users ? model.num_users()
                                                 : model.num_attributes();
    indices.resize(n);
    std::iota(indices.begin(), indices.end(), 0);
  } else {
    for (const std::string& id : c.ids) {
      if (kind == mmf::VectorKind::users) {
        auto it = std::find(model.user_ids.begin(), model.user_ids.end(), id);
        if (it == model.user_ids.end())
          throw mmf::ArgumentError("unknown user '" + id + "'");
        indices.push_back(static_cast<int>(it - model.user_ids.begin()));
      } else {
        const auto colon = id.find(':');
        if (colon == std::string::npos)
          throw mmf::ArgumentError("attribute ids use TYPE:VALUE, got '" +
                                   id + "'");
        const std::string type = id.substr(0, colon);
        const std::string value = id.substr(colon + 1);
        bool found = false;
        for (int k = 0; k < model.num_attributes(); ++k)
          if (model.attr_types[k] == type && model.attr_values[k] == value) {
            indices.push_back(k);
            found = true;
            break;
          }
        if (!found) throw mmf::ArgumentError("unknown attribute '" + id + "'");
      }
    }
  }
  mmf::export_vectors(model, kind, indices, out / "vectors.csv");
  std::printf("vectors            %s (%zu rows)\n",
              (out / "vectors.csv").c_str(), indices.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute-level matrix factorization for explainable "
               "recommendation"};
  app.require_subcommand(1);

  std::map<std::string, CommandContext> contexts;
  std::map<std::string, std::function<int(RunConfig&)>> handlers;

  auto add_ratings_options = [](CLI::App* cmd, CommandContext& ctx) {
    auto& c = ctx.cfg;
    ctx.binding.bind(
        cmd->add_option("--ratings", c.ratings, "Ratings file"), c.ratings,
        "ratings");
    ctx.binding.bind(cmd->add_option("--format", c.format,
                                     "Ratings format: auto|tsv4|csv3"),
                     c.format, "format");
  };
  auto add_attr_option = [](CLI::App* cmd, CommandContext& ctx) {
    ctx.binding.bind(cmd->add_option("--attributes", ctx.cfg.attributes,
                                     "Attribute CSV (item_id,type,value)"),
                     ctx.cfg.attributes, "attributes");
  };
  auto add_out_option = [](CLI::App* cmd, CommandContext& ctx) {
    ctx.binding.bind(cmd->add_option("--out", ctx.cfg.out,
                                     "Output directory"),
                     ctx.cfg.out, "out");
  };
  auto add_jobs_option = [](CLI::App* cmd, CommandContext& ctx) {
    ctx.binding.bind(cmd->add_option("--jobs", ctx.cfg.jobs,
                                     "Parallel harness cells"),
                     ctx.cfg.jobs, "jobs");
  };
  auto add_clamp_option = [](CLI::App* cmd, CommandContext& ctx) {
    ctx.binding.bind(cmd->add_flag("--clamp", ctx.cfg.clamp,
                                   "Clamp predictions to [1,5] in reports"),
                     ctx.cfg.clamp, "clamp");
  };
  auto add_model_option = [](CLI::App* cmd, CommandContext& ctx) {
    ctx.binding.bind(cmd->add_option("--model", ctx.cfg.model_file,
                                     "Serialized model file"),
                     ctx.cfg.model_file, "model_file");
  };

  {
    auto& ctx = contexts["stats"];
    auto* cmd = app.add_subcommand(
        "stats", "Dataset counts and density statistics");
    add_ratings_options(cmd, ctx);
    add_attr_option(cmd, ctx);
    add_config_option(cmd, ctx);
    handlers["stats"] = cmd_stats;
  }
  {
    auto& ctx = contexts["split"];
    auto* cmd = app.add_subcommand(
        "split", "Persist a train/test split of a ratings file");
    add_ratings_options(cmd, ctx);
    add_out_option(cmd, ctx);
    auto& c = ctx.cfg;
    ctx.binding.bind(cmd->add_option("--kind", c.split_kind,
                                     "random | cold-start"),
                     c.split_kind, "split_kind");
    ctx.binding.bind(cmd->add_option("--test-fraction", c.test_fraction,
                                     "Held-out fraction"),
                     c.test_fraction, "test_fraction");
    ctx.binding.bind(cmd->add_option("--seed", c.train.seed, "Random seed"),
                     c.train.seed, "seed");
    add_config_option(cmd, ctx);
    handlers["split"] = cmd_split;
  }
  {
    auto& ctx = contexts["train"];
    auto* cmd = app.add_subcommand("train", "Fit a model on a ratings file");
    add_ratings_options(cmd, ctx);
    add_attr_option(cmd, ctx);
    add_out_option(cmd, ctx);
    auto& c = ctx.cfg;
    ctx.binding.bind(cmd->add_option("--model-kind", c.model_kind,
                                     "mf | mmf"),
                     c.model_kind, "model_kind");
    ctx.binding.bind(cmd->add_option("--variant", c.variant,
                                     "base | base+omega | base+theta | full"),
                     c.variant, "variant");
    add_common_train_options(cmd, ctx);
    add_config_option(cmd, ctx);
    handlers["train"] = cmd_train;
  }
  {
    auto& ctx = contexts["eval"];
    auto* cmd = app.add_subcommand(
        "eval", "Evaluate a serialized model on a ratings file");
    add_ratings_options(cmd, ctx);
    add_attr_option(cmd, ctx);
    add_model_option(cmd, ctx);
    add_out_option(cmd, ctx);
    add_clamp_option(cmd, ctx);
    add_config_option(cmd, ctx);
    handlers["eval"] = cmd_eval;
  }
  {
    auto& ctx = contexts["ablate"];
    auto* cmd = app.add_subcommand(
        "ablate", "Train and compare the four weight-combination variants");
    add_ratings_options(cmd, ctx);
    add_attr_option(cmd, ctx);
    add_out_option(cmd, ctx);
    add_common_train_options(cmd, ctx);
    add_clamp_option(cmd, ctx);
    add_jobs_option(cmd, ctx);
    add_config_option(cmd, ctx);
    handlers["ablate"] = cmd_ablate;
  }
  {
    auto& ctx = contexts["coldstart"];
    auto* cmd = app.add_subcommand(
        "coldstart", "Hold out items entirely and compare mf with mmf");
    add_ratings_options(cmd, ctx);
    add_attr_option(cmd, ctx);
    add_out_option(cmd, ctx);
    auto& c = ctx.cfg;
    ctx.binding.bind(cmd->add_option("--test-fraction", c.test_fraction,
                                     "Held-out item fraction"),
                     c.test_fraction, "test_fraction");
    add_common_train_options(cmd, ctx);
    add_clamp_option(cmd, ctx);
    add_jobs_option(cmd, ctx);
    add_config_option(cmd, ctx);
    handlers["coldstart"] = cmd_coldstart;
  }
  {
    auto& ctx = contexts["sweep"];
    auto* cmd = app.add_subcommand(
        "sweep", "One cell per value along latent-dim or topic-count");
    add_ratings_options(cmd, ctx);
    add_attr_option(cmd, ctx);
    add_out_option(cmd, ctx);
    auto& c = ctx.cfg;
    ctx.binding.bind(cmd->add_option("--axis", c.axis,
                                     "latent-dim | topic-count"),
                     c.axis, "axis");
    ctx.binding.bind(cmd->add_option("--values", c.values,
                                     "Sweep values")->delimiter(','),
                     c.values, "values");
    ctx.binding.bind(cmd->add_option("--topic-file", c.topic_files,
                                     "COUNT=PATH topic attribute file"),
                     c.topic_files, "topic_files");
    add_common_train_options(cmd, ctx);
    add_clamp_option(cmd, ctx);
    add_jobs_option(cmd, ctx);
    add_config_option(cmd, ctx);
    handlers["sweep"] = cmd_sweep;
  }
  {
    auto& ctx = contexts["explain"];
    auto* cmd = app.add_subcommand(
        "explain", "Attribute contributions and AAD for one prediction");
    add_ratings_options(cmd, ctx);
    add_attr_option(cmd, ctx);
    add_model_option(cmd, ctx);
    add_out_option(cmd, ctx);
    auto& c = ctx.cfg;
    ctx.binding.bind(cmd->add_option("--user", c.user_id, "User id"),
                     c.user_id, "user");
    ctx.binding.bind(cmd->add_option("--item", c.item_id, "Item id"),
                     c.item_id, "item");
    ctx.binding.bind(cmd->add_option("--neighbors", c.neighbors,
                                     "Neighborhood size for AAD"),
                     c.neighbors, "neighbors");
    add_config_option(cmd, ctx);
    handlers["explain"] = cmd_explain;
  }
  {
    auto& ctx = contexts["export-vectors"];
    auto* cmd = app.add_subcommand(
        "export-vectors", "Write latent vectors as CSV for projection tools");
    add_model_option(cmd, ctx);
    add_out_option(cmd, ctx);
    auto& c = ctx.cfg;
    ctx.binding.bind(cmd->add_option("--kind", c.vector_kind,
                                     "users | attributes"),
                     c.vector_kind, "vector_kind");
    ctx.binding.bind(cmd->add_option("--ids", c.ids,
                                     "Ids (attributes as TYPE:VALUE)")
                         ->delimiter(','),
                     c.ids, "ids");
    ctx.binding.bind(cmd->add_flag("--all", c.export_all,
                                   "Export every vector of the kind"),
                     c.export_all, "all");
    add_config_option(cmd, ctx);
    handlers["export-vectors"] = cmd_export_vectors;
  }

  try {
    app.parse(argc, argv);
    for (auto& [name, ctx] : contexts) {
      if (!app.get_subcommand(name)->parsed()) continue;
      finalize_config(ctx);
      return handlers.at(name)(ctx.cfg);
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const mmf::Error& e) {
    json err{{"error", {{"type", e.kind()}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    json err{{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
}
