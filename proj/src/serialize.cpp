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

#include "mmf/serialize.hpp"

#include <fstream>

#include "mmf/io.hpp"

namespace mmf {

namespace {

nlohmann::json config_to_json(const TrainConfig& cfg) {
  nlohmann::json j{
      {"dim", cfg.dim},
      {"lambda", cfg.lambda},
      {"learning_rate", cfg.learning_rate},
      {"epochs", cfg.epochs},
      {"batch", cfg.batch},
      {"seed", cfg.seed},
      {"clamp_eval", cfg.clamp_eval},
      {"regularize_weights", cfg.regularize_weights},
  };
  if (cfg.fallback_rating) j["fallback_rating"] = *cfg.fallback_rating;
  return j;
}

nlohmann::json eval_to_json(const EvalResult& e) {
  return nlohmann::json{
      {"rmse", e.rmse},
      {"rmse_raw", e.rmse_raw},
      {"rmse_clamped", e.rmse_clamped},
      {"count", e.count},
      {"unknown_user_fallbacks", e.unknown_user_fallbacks},
      {"unknown_item_fallbacks", e.unknown_item_fallbacks},
      {"no_attribute_fallbacks", e.no_attribute_fallbacks},
  };
}

}  // namespace

nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const ReportCell& cell : report.cells) {
    cells.push_back(nlohmann::json{
        {"label", cell.label},
        {"model", cell.model_kind},
        {"variant", cell.variant},
        {"config", config_to_json(cell.config)},
        {"eval", eval_to_json(cell.eval)},
        {"loss_trace", cell.loss_trace},
    });
  }
  return nlohmann::json{{"name", report.name}, {"cells", cells}};
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out =
      "label,model,variant,dim,learning_rate,lambda,epochs,batch,seed,"
      "rmse,rmse_raw,rmse_clamped,fallbacks\n";
  for (const ReportCell& cell : report.cells) {
    out += csv_escape(cell.label) + ',' + cell.model_kind + ',' +
           cell.variant + ',' + std::to_string(cell.config.dim) + ',' +
           format_double(cell.config.learning_rate) + ',' +
           format_double(cell.config.lambda) + ',' +
           std::to_string(cell.config.epochs) + ',' +
           std::to_string(cell.config.batch) + ',' +
           std::to_string(cell.config.seed) + ',' +
           format_double(cell.eval.rmse) + ',' +
           format_double(cell.eval.rmse_raw) + ',' +
           format_double(cell.eval.rmse_clamped) + ',' +
           std::to_string(cell.eval.fallbacks()) + '\n';
  }
  return out;
}

void save_report(const ExperimentReport& report,
                 const std::filesystem::path& dir,
                 const std::string& basename) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / (basename + ".json"));
    if (!out) throw IoError("cannot write report JSON in '" + dir.string() +
                            "'");
    out << report_to_json(report).dump(2) << '\n';
  }
  std::ofstream out(dir / (basename + ".csv"));
  if (!out) throw IoError("cannot write report CSV in '" + dir.string() + "'");
  out << report_to_csv(report);
}

}  // namespace mmf
