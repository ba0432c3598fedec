#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfscreen/baselines.h"
#include "rfscreen/eval.h"
#include "rfscreen/rfms.h"
#include "rfscreen/synth.h"

namespace rfscreen {

// Screening documents
// -------------------
//
// {
//   "schema": "rfscreen.screening", "schema_version": 1,
//   "screener": "rfms" | "kbest" | "pca" | "random",
//   "transforming": false,            // true only for pca
//   "n_features": <original columns>,
//   "feature_names": [...],           // original columns only
//   "selected": [{"id": 1-based, "name": ...}, ...],
//   ...screener-specific members...,
//   "timing": {"wall_seconds": ..., "cpu_seconds": ...}
// }
//
// Feature ids are 1-based everywhere in serialized output. Canaries take the
// ids n_features + 1 ... n_features + n_canaries. Everything that varies
// between identical runs lives under "timing".
inline constexpr int kScreeningSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

nlohmann::ordered_json screening_to_json(const ScreeningResult& result, const ScreeningConfig& config);

nlohmann::ordered_json subset_to_json(const std::string& screener, const FeatureSubset& subset,
                                      const Dataset& dataset, std::span<const double> scores,
                                      double wall_seconds, double cpu_seconds);

nlohmann::ordered_json pca_to_json(const PcaModel& model, const Dataset& dataset, double wall_seconds,
                                   double cpu_seconds);

// Parsed form of any screening document.
struct ScreeningDocument {
  std::string screener;
  bool transforming = false;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> selected_ids;  // 0-based
  std::vector<std::string> selected_names;
  std::vector<std::size_t> canary_ids;    // 0-based
  std::optional<PcaModel> pca;
};

ScreeningDocument parse_screening_json(const nlohmann::json& doc);

// Copy of `doc` with the "timing" member removed.
nlohmann::ordered_json mask_timing(nlohmann::ordered_json doc);

nlohmann::ordered_json report_to_json(const EvaluationReport& report);
nlohmann::ordered_json sweep_to_json(std::span<const SweepRow> rows);

// CSV with one row per report cell.
void write_report_csv(std::ostream& out, const EvaluationReport& report);
// CSV with one row per swept count: n_features_out, best_accuracy, best_classifier.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

nlohmann::ordered_json provenance_to_json(const Provenance& provenance, const GeneratorConfig& config,
                                          const Dataset& dataset);
Provenance parse_provenance_json(const nlohmann::json& doc);

}  // namespace rfscreen
