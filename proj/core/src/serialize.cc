#include "rfscreen/serialize.h"

#include <cmath>
#include <ostream>

#include "rfscreen/error.h"

namespace rfscreen {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<std::size_t> one_based(std::span<const std::size_t> ids) {
  std::vector<std::size_t> out(ids.begin(), ids.end());
  for (auto& id : out) ++id;
  return out;
}

ordered_json timing(double wall, double cpu) {
  return ordered_json{{"wall_seconds", wall}, {"cpu_seconds", cpu}};
}

ordered_json header(const std::string& screener, bool transforming, std::size_t n_features,
                    std::span<const std::string> names) {
  ordered_json doc;
  doc["schema"] = "rfscreen.screening";
  doc["schema_version"] = kScreeningSchemaVersion;
  doc["screener"] = screener;
  doc["transforming"] = transforming;
  doc["n_features"] = n_features;
  doc["feature_names"] = std::vector<std::string>(names.begin(), names.end());
  return doc;
}

// Scores may be infinite; JSON has no infinity, so those become null.
ordered_json score_value(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

const json& member(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ValidationError(std::string("screening document: missing '") + key + "'");
  return *it;
}

}  // namespace

ordered_json screening_to_json(const ScreeningResult& result, const ScreeningConfig& config) {
  const std::span<const std::string> originals(result.feature_names.data(), result.n_original_features);
  ordered_json doc = header("rfms", false, result.n_original_features, originals);

  ordered_json selected = ordered_json::array();
  for (std::size_t id : result.selected.indices) {
    selected.push_back({{"id", id + 1}, {"name", result.feature_names[id]}});
  }
  doc["selected"] = std::move(selected);

  doc["config"] = {
      {"step-size", config.alpha},
      {"reduced-size", config.beta},
      {"n-trees", config.forest.n_trees},
      {"n-subfeatures", config.forest.n_subfeatures},
      {"min-samples-leaf", config.forest.min_samples_leaf},
      {"min-purity-increase", config.forest.min_purity_increase},
      {"partial-sampling", config.forest.partial_sampling},
      {"n-canaries", config.n_canaries},
      {"random-state", config.seed},
      {"forest-seed", config.forest.seed},
  };
  doc["permutation"] = one_based(result.permutation);

  ordered_json rounds = ordered_json::array();
  for (const RoundRecord& r : result.rounds) {
    rounds.push_back({
        {"round", r.round},
        {"chunk", one_based(r.chunk)},
        {"carried", one_based(r.carried)},
        {"importance", r.importance},
        {"selected", one_based(r.selected)},
    });
  }
  doc["rounds"] = std::move(rounds);

  const CanaryAudit audit = canary_audit(result);
  doc["canaries"] = {
      {"count", result.canary_ids.size()},
      {"ids", one_based(result.canary_ids)},
      {"leak_count", audit.leak_count},
      {"leaked", one_based(audit.leaked)},
  };
  doc["timing"] = timing(result.wall_seconds, result.cpu_seconds);
  return doc;
}

ordered_json subset_to_json(const std::string& screener, const FeatureSubset& subset, const Dataset& dataset,
                            std::span<const double> scores, double wall_seconds, double cpu_seconds) {
  ordered_json doc = header(screener, false, dataset.n_features(), dataset.feature_names());
  ordered_json selected = ordered_json::array();
  for (std::size_t id : subset.indices) {
    ordered_json item{{"id", id + 1}, {"name", dataset.feature_names()[id]}};
    if (!scores.empty()) item["score"] = score_value(scores[id]);
    selected.push_back(std::move(item));
  }
  doc["selected"] = std::move(selected);
  doc["canaries"] = {{"count", 0}, {"ids", json::array()}, {"leak_count", 0}, {"leaked", json::array()}};
  doc["timing"] = timing(wall_seconds, cpu_seconds);
  return doc;
}

ordered_json pca_to_json(const PcaModel& model, const Dataset& dataset, double wall_seconds, double cpu_seconds) {
  ordered_json doc = header("pca", true, dataset.n_features(), dataset.feature_names());
  ordered_json selected = ordered_json::array();
  for (std::size_t k = 0; k < model.n_components; ++k) {
    selected.push_back({{"id", k + 1}, {"name", "pc_" + std::to_string(k + 1)}});
  }
  doc["selected"] = std::move(selected);
  doc["pca_model"] = {
      {"n_features", model.n_features},
      {"n_components", model.n_components},
      {"mean", model.mean},
      {"eigenvalues", model.eigenvalues},
      {"components_column_major", model.components},
  };
  doc["canaries"] = {{"count", 0}, {"ids", json::array()}, {"leak_count", 0}, {"leaked", json::array()}};
  doc["timing"] = timing(wall_seconds, cpu_seconds);
  return doc;
}

ScreeningDocument parse_screening_json(const json& doc) {
  if (member(doc, "schema").get<std::string>() != "rfscreen.screening") {
    throw ValidationError("screening document: unexpected schema");
  }
  if (member(doc, "schema_version").get<int>() != kScreeningSchemaVersion) {
    throw ValidationError("screening document: unsupported schema_version");
  }
  ScreeningDocument out;
  out.screener = member(doc, "screener").get<std::string>();
  out.transforming = member(doc, "transforming").get<bool>();
  out.n_features = member(doc, "n_features").get<std::size_t>();
  out.feature_names = member(doc, "feature_names").get<std::vector<std::string>>();
  for (const auto& item : member(doc, "selected")) {
    const auto id = item.at("id").get<std::size_t>();
    if (id == 0) throw ValidationError("screening document: feature ids are 1-based");
    out.selected_ids.push_back(id - 1);
    out.selected_names.push_back(item.at("name").get<std::string>());
  }
  if (auto it = doc.find("canaries"); it != doc.end()) {
    for (auto id : it->at("ids")) out.canary_ids.push_back(id.get<std::size_t>() - 1);
  }
  if (auto it = doc.find("pca_model"); it != doc.end()) {
    PcaModel model;
    model.n_features = it->at("n_features").get<std::size_t>();
    model.n_components = it->at("n_components").get<std::size_t>();
    model.mean = it->at("mean").get<std::vector<double>>();
    model.eigenvalues = it->at("eigenvalues").get<std::vector<double>>();
    model.components = it->at("components_column_major").get<std::vector<double>>();
    if (model.mean.size() != model.n_features ||
        model.components.size() != model.n_features * model.n_components) {
      throw ValidationError("screening document: inconsistent pca_model shape");
    }
    out.pca = std::move(model);
  }
  return out;
}

ordered_json mask_timing(ordered_json doc) {
  doc.erase("timing");
  return doc;
}

namespace {

ordered_json entry_to_json(const ReportEntry& e) {
  return ordered_json{
      {"screener", e.screener},
      {"classifier", e.classifier},
      {"n_features_out", e.n_features_out},
      {"transforming", e.transforming},
      {"mean_accuracy", e.mean_accuracy},
      {"fold_accuracies", e.fold_accuracies},
      {"fold_sizes", e.fold_sizes},
      {"screening_cpu_seconds", e.screening_cpu_seconds},
      {"fitting_cpu_seconds", e.fitting_cpu_seconds},
  };
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

ordered_json report_to_json(const EvaluationReport& report) {
  ordered_json doc;
  doc["schema"] = "rfscreen.report";
  doc["schema_version"] = kReportSchemaVersion;
  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries) entries.push_back(entry_to_json(e));
  doc["entries"] = std::move(entries);
  doc["best"] = report.entries.empty() ? ordered_json(nullptr) : ordered_json(report.best);
  return doc;
}

ordered_json sweep_to_json(std::span<const SweepRow> rows) {
  ordered_json doc;
  doc["schema"] = "rfscreen.sweep";
  doc["schema_version"] = kReportSchemaVersion;
  ordered_json out = ordered_json::array();
  for (const auto& row : rows) {
    out.push_back({{"n_features_out", row.n_features_out},
                   {"best_accuracy", row.best_accuracy},
                   {"best_classifier", row.best_classifier},
                   {"report", report_to_json(row.report)}});
  }
  doc["rows"] = std::move(out);
  return doc;
}

void write_report_csv(std::ostream& out, const EvaluationReport& report) {
  const auto precision = out.precision(17);
  out << "screener,classifier,n_features_out,transforming,mean_accuracy,screening_cpu_seconds,"
         "fitting_cpu_seconds,best\n";
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    out << csv_field(e.screener) << ',' << csv_field(e.classifier) << ',' << e.n_features_out << ','
        << (e.transforming ? 1 : 0) << ',' << e.mean_accuracy << ',' << e.screening_cpu_seconds << ','
        << e.fitting_cpu_seconds << ',' << (i == report.best ? 1 : 0) << '\n';
  }
  out.precision(precision);
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  const auto precision = out.precision(17);
  out << "n_features_out,best_accuracy,best_classifier\n";
  for (const auto& row : rows) {
    out << row.n_features_out << ',' << row.best_accuracy << ',' << csv_field(row.best_classifier) << '\n';
  }
  out.precision(precision);
}

ordered_json provenance_to_json(const Provenance& provenance, const GeneratorConfig& config,
                                const Dataset& dataset) {
  ordered_json doc;
  doc["schema"] = "rfscreen.provenance";
  doc["schema_version"] = 1;
  doc["config"] = {
      {"n-classes", config.n_classes},
      {"n-samples-per-class", config.n_samples_per_class},
      {"n-true-features", config.n_true_features},
      {"n-fake-features", config.n_fake_features},
      {"min-usefulness", config.min_usefulness},
      {"max-usefulness", config.max_usefulness},
      {"location-sharing-extent", config.location_sharing_extent},
      {"location-ordering-extent", config.location_ordering_extent},
      {"n-features-out", config.n_features_out},
      {"blending-mode", to_string(config.blending_mode)},
      {"min-count", config.min_count},
      {"max-count", config.max_count},
      {"random-state", config.seed},
  };
  doc["n_true_features"] = provenance.n_true_features;
  doc["hidden_usefulness"] = provenance.usefulness;
  ordered_json outputs = ordered_json::array();
  for (std::size_t j = 0; j < provenance.outputs.size(); ++j) {
    ordered_json sources = ordered_json::array();
    for (const auto& src : provenance.outputs[j]) {
      sources.push_back({{"hidden", src.hidden + 1}, {"weight", src.weight}});
    }
    outputs.push_back({{"id", j + 1},
                       {"name", dataset.feature_names()[j]},
                       {"has_true_source", provenance.has_true_source(j)},
                       {"sources", std::move(sources)}});
  }
  doc["outputs"] = std::move(outputs);
  return doc;
}

Provenance parse_provenance_json(const json& doc) {
  if (doc.value("schema", std::string()) != "rfscreen.provenance") {
    throw ValidationError("provenance document: unexpected schema");
  }
  Provenance out;
  out.n_true_features = doc.at("n_true_features").get<std::size_t>();
  out.usefulness = doc.at("hidden_usefulness").get<std::vector<double>>();
  for (const auto& item : doc.at("outputs")) {
    std::vector<BlendSource> sources;
    for (const auto& src : item.at("sources")) {
      sources.push_back({src.at("hidden").get<std::size_t>() - 1, src.at("weight").get<double>()});
    }
    out.outputs.push_back(std::move(sources));
  }
  return out;
}

}  // namespace rfscreen
