#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "rfscreen/baselines.h"
#include "rfscreen/cpu_timer.h"
#include "rfscreen/dataset.h"
#include "rfscreen/error.h"
#include "rfscreen/eval.h"
#include "rfscreen/rfms.h"
#include "rfscreen/serialize.h"
#include "rfscreen/synth.h"
#include "run_config.h"

namespace rfscreen::cli {
namespace {

namespace fs = std::filesystem;

const std::set<std::string> kGenerateKeys = {
    "n-classes",     "n-samples-per-class",     "n-true-features",          "n-fake-features",
    "min-usefulness", "max-usefulness",         "location-sharing-extent",  "location-ordering-extent",
    "n-features-out", "blending-mode",          "min-count",                "max-count",
    "random-state",
};

const std::set<std::string> kScreenKeys = {
    "reduced-size",        "step-size",        "n-subfeatures", "n-trees",      "min-samples-leaf",
    "min-purity-increase", "partial-sampling", "random-state",  "n-canaries",
};

std::set<std::string> eval_keys() {
  std::set<std::string> keys = kScreenKeys;
  keys.insert({"folds", "knn-k", "counts", "clf-n-trees", "clf-n-subfeatures", "clf-min-samples-leaf",
               "clf-min-purity-increase", "clf-partial-sampling"});
  return keys;
}

struct CommonOptions {
  std::string config;
  std::string data;
  std::string out;
  std::string screening;
  std::string label_column = "label";
  std::string screener = "rfms";
  std::string classifier = "knn";
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = 0;
  bool threads_given = false;
  bool leak_safe = false;
};

std::size_t thread_count(const CommonOptions& opts) {
  if (opts.threads_given) return opts.threads;
  if (const char* env = std::getenv("RFSCREEN_THREADS"); env && *env) {
    RunConfig tmp;
    tmp.set("RFSCREEN_THREADS", env);
    return tmp.get_size("RFSCREEN_THREADS", 0);
  }
  return 0;
}

RunConfig load_config(const CommonOptions& opts, const std::set<std::string>& allowed) {
  RunConfig config = opts.config.empty() ? RunConfig() : RunConfig::load(opts.config, allowed);
  if (opts.seed_given) config.set("random-state", std::to_string(opts.seed));
  return config;
}

// Writes to a sibling temporary, then renames, so a failed run leaves no
// partial file behind.
void write_file(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

std::string json_text(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

fs::path sibling(const fs::path& path, const std::string& extension) {
  fs::path out = path;
  out.replace_extension(extension);
  if (out == path) out += extension;
  return out;
}

ScreeningConfig screening_config(const RunConfig& config, std::size_t threads) {
  ScreeningConfig out;
  out.alpha = config.get_size("step-size", 505);
  out.beta = config.get_size("reduced-size", 200);
  out.n_canaries = config.get_size("n-canaries", 100);
  out.seed = config.get_u64("random-state", kDefaultSeed);
  out.forest.n_trees = config.get_size("n-trees", 500);
  out.forest.n_subfeatures = config.get_size("n-subfeatures", 200);
  out.forest.min_samples_leaf = config.get_size("min-samples-leaf", 1);
  out.forest.min_purity_increase = config.get_double("min-purity-increase", 0.01);
  out.forest.partial_sampling = config.get_double("partial-sampling", 0.7);
  out.forest.seed = out.seed;
  out.forest.n_threads = threads;
  out.forest.validate();
  if (out.beta < 1) throw ValidationError("reduced-size must be >= 1");
  if (out.beta > out.alpha) {
    throw ValidationError("reduced-size (" + std::to_string(out.beta) + ") exceeds step-size (" +
                          std::to_string(out.alpha) + ")");
  }
  return out;
}

GeneratorConfig generator_config(const RunConfig& config) {
  GeneratorConfig out;
  out.n_classes = config.get_size("n-classes", out.n_classes);
  out.n_samples_per_class = config.get_size("n-samples-per-class", out.n_samples_per_class);
  out.n_true_features = config.get_size("n-true-features", out.n_true_features);
  out.n_fake_features = config.get_size("n-fake-features", out.n_fake_features);
  out.min_usefulness = config.get_double("min-usefulness", out.min_usefulness);
  out.max_usefulness = config.get_double("max-usefulness", out.max_usefulness);
  out.location_sharing_extent = config.get_size("location-sharing-extent", out.location_sharing_extent);
  out.location_ordering_extent = config.get_size("location-ordering-extent", out.location_ordering_extent);
  out.n_features_out = config.get_size("n-features-out", out.n_features_out);
  out.blending_mode = parse_blending_mode(config.get_string("blending-mode", to_string(out.blending_mode)));
  out.min_count = config.get_size("min-count", out.min_count);
  out.max_count = config.get_size("max-count", out.max_count);
  out.seed = config.get_u64("random-state", out.seed);
  out.validate();
  return out;
}

std::vector<ClassifierSpec> classifier_grid(const std::string& kind, const RunConfig& config,
                                            std::size_t threads) {
  std::vector<ClassifierSpec> grid;
  if (kind == "knn") {
    for (std::size_t k : config.get_size_list("knn-k", {1, 3, 5})) {
      if (k == 0) throw ValidationError("knn-k entries must be positive");
      grid.push_back(ClassifierSpec::knn(k));
    }
  } else if (kind == "rf") {
    for (std::size_t trees : config.get_size_list("clf-n-trees", {100})) {
      for (std::size_t sub : config.get_size_list("clf-n-subfeatures", {0})) {
        for (std::size_t leaf : config.get_size_list("clf-min-samples-leaf", {1})) {
          for (double purity : config.get_double_list("clf-min-purity-increase", {0.0})) {
            ForestParams params;
            params.n_trees = trees;
            params.n_subfeatures = sub;
            params.min_samples_leaf = leaf;
            params.min_purity_increase = purity;
            params.partial_sampling = config.get_double("clf-partial-sampling", 1.0);
            params.seed = config.get_u64("random-state", kDefaultSeed);
            params.n_threads = threads;
            ForestParams check = params;
            check.n_subfeatures = std::max<std::size_t>(check.n_subfeatures, 1);
            check.validate();
            grid.push_back(ClassifierSpec::random_forest(params));
          }
        }
      }
    }
  } else if (kind == "majority") {
    grid.push_back(ClassifierSpec::majority());
  } else {
    throw ValidationError("unknown classifier '" + kind + "' (expected knn, rf or majority)");
  }
  if (grid.empty()) throw ValidationError("classifier grid is empty");
  return grid;
}

ScreenerSpec screener_spec(const CommonOptions& opts, const RunConfig& config, const Dataset& data,
                           std::size_t threads) {
  if (!opts.screening.empty()) {
    std::ifstream in(opts.screening);
    if (!in) throw IoError("cannot open screening result '" + opts.screening + "'");
    nlohmann::json raw;
    try {
      in >> raw;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("screening result '" + opts.screening + "': " + e.what());
    }
    const ScreeningDocument doc = parse_screening_json(raw);
    if (doc.feature_names != data.feature_names()) {
      throw ValidationError("feature names in '" + opts.screening + "' do not match the dataset columns");
    }
    if (doc.pca) return ScreenerSpec::fixed_projection(*doc.pca);
    FeatureSubset subset;
    for (std::size_t id : doc.selected_ids) {
      if (id < data.n_features()) subset.indices.push_back(id);
    }
    subset.validate(data.n_features());
    return ScreenerSpec::fixed_subset(std::move(subset));
  }
  const std::string& kind = opts.screener;
  const std::size_t k = config.get_size("reduced-size", 200);
  const std::uint64_t seed = config.get_u64("random-state", kDefaultSeed);
  if (kind == "none") return ScreenerSpec::identity();
  if (kind == "kbest") return ScreenerSpec::kbest(k);
  if (kind == "pca") return ScreenerSpec::pca(k);
  if (kind == "random") return ScreenerSpec::random(k, seed);
  if (kind == "rfms") {
    const ScreeningConfig sc = screening_config(config, threads);
    sc.validate(data.n_features() + sc.n_canaries);
    return ScreenerSpec::rfms_screener(sc);
  }
  throw ValidationError("unknown screener '" + kind + "' (expected none, rfms, kbest, pca or random)");
}

CvOptions cv_options(const CommonOptions& opts, const RunConfig& config) {
  CvOptions cv;
  cv.folds = opts.folds ? opts.folds : config.get_size("folds", 5);
  cv.seed = config.get_u64("random-state", kDefaultSeed);
  cv.leak_safe = opts.leak_safe;
  if (cv.folds < 2) throw ValidationError("folds must be >= 2");
  return cv;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ValidationError(std::string("missing required flag ") + flag);
}

int cmd_generate(const CommonOptions& opts, std::ostream& out) {
  require(opts.config, "--config");
  require(opts.out, "--out");
  const GeneratorConfig gen = generator_config(load_config(opts, kGenerateKeys));
  const GeneratedData data = generate(gen);
  std::ostringstream csv;
  write_csv(csv, data.dataset, opts.label_column);
  const fs::path csv_path = opts.out;
  const fs::path prov_path = sibling(csv_path, ".provenance.json");
  write_file(csv_path, csv.str());
  write_file(prov_path, json_text(provenance_to_json(data.provenance, gen, data.dataset)));
  out << "generated " << data.dataset.n_samples() << " samples x " << data.dataset.n_features()
      << " features, " << data.dataset.n_classes() << " classes -> " << csv_path.string() << " (provenance: "
      << prov_path.string() << ")\n";
  return kExitOk;
}

int cmd_screen(const CommonOptions& opts, std::ostream& out) {
  require(opts.data, "--data");
  require(opts.out, "--out");
  const std::size_t threads = thread_count(opts);
  const RunConfig config = load_config(opts, kScreenKeys);
  const Dataset data = load_csv(opts.data, opts.label_column);

  nlohmann::ordered_json doc;
  if (opts.screener == "rfms") {
    const ScreeningConfig sc = screening_config(config, threads);
    sc.validate(data.n_features() + sc.n_canaries);
    const ScreeningResult result = screen(data, sc);
    doc = screening_to_json(result, sc);
    out << "rfms: " << result.rounds.size() << " rounds, " << result.selected.size() << " selected, "
        << result.canary_leak_count << " canary leaks\n";
  } else {
    const std::size_t k = config.get_size("reduced-size", 200);
    const CpuTimer timer;
    if (opts.screener == "kbest") {
      if (k == 0 || k > data.n_features()) {
        throw ValidationError("reduced-size must lie in [1, " + std::to_string(data.n_features()) + "]");
      }
      const auto scores = anova_fscores(data);
      const FeatureSubset subset = kbest_fscore(data, k);
      doc = subset_to_json("kbest", subset, data, scores, timer.wall_seconds(), timer.cpu_seconds());
    } else if (opts.screener == "pca") {
      const PcaModel model = pca_fit(data, k);
      doc = pca_to_json(model, data, timer.wall_seconds(), timer.cpu_seconds());
    } else if (opts.screener == "random") {
      const FeatureSubset subset =
          random_subset(data.n_features(), k, config.get_u64("random-state", kDefaultSeed));
      doc = subset_to_json("random", subset, data, {}, timer.wall_seconds(), timer.cpu_seconds());
    } else {
      throw ValidationError("unknown screener '" + opts.screener + "' (expected rfms, kbest, pca or random)");
    }
    out << opts.screener << ": " << k << " selected\n";
  }
  write_file(opts.out, json_text(doc));
  return kExitOk;
}

void print_entry(std::ostream& out, const ReportEntry& e) {
  out << std::fixed << std::setprecision(4) << e.screener << " / " << e.classifier << " / "
      << e.n_features_out << " features: accuracy " << e.mean_accuracy << " (screening "
      << e.screening_cpu_seconds << " s, fitting " << e.fitting_cpu_seconds << " s CPU)\n";
  out.unsetf(std::ios::floatfield);
}

int cmd_evaluate(const CommonOptions& opts, std::ostream& out) {
  require(opts.data, "--data");
  require(opts.out, "--out");
  const std::size_t threads = thread_count(opts);
  const RunConfig config = load_config(opts, eval_keys());
  const Dataset data = load_csv(opts.data, opts.label_column);
  const ScreenerSpec screener = screener_spec(opts, config, data, threads);
  const auto classifiers = classifier_grid(opts.classifier, config, threads);
  const CvOptions cv = cv_options(opts, config);

  const EvaluationReport report = grid_search(data, std::span(&screener, 1), classifiers, cv);
  std::ostringstream csv;
  write_report_csv(csv, report);
  write_file(opts.out, json_text(report_to_json(report)));
  write_file(sibling(opts.out, ".csv"), csv.str());
  for (const auto& e : report.entries) print_entry(out, e);
  out << "best: ";
  print_entry(out, report.best_entry());
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts, std::ostream& out) {
  require(opts.data, "--data");
  require(opts.out, "--out");
  const std::size_t threads = thread_count(opts);
  RunConfig config = load_config(opts, eval_keys());
  if (!config.has("counts")) throw ValidationError("sweep needs a 'counts' list in the config");
  const auto counts = config.get_size_list("counts", {});
  if (counts.empty()) throw ValidationError("sweep: 'counts' is empty");
  // Each count replaces reduced-size; the largest one is what must fit.
  config.set("reduced-size", std::to_string(*std::max_element(counts.begin(), counts.end())));
  const Dataset data = load_csv(opts.data, opts.label_column);
  for (std::size_t c : counts) {
    if (c == 0 || c > data.n_features()) {
      throw ValidationError("counts entry " + std::to_string(c) + " outside [1, " +
                            std::to_string(data.n_features()) + "]");
    }
  }
  ScreenerSpec screener = screener_spec(opts, config, data, threads);
  if (screener.kind == ScreenerKind::kRfms) {
    for (std::size_t c : counts) {
      if (c > screener.rfms.alpha) {
        throw ValidationError("counts entry " + std::to_string(c) + " exceeds step-size " +
                              std::to_string(screener.rfms.alpha));
      }
    }
  }
  if (screener.kind == ScreenerKind::kFixed) {
    for (std::size_t c : counts) (void)screener.with_count(c);
  }
  const auto classifiers = classifier_grid(opts.classifier, config, threads);
  const CvOptions cv = cv_options(opts, config);

  const auto rows = convergence_sweep(data, screener, classifiers, counts, cv);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_file(opts.out, json_text(sweep_to_json(rows)));
  write_file(sibling(opts.out, ".csv"), csv.str());
  for (const auto& row : rows) {
    out << row.n_features_out << " features: best accuracy " << row.best_accuracy << " ("
        << row.best_classifier << ")\n";
  }
  return kExitOk;
}

int cmd_audit(const CommonOptions& opts, std::ostream& out) {
  require(opts.screening, "--screening");
  std::ifstream in(opts.screening);
  if (!in) throw IoError("cannot open screening result '" + opts.screening + "'");
  nlohmann::json raw;
  try {
    in >> raw;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("screening result '" + opts.screening + "': " + e.what());
  }
  const ScreeningDocument doc = parse_screening_json(raw);
  const std::set<std::size_t> canaries(doc.canary_ids.begin(), doc.canary_ids.end());
  std::vector<std::size_t> leaked;
  for (std::size_t i = 0; i < doc.selected_ids.size(); ++i) {
    if (canaries.count(doc.selected_ids[i])) leaked.push_back(i);
  }
  out << "canaries: " << canaries.size() << ", selected: " << doc.selected_ids.size()
      << ", leaked: " << leaked.size() << "\n";
  for (std::size_t i : leaked) {
    out << "  leaked id " << doc.selected_ids[i] + 1 << " (" << doc.selected_names[i] << ")\n";
  }
  if (canaries.empty()) out << "warning: screening ran without canaries\n";
  return leaked.empty() ? kExitOk : kExitCanaryLeak;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random forest-based multiround feature screening toolkit", "rfscreen"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config, "key = value settings file");
    cmd->add_option("--label-column", opts.label_column, "name of the CSV label column");
    cmd->add_option("--seed", opts.seed, "overrides random-state")->each([&](const std::string&) {
      opts.seed_given = true;
    });
    cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores; env RFSCREEN_THREADS)")
        ->each([&](const std::string&) { opts.threads_given = true; });
  };

  auto* generate_cmd = app.add_subcommand("generate", "write a synthetic dataset and its provenance");
  add_common(generate_cmd);
  generate_cmd->add_option("--out", opts.out, "output CSV path");

  auto* screen_cmd = app.add_subcommand("screen", "screen features and write a screening result JSON");
  add_common(screen_cmd);
  screen_cmd->add_option("--data", opts.data, "input CSV");
  screen_cmd->add_option("--out", opts.out, "output JSON path");
  screen_cmd->add_option("--screener", opts.screener, "rfms | kbest | pca | random");

  auto add_eval = [&](CLI::App* cmd) {
    add_common(cmd);
    cmd->add_option("--data", opts.data, "input CSV");
    cmd->add_option("--out", opts.out, "report JSON path (a .csv is written next to it)");
    cmd->add_option("--screening", opts.screening, "precomputed screening result JSON");
    cmd->add_option("--screener", opts.screener, "none | rfms | kbest | pca | random");
    cmd->add_option("--classifier", opts.classifier, "knn | rf | majority");
    cmd->add_option("--folds", opts.folds, "cross-validation folds");
    cmd->add_flag("--leak-safe", opts.leak_safe, "refit the screener inside every fold");
  };
  auto* evaluate_cmd = app.add_subcommand("evaluate", "cross-validate classifiers on screened features");
  add_eval(evaluate_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "best accuracy as a function of the screened feature count");
  add_eval(sweep_cmd);

  auto* audit_cmd = app.add_subcommand("audit", "report canaries among the selected features");
  audit_cmd->add_option("--screening", opts.screening, "screening result JSON");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("rfscreen");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rfscreen: " << e.what() << "\n";
    return kExitValidation;
  }
  if (opts.screener == "rfms" && app.got_subcommand(evaluate_cmd) && opts.screening.empty() &&
      evaluate_cmd->count("--screener") == 0) {
    opts.screener = "none";
  }

  try {
    if (app.got_subcommand(generate_cmd)) return cmd_generate(opts, out);
    if (app.got_subcommand(screen_cmd)) return cmd_screen(opts, out);
    if (app.got_subcommand(evaluate_cmd)) return cmd_evaluate(opts, out);
    if (app.got_subcommand(sweep_cmd)) return cmd_sweep(opts, out);
    if (app.got_subcommand(audit_cmd)) return cmd_audit(opts, out);
  } catch (const ValidationError& e) {
    err << "rfscreen: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "rfscreen: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "rfscreen: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace rfscreen::cli
