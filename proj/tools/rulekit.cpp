// rulekit: binarize tables, train rule sets, predict, cross-validate and
// compare subproblem solvers from the command line.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "rulekit/dataset.hpp"
#include "rulekit/error.hpp"
#include "rulekit/evaluation.hpp"
#include "rulekit/kernels.hpp"
#include "rulekit/learner.hpp"
#include "rulekit/model_io.hpp"
#include "rulekit/table.hpp"

using namespace rulekit;

namespace {

struct DataArgs {
  std::string data;
  std::string schema;
  std::string labels_column;
  std::string positive_label;
};

struct HyperArgs {
  Hyperparams h;
  std::string preset;
  double eta = 0.1;
  bool no_refine = false;
  std::string subproblem = "local";
  double time_limit = 600;
  std::uint64_t seed = 0;
  CLI::Option* beta_flags[3] = {nullptr, nullptr, nullptr};
  CLI::Option* lambda_flag = nullptr;

  TrainConfig config() const {
    TrainConfig cfg;
    cfg.hyperparams = h;
    if (!preset.empty()) {
      Hyperparams p = Hyperparams::preset(preset, h.lambda, eta);
      p.max_rules = h.max_rules;
      p.active_set_size = h.active_set_size;
      cfg.hyperparams = p;
    }
    cfg.mode = subproblem_mode_from_string(subproblem);
    cfg.time_limit_seconds = time_limit;
    cfg.refine = !no_refine;
    cfg.seed = seed;
    return cfg;
  }
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--data", a.data, "input table (CSV with header)")->required()->check(CLI::ExistingFile);
  auto* schema = cmd->add_option("--schema", a.schema, "column schema JSON")->check(CLI::ExistingFile);
  auto* label = cmd->add_option("--labels-column", a.labels_column, "label column (columns are inferred)");
  cmd->add_option("--positive-label", a.positive_label, "label value treated as positive")->needs(label);
  schema->excludes(label);
}

void add_hyper_options(CLI::App* cmd, HyperArgs& a) {
  a.beta_flags[0] = cmd->add_option("--beta0", a.h.beta0, "weight of covered negatives");
  a.beta_flags[1] = cmd->add_option("--beta1", a.h.beta1, "weight of uncovered positives");
  a.beta_flags[2] = cmd->add_option("--beta2", a.h.beta2, "weight of overlapping covers");
  a.lambda_flag = cmd->add_option("--lambda", a.h.lambda, "per-literal penalty");
  cmd->add_option("--k", a.h.max_rules, "maximum number of rules");
  cmd->add_option("--m", a.h.active_set_size, "active set size of the local search");
  auto* preset = cmd->add_option("--preset", a.preset, "penalized-01 | overlap-eta | hamming")
                     ->check(CLI::IsMember({"penalized-01", "overlap-eta", "hamming"}));
  cmd->add_option("--eta", a.eta, "overlap weight for the overlap-eta preset")->needs(preset);
  for (auto* f : a.beta_flags) preset->excludes(f);
  cmd->add_flag("--no-refine", a.no_refine, "skip the refinement phase");
  cmd->add_option("--subproblem", a.subproblem, "local | bnb | bnb-timed")
      ->check(CLI::IsMember({"local", "bnb", "bnb-timed"}));
  cmd->add_option("--time-limit-secs", a.time_limit, "branch-and-bound time limit per subproblem")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "random seed");
}

std::optional<ColumnSchema> schema_from(const DataArgs& a) {
  if (!a.schema.empty()) return load_schema(a.schema);
  if (a.labels_column.empty()) return std::nullopt;
  ColumnSchema s;
  s.label_column = a.labels_column;
  if (!a.positive_label.empty()) s.positive_label = a.positive_label;
  return s;
}

BinaryDataset load_training_data(const DataArgs& a) {
  auto schema = schema_from(a);
  if (!schema) throw ConfigError("need --schema or --labels-column");
  const Table table = read_csv_file(a.data);
  BinarizeResult res = binarize(table, *schema);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  return std::move(res.data);
}

// Output stream: the named file, or stdout when the path is empty or "-".
struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    stream = &file;
  }
  std::ostream& operator*() { return *stream; }
};

int cmd_binarize(const DataArgs& d, const std::string& out_path, const std::string& model_path) {
  const BinaryDataset data = load_training_data(d);
  Table t;
  for (const auto& desc : data.descriptors()) t.header.push_back(desc.name);
  t.header.push_back("label");
  for (std::size_t i = 0; i < data.sample_count(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < data.feature_count(); ++j)
      row.push_back(data.value(i, static_cast<FeatureIndex>(j)) ? "1" : "0");
    row.push_back(data.label(i) ? "1" : "0");
    t.rows.push_back(std::move(row));
  }
  Output out(out_path);
  write_csv(*out, t);
  if (!model_path.empty()) save_model(model_path, Model::from(RuleSet(data.sample_count()), data, Hyperparams{}));
  std::cerr << data.sample_count() << " samples, " << data.feature_count() << " features\n";
  return 0;
}

int cmd_train(const DataArgs& d, const HyperArgs& ha, const std::string& model_path, const std::string& report_path) {
  const TrainConfig cfg = ha.config();
  cfg.hyperparams.validate();
  const BinaryDataset data = load_training_data(d);
  cfg.validate(data.feature_count());
  const TrainResult res = train(data, cfg);
  const Model model = Model::from(res.rules, data, cfg.hyperparams);
  if (!model_path.empty()) save_model(model_path, model);
  if (!report_path.empty()) {
    Output rep(report_path);
    write_train_report_json(*rep, res.report);
  }
  for (const auto& r : model.rules) std::cout << render_rule(model, r) << '\n';
  const Metrics& m = res.report.train_metrics;
  std::cerr << "rules " << m.n_rules << ", literals " << m.n_literals << ", training accuracy "
            << format_number(m.accuracy) << ", overlap " << format_number(m.overlap) << ", objective "
            << format_number(res.report.final_profit) << '\n';
  return 0;
}

int cmd_predict(const DataArgs& d, const std::string& model_path, const std::string& out_path) {
  const Model model = load_model(model_path);
  const Table table = read_csv_file(d.data);
  const BinaryDataset data = encode(table, model.features, schema_from(d));
  const auto labels = predict_labels(model, data);
  Output out(out_path);
  for (auto y : labels) *out << static_cast<int>(y) << '\n';
  return 0;
}

int cmd_evaluate(const DataArgs& d, const HyperArgs& ha, std::size_t folds, std::size_t jobs, const std::string& grid_name,
                 bool nested, std::size_t inner_folds, const std::string& out_path, const std::string& report_path) {
  const TrainConfig base = ha.config();
  base.hyperparams.validate();
  const BinaryDataset data = load_training_data(d);
  const std::vector<TrainConfig> grid = grid_name == "standard" ? standard_grid(base) : std::vector<TrainConfig>{base};
  const CvPlan plan = CvPlan::make(data.labels(), folds, ha.seed);
  Output out(out_path);
  if (nested) {
    const NestedCvReport rep = nested_cross_validate(data, grid, plan, inner_folds, jobs);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    write_nested_csv(*out, rep, grid, d.data);
    if (!report_path.empty()) {
      Output js(report_path);
      write_nested_json(*js, rep, grid, d.data);
    }
  } else {
    const CvReport rep = cross_validate(data, grid, plan, jobs);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    write_cv_csv(*out, rep, d.data);
    if (!report_path.empty()) {
      Output js(report_path);
      write_cv_json(*js, rep, d.data);
    }
  }
  return 0;
}

int cmd_gap(const DataArgs& d, const HyperArgs& ha, bool timed, const std::string& out_path,
            const std::string& report_path) {
  const TrainConfig cfg = ha.config();
  cfg.hyperparams.validate();
  const BinaryDataset data = load_training_data(d);
  const GapReport g = relative_gap(data, cfg, timed ? std::optional<double>(ha.time_limit) : std::nullopt);
  Output out(out_path);
  write_gap_csv(*out, g, cfg, d.data);
  if (!report_path.empty()) {
    Output js(report_path);
    write_gap_json(*js, g, cfg, d.data);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-set learning by distorted greedy submodular optimization"};
  app.require_subcommand(1);

  DataArgs data_args;
  HyperArgs hyper;
  std::string out_path, model_path, report_path, grid_name = "single";
  std::size_t folds = 10, jobs = 1, inner_folds = 3;
  bool nested = false;

  auto* binarize_cmd = app.add_subcommand("binarize", "write the binarized feature table");
  add_data_options(binarize_cmd, data_args);
  binarize_cmd->add_option("--out", out_path, "output CSV (default stdout)");
  binarize_cmd->add_option("--model", model_path, "also write the feature descriptors as an empty model");

  auto* train_cmd = app.add_subcommand("train", "learn a rule set");
  add_data_options(train_cmd, data_args);
  add_hyper_options(train_cmd, hyper);
  train_cmd->add_option("--model", model_path, "model file to write");
  train_cmd->add_option("--report", report_path, "training report JSON");
  train_cmd->add_option("--out", report_path, "alias of --report");
  train_cmd->add_option("--jobs", jobs, "threads for the feature-scan kernels")->check(CLI::PositiveNumber);

  auto* predict_cmd = app.add_subcommand("predict", "apply a model to a table");
  add_data_options(predict_cmd, data_args);
  predict_cmd->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", out_path, "one 0/1 label per line (default stdout)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "stratified cross validation");
  add_data_options(evaluate_cmd, data_args);
  add_hyper_options(evaluate_cmd, hyper);
  evaluate_cmd->add_option("--folds", folds, "number of folds")->check(CLI::Range(2, 1000));
  evaluate_cmd->add_option("--jobs", jobs, "concurrent (config, fold) jobs")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--grid", grid_name, "single (flags as given) | standard")
      ->check(CLI::IsMember({"single", "standard"}));
  evaluate_cmd->add_flag("--nested", nested, "select the config per fold by inner cross validation");
  evaluate_cmd->add_option("--inner-folds", inner_folds, "inner folds for --nested")->check(CLI::Range(2, 100));
  evaluate_cmd->add_option("--out", out_path, "metrics CSV (default stdout)");
  evaluate_cmd->add_option("--report", report_path, "metrics JSON");

  bool timed = false;
  auto* gap_cmd = app.add_subcommand("gap", "relative gap between local search and branch and bound");
  add_data_options(gap_cmd, data_args);
  add_hyper_options(gap_cmd, hyper);
  gap_cmd->add_flag("--timed", timed, "use --time-limit-secs for branch and bound (default: exact)");
  gap_cmd->add_option("--out", out_path, "gap CSV (default stdout)");
  gap_cmd->add_option("--report", report_path, "gap JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (jobs > 1) kernels::set_thread_count(static_cast<int>(jobs));
    if (*binarize_cmd) return cmd_binarize(data_args, out_path, model_path);
    if (*train_cmd) return cmd_train(data_args, hyper, model_path, report_path);
    if (*predict_cmd) return cmd_predict(data_args, model_path, out_path);
    if (*evaluate_cmd)
      return cmd_evaluate(data_args, hyper, folds, jobs, grid_name, nested, inner_folds, out_path, report_path);
    if (*gap_cmd) return cmd_gap(data_args, hyper, timed, out_path, report_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
