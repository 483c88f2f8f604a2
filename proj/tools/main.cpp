// idx: train, predict, explain, evaluate and export on one command line.
// Exit codes: 0 success, 1 usage, 2 data/schema, 3 budget exceeded.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idx/attribution.hpp"
#include "idx/csv.hpp"
#include "idx/dataset.hpp"
#include "idx/errors.hpp"
#include "idx/evaluation.hpp"
#include "idx/explanation.hpp"
#include "idx/inference.hpp"
#include "idx/influence.hpp"
#include "idx/kits.hpp"
#include "idx/learning.hpp"
#include "idx/model_json.hpp"

namespace {

using namespace idx;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("cannot write '" + path + "'");
}

// Content to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_file(out_path, content);
  }
}

void print_notes(const std::vector<std::string>& notes) {
  for (const auto& n : notes) std::cerr << "note: " << n << "\n";
}

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Inline instance literal: "w=l,t=m,p=l".
Assignment parse_instance(const std::string& text) {
  Assignment a;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    piece = trimmed(piece);
    if (piece.empty()) continue;
    auto eq = piece.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == piece.size()) {
      throw UsageError("malformed instance literal '" + piece + "', expected name=value");
    }
    a.bind(trimmed(piece.substr(0, eq)), trimmed(piece.substr(eq + 1)));
  }
  if (a.empty()) throw UsageError("empty instance literal");
  return a;
}

// Binds the model's observation columns from one dataset row. Label columns
// in the data are ignored: explanation and evaluation condition on the input
// only.
Assignment row_instance(const Classifier& c, const Dataset& d, std::size_t row) {
  if (row >= d.row_count()) {
    throw UsageError("row " + std::to_string(row) + " out of range (data has " +
                     std::to_string(d.row_count()) + " rows)");
  }
  Assignment a;
  for (int v : c.observations()) {
    const auto& name = c.variable(v).name;
    a.bind(name, d.cell(row, d.column_index(name)));
  }
  return a;
}

std::vector<Assignment> all_instances(const Classifier& c, const Dataset& d) {
  std::vector<Assignment> out;
  out.reserve(d.row_count());
  for (std::size_t r = 0; r < d.row_count(); ++r) out.push_back(row_instance(c, d, r));
  return out;
}

std::vector<std::string> all_classifications(const Classifier& c) {
  std::vector<std::string> names;
  for (int v : c.classifications()) names.push_back(c.variable(v).name);
  return names;
}

std::string default_explanandum(const Classifier& c, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (c.classifications().size() == 1) return c.variable(c.classifications()[0]).name;
  throw UsageError("--explanandum is required: the model has " +
                   std::to_string(c.classifications().size()) + " classifications");
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// One aligned text table: rows of cells, first row is the header.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += "  ";
      out += row[i];
      if (i + 1 < row.size()) out.append(width[i] - row[i].size(), ' ');
    }
    out += "\n";
  }
  return out;
}

std::string csv_text(const csv::Table& t) {
  std::string out = csv::format_row(t.header) + "\n";
  for (const auto& row : t.rows) out += csv::format_row(row) + "\n";
  return out;
}

struct TrainArgs {
  std::string data, config, out;
};

void run_train(const TrainArgs& args) {
  TrainConfig cfg = load_train_config(args.config);
  Dataset d = Dataset::from_csv(args.data);
  discretize(d, cfg.bins);
  if (cfg.classes.empty()) throw UsageError("the training config names no classes");
  Classifier c = cfg.classes.size() == 1
                     ? fit_nbc(d, cfg.classes[0], cfg.hyper)
                     : fit_bcc(d, cfg.classes, cfg.hyper, cfg.structure, cfg.chain);
  for (const auto& w : c.warnings()) std::cerr << "warning: " << w << "\n";
  save_classifier(c, args.out);
}

struct PredictArgs {
  std::string model, data, out;
};

void run_predict(const PredictArgs& args) {
  Classifier c = load_classifier(args.model);
  Dataset d = Dataset::from_csv(args.data);

  csv::Table t;
  for (int v : c.observations()) t.header.push_back(c.variable(v).name);
  for (int v : c.classifications()) {
    t.header.push_back(c.variable(v).name);
    t.header.push_back("p(" + c.variable(v).name + ")");
  }
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    Assignment a = row_instance(c, d, r);
    detail::Chain chain(c, a);
    std::vector<std::string> row;
    for (int v : c.observations()) row.push_back(a.at(c.variable(v).name));
    for (int v : c.classifications()) {
      int decided = chain.value_of(v);
      row.push_back(c.variable(v).domain.value(decided));
      row.push_back(csv::format_double(chain.probability(v, decided)));
    }
    t.rows.push_back(std::move(row));
  }
  emit(args.out, csv_text(t));
}

struct ExplainArgs {
  std::string model, kit = "md", instance, data, explanandum, out, dot;
  std::string instance_id = "0";
  std::size_t row = 0;
  std::vector<std::string> outputs;
  std::uint64_t budget = kDefaultCfBudget;
  int attr_samples = 5000;
  std::uint64_t seed = 0;
};

void run_explain(const ExplainArgs& args) {
  Classifier c = load_classifier(args.model);
  if (args.instance.empty() == args.data.empty()) {
    throw UsageError("pass exactly one of --instance or --data");
  }

  Assignment a;
  KitOptions opts;
  opts.cf_budget = args.budget;
  opts.outputs = args.outputs.empty() ? all_classifications(c) : args.outputs;
  opts.surrogate.samples = args.attr_samples;
  opts.surrogate.seed = args.seed;
  if (!args.instance.empty()) {
    a = parse_instance(args.instance);
    std::string id = args.instance_id;
    opts.resolve_instance = [id](const Assignment&) { return id; };
  } else {
    Dataset d = Dataset::from_csv(args.data);
    a = row_instance(c, d, args.row);
    // Score files keyed by row index line up with --row.
    std::string id = std::to_string(args.row);
    opts.resolve_instance = [id](const Assignment&) { return id; };
  }

  ExplanationKit kit = make_kit(args.kit, c, opts);
  InfluenceGraph g = kit.graph_kind() == GraphKind::Full ? influences(c)
                                                         : io_influences(c, opts.outputs);
  Idx idx = generate(c, g, kit, default_explanandum(c, args.explanandum), a);
  print_notes(kit.diagnostics());
  emit(args.out, to_json(idx));
  if (!args.dot.empty()) write_file(args.dot, to_dot(idx));
}

struct EvaluateArgs {
  std::string model, data, report = "prevalence", kit = "md", kit_b = "sd";
  std::string instance, explanandum, out;
  std::size_t row = 0;
  std::vector<std::string> outputs;
  std::size_t sample = 25000;
  std::size_t trials = 100;
  std::uint64_t budget = kDefaultCfBudget;
  int attr_samples = 5000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

Classifier load_model_for_eval(const EvaluateArgs& args) {
  if (args.model.empty()) throw UsageError("--model is required for this report");
  return load_classifier(args.model);
}

std::vector<Assignment> load_eval_instances(const Classifier& c, const EvaluateArgs& args) {
  if (args.data.empty()) throw UsageError("--data is required for this report");
  return all_instances(c, Dataset::from_csv(args.data));
}

ExplanationKit build_eval_kit(const Classifier& c, const EvaluateArgs& args,
                              const std::string& name) {
  KitOptions opts;
  opts.cf_budget = args.budget;
  opts.outputs = args.outputs.empty() ? all_classifications(c) : args.outputs;
  opts.surrogate.samples = args.attr_samples;
  opts.surrogate.seed = args.seed;
  return make_kit(name, c, opts);
}

void run_evaluate(const EvaluateArgs& args) {
  csv::Table t;
  std::vector<std::vector<std::string>> pretty;

  if (args.report == "prevalence") {
    Classifier c = load_model_for_eval(args);
    ExplanationKit kit = build_eval_kit(c, args, args.kit);
    PrevalenceReport r = prevalence(c, kit, load_eval_instances(c, args), args.jobs);
    print_notes(kit.diagnostics());
    std::cout << "kit " << r.kit << ": " << r.instance_count << " instances, "
              << r.influence_count << " influences\n";
    t.header = {"kit", "label", "pct", "class_pct"};
    pretty.push_back({"relation", "pct", "class_pct"});
    for (const auto& row : r.rows) {
      t.rows.push_back({r.kit, row.label, csv::format_double(row.pct),
                        csv::format_double(row.class_pct)});
      pretty.push_back({row.label, fixed2(row.pct), fixed2(row.class_pct)});
    }
  } else if (args.report == "agreement") {
    Classifier c = load_model_for_eval(args);
    ExplanationKit kit_a = build_eval_kit(c, args, args.kit);
    ExplanationKit kit_b = build_eval_kit(c, args, args.kit_b);
    std::vector<std::string> outputs =
        args.outputs.empty() ? all_classifications(c) : args.outputs;
    AgreementReport r =
        agreement(c, kit_a, kit_b, outputs, load_eval_instances(c, args), args.jobs);
    print_notes(kit_a.diagnostics());
    print_notes(kit_b.diagnostics());
    t.header = {"kit_a", "kit_b", "edges", "pct"};
    t.rows.push_back({r.kit_a, r.kit_b, std::to_string(r.edge_count),
                      csv::format_double(r.pct)});
    pretty.push_back({"kit_a", "kit_b", "instances", "edges", "pct"});
    pretty.push_back({r.kit_a, r.kit_b, std::to_string(r.instance_count),
                      std::to_string(r.edge_count), fixed2(r.pct)});
  } else if (args.report == "monotonicity") {
    Classifier c = load_model_for_eval(args);
    ExplanationKit kit = build_eval_kit(c, args, args.kit);
    MonotonicityReport r = monotonicity_violations(c, kit, load_eval_instances(c, args),
                                                   args.sample, args.seed, args.jobs);
    print_notes(kit.diagnostics());
    t.header = {"kit", "population", "sampled", "violations", "rate"};
    t.rows.push_back({r.kit, std::to_string(r.population), std::to_string(r.sampled),
                      std::to_string(r.violations), csv::format_double(r.rate)});
    pretty.push_back({"kit", "population", "sampled", "violations", "rate"});
    pretty.push_back({r.kit, std::to_string(r.population), std::to_string(r.sampled),
                      std::to_string(r.violations), fixed4(r.rate)});
  } else if (args.report == "complexity") {
    Classifier c = load_model_for_eval(args);
    Assignment a;
    if (!args.instance.empty()) {
      a = parse_instance(args.instance);
    } else if (!args.data.empty()) {
      a = row_instance(c, Dataset::from_csv(args.data), args.row);
    } else {
      throw UsageError("pass --instance or --data for the complexity report");
    }
    ComplexityReport r = complexity_probe(c, args.kit, default_explanandum(c, args.explanandum),
                                          a, args.budget);
    t.header = {"kit", "measured", "linear_cost", "enumeration_size"};
    t.rows.push_back({r.kit, std::to_string(r.measured), std::to_string(r.linear_cost),
                      std::to_string(r.enumeration_size)});
    pretty.push_back({"kit", "measured", "linear_cost", "enumeration_size"});
    pretty.push_back({r.kit, std::to_string(r.measured), std::to_string(r.linear_cost),
                      std::to_string(r.enumeration_size)});
  } else if (args.report == "props") {
    PropositionReport r = check_propositions(args.seed, args.trials);
    t.header = {"metric", "value"};
    t.rows.push_back({"trials", std::to_string(r.trials)});
    t.rows.push_back({"counterexamples", std::to_string(r.counterexamples.size())});
    for (const auto& cx : r.counterexamples) t.rows.push_back({"counterexample", cx});
    pretty.push_back({"trials", std::to_string(r.trials)});
    pretty.push_back({"counterexamples", std::to_string(r.counterexamples.size())});
    for (const auto& cx : r.counterexamples) pretty.push_back({"counterexample", cx});
  } else {
    throw UsageError("unknown report '" + args.report + "'");
  }

  std::cout << render_table(pretty);
  if (!args.out.empty()) write_file(args.out, csv_text(t));
}

struct ExportArgs {
  std::string in, out;
};

void run_export(const ExportArgs& args) {
  Idx idx = idx_from_json(read_file(args.in));
  emit(args.out, to_dot(idx));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"influence-driven explanations for discrete Bayesian network classifiers"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "fit a classifier from a CSV and a JSON config");
  train->add_option("--data", train_args.data, "training data CSV")->required();
  train->add_option("--config", train_args.config, "training config JSON")->required();
  train->add_option("--out", train_args.out, "output model JSON")->required();
  train->callback([&] { run_train(train_args); });

  PredictArgs predict_args;
  auto* predict =
      app.add_subcommand("predict", "decide every classification for each data row");
  predict->add_option("--model", predict_args.model, "model JSON")->required();
  predict->add_option("--data", predict_args.data, "instances CSV")->required();
  predict->add_option("--out", predict_args.out, "output CSV (stdout when omitted)");
  predict->callback([&] { run_predict(predict_args); });

  ExplainArgs explain_args;
  auto* explain = app.add_subcommand("explain", "generate an explanation for one input");
  explain->add_option("--model", explain_args.model, "model JSON")->required();
  explain->add_option("--kit", explain_args.kit,
                      "explanation kit: md, sd, cf, lime, shap or file:<scores>")
      ->capture_default_str();
  explain->add_option("--instance", explain_args.instance, "inline input, e.g. w=l,t=m,p=l");
  explain->add_option("--data", explain_args.data, "instances CSV (see --row)");
  explain->add_option("--row", explain_args.row, "0-based row of --data")
      ->capture_default_str();
  explain->add_option("--instance-id", explain_args.instance_id,
                      "score-file instance id for --instance inputs")
      ->capture_default_str();
  explain->add_option("--explanandum", explain_args.explanandum,
                      "classification to explain (default: the only one)");
  explain->add_option("--outputs", explain_args.outputs,
                      "output classifications for attribution kits (default: all)")
      ->delimiter(',');
  explain->add_option("--budget", explain_args.budget, "counterfactual combination budget")
      ->capture_default_str();
  explain->add_option("--attr-samples", explain_args.attr_samples,
                      "surrogate sample count")
      ->capture_default_str();
  explain->add_option("--seed", explain_args.seed, "master random seed")
      ->capture_default_str();
  explain->add_option("--out", explain_args.out, "output JSON (stdout when omitted)");
  explain->add_option("--dot", explain_args.dot, "also render Graphviz DOT to this path");
  explain->callback([&] { run_explain(explain_args); });

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "prevalence, agreement, monotonicity, "
                                                  "complexity and proposition reports");
  evaluate->add_option("--report", eval_args.report,
                       "prevalence | agreement | monotonicity | complexity | props")
      ->capture_default_str();
  evaluate->add_option("--model", eval_args.model, "model JSON");
  evaluate->add_option("--data", eval_args.data, "instances CSV");
  evaluate->add_option("--kit", eval_args.kit, "kit under evaluation")->capture_default_str();
  evaluate->add_option("--kit-b", eval_args.kit_b, "second kit for agreement")
      ->capture_default_str();
  evaluate->add_option("--outputs", eval_args.outputs,
                       "output classifications (default: all)")
      ->delimiter(',');
  evaluate->add_option("--instance", eval_args.instance, "inline input for complexity");
  evaluate->add_option("--row", eval_args.row, "0-based row of --data for complexity")
      ->capture_default_str();
  evaluate->add_option("--explanandum", eval_args.explanandum,
                       "explanandum for complexity (default: the only classification)");
  evaluate->add_option("--sample", eval_args.sample, "monotonicity sample size")
      ->capture_default_str();
  evaluate->add_option("--trials", eval_args.trials, "proposition sweep trials")
      ->capture_default_str();
  evaluate->add_option("--budget", eval_args.budget, "counterfactual combination budget")
      ->capture_default_str();
  evaluate->add_option("--attr-samples", eval_args.attr_samples, "surrogate sample count")
      ->capture_default_str();
  evaluate->add_option("--seed", eval_args.seed, "master random seed")->capture_default_str();
  evaluate->add_option("--jobs", eval_args.jobs, "worker threads over instances")
      ->capture_default_str();
  evaluate->add_option("--out", eval_args.out, "also write the report CSV to this path");
  evaluate->callback([&] { run_evaluate(eval_args); });

  ExportArgs export_args;
  auto* exp = app.add_subcommand("export", "re-render a stored explanation as Graphviz DOT");
  exp->add_option("--in", export_args.in, "explanation JSON")->required();
  exp->add_option("--out", export_args.out, "output DOT (stdout when omitted)");
  exp->callback([&] { run_export(export_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const idx::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Usage: return 1;
      case ErrorKind::Data: return 2;
      case ErrorKind::Budget: return 3;
      case ErrorKind::Internal: return 1;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
