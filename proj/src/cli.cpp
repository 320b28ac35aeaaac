#include "qpplab/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpplab/corpus_io.hpp"
#include "qpplab/effectiveness.hpp"
#include "qpplab/error.hpp"
#include "qpplab/learners.hpp"
#include "qpplab/numeric_format.hpp"
#include "qpplab/qpp_letor.hpp"
#include "qpplab/qpp_sota.hpp"
#include "qpplab/reporting.hpp"
#include "qpplab/selective.hpp"
#include "qpplab/statlab.hpp"
#include "qpplab/synth.hpp"

namespace qpplab::cli {

namespace {

struct Common {
  std::string format = "tsv";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string config;
};

struct Context {
  std::string subcommand;
  std::string flags;
  Common common;
  std::ostream* out = nullptr;

  unsigned threads() const {
    if (common.threads > 0) return common.threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
  ReportFormat format() const { return parse_report_format(common.format); }
  bool markdown() const { return format() == ReportFormat::Markdown; }
};

// Header recording what produced a file; --threads, --out and --config are
// left out because they never change the content.
void write_header(std::ostream& os, const Context& ctx, bool markdown) {
  const std::string lines[] = {
      std::string("qpplab ") + kVersion + " " + ctx.subcommand,
      "flags: " + ctx.flags,
      "seed: " + std::to_string(ctx.common.seed),
  };
  for (const auto& l : lines) {
    if (markdown)
      os << "<!-- " << l << " -->\n";
    else
      os << "# " << l << '\n';
  }
  if (markdown) os << '\n';
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string flag_summary(const CLI::App& sub) {
  static const std::set<std::string> skipped{"help", "threads", "out", "config"};
  std::vector<std::string> positional;
  std::map<std::string, std::string> named;
  for (const CLI::Option* opt : sub.get_options()) {
    std::string value;
    for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    if (opt->count() == 0) value = opt->get_default_str();
    if (!opt->nonpositional()) {
      if (!value.empty()) positional.push_back(value);
      continue;
    }
    const std::string name = opt->get_lnames().front();
    if (skipped.contains(name) || value.empty()) continue;
    named["--" + name] = value;
  }
  std::string text;
  for (const auto& p : positional) text += (text.empty() ? "" : " ") + p;
  for (const auto& [k, v] : named) text += (text.empty() ? "" : " ") + k + "=" + v;
  return text;
}

// Flags from a key=value file are appended unless already on the command
// line, so explicit flags win.
std::vector<std::string> with_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, line_no, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (key.starts_with('-')) key.erase(0, 1);
    if (key.empty()) throw ParseError(path, line_no, "empty key");
    if (key == "config") throw ParseError(path, line_no, "config files cannot include other config files");
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.starts_with(flag + "=");
    });
    if (!given) extra.push_back(flag + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

CLI::Option* list_option(CLI::App* sub, const std::string& name, std::vector<std::string>& target,
                         const std::string& help) {
  return sub->add_option(name, target, help)->delimiter(',')->allow_extra_args(false);
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "tsv or markdown")
      ->check(CLI::IsMember({"tsv", "markdown"}))
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for every random draw")->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads, 0 for all cores (results do not depend on it)")
      ->capture_default_str();
  sub->add_option("--out", c.out, "output file (output directory for synth)");
  sub->add_option("--config", c.config, "key=value file with default flags");
}

std::map<QueryId, double> restrict(const std::map<QueryId, double>& values, const std::vector<QueryId>& queries) {
  std::map<QueryId, double> out;
  for (const auto& q : queries) out.emplace(q, values.at(q));
  return out;
}

std::set<QueryId> keys_of(const std::map<QueryId, double>& values) {
  std::set<QueryId> out;
  for (const auto& [q, _] : values) out.insert(q);
  return out;
}

// ---------------------------------------------------------------------------

struct EvalOpts {
  std::string run, qrels;
  std::vector<std::string> measures;
};

void cmd_eval(const Context& ctx, const EvalOpts& o) {
  const RunSet run = load_run(o.run);
  const QrelsSet qrels = load_qrels(o.qrels);
  std::vector<Measure> measures;
  for (const auto& m : o.measures) measures.push_back(Measure::parse(m));
  if (measures.empty()) measures = default_measures();
  const EvalTable table = evaluate_run(run, qrels, measures, ctx.threads());

  Sink sink(ctx.common.out, *ctx.out);
  write_header(*sink, ctx, ctx.markdown());
  if (!ctx.markdown()) {
    write_eval_table(*sink, table);
    return;
  }
  *sink << "| qid |";
  for (const auto& m : table.measures) *sink << ' ' << m << " |";
  *sink << "\n|---|";
  for (std::size_t i = 0; i < table.measures.size(); ++i) *sink << "---:|";
  *sink << '\n';
  for (const auto& [q, row] : table.rows) {
    *sink << "| " << q << " |";
    for (double v : row) *sink << ' ' << format_fixed(v, 4) << " |";
    *sink << '\n';
  }
  *sink << "| MEAN |";
  for (double v : table.means()) *sink << ' ' << format_fixed(v, 4) << " |";
  *sink << '\n';
}

struct PredictOpts {
  std::vector<std::string> modes;
  std::string run, corpus_scores, term_stats, feedback, letor;
  std::vector<std::string> letor_features, ingest;
  std::string aggregator = "mean";
  std::string wig_variant = "mean-difference";
  int letor_k = 100;
  PredictorConfig config;
};

void cmd_predict(const Context& ctx, const PredictOpts& o) {
  bool sota = false, letor = false;
  for (const auto& m : o.modes) {
    if (m == "sota")
      sota = true;
    else if (m == "letor")
      letor = true;
    else
      throw Error(ErrorKind::Config, "unknown predictor family '" + m + "' (expected sota or letor)");
  }
  if (!sota && !letor && o.ingest.empty())
    throw Error(ErrorKind::Config, "nothing to compute: give sota, letor or --ingest");

  const RunSet run = load_run(o.run);
  std::vector<QuerySource> sources{{o.run, run.query_ids()}};
  std::vector<FeatureTable> tables;
  QueryTermStats term_stats;
  if (sota || letor) {
    if (o.term_stats.empty()) throw Error(ErrorKind::Config, "--term-stats is required for sota and letor");
    term_stats = load_query_term_stats(o.term_stats);
  }
  if (sota) {
    if (o.corpus_scores.empty()) throw Error(ErrorKind::Config, "--corpus-scores is required for sota");
    PredictorConfig config = o.config;
    config.wig_variant = o.wig_variant == "classic" ? WigVariant::Classic : WigVariant::MeanDifference;
    config.validate();
    const CorpusScoreTable corpus = load_corpus_scores(o.corpus_scores);
    std::optional<RunSet> feedback;
    if (!o.feedback.empty()) feedback = load_run(o.feedback);
    tables.push_back(compute_sota(run, config, corpus, term_stats, feedback ? &*feedback : nullptr, ctx.threads()));
  }
  if (letor) {
    if (o.letor.empty()) throw Error(ErrorKind::Config, "--letor is required for letor");
    const LetorSidecar sidecar = load_letor_sidecar(o.letor);
    std::vector<std::string> names = o.letor_features;
    if (names.empty())
      for (const auto& f : sidecar.features) names.push_back(f.name);
    std::vector<LetorScores> scores;
    for (const auto& name : names) scores.push_back(align_letor(run, sidecar.feature(name), o.letor_k));
    tables.push_back(compute_letor(run, scores, term_stats, parse_aggregator(o.aggregator), o.letor_k));
  }
  for (const auto& path : o.ingest) {
    tables.push_back(load_feature_table(path));
    sources.push_back({path, tables.back().query_ids()});
  }
  const auto queries = align_queries(sources);
  const FeatureTable merged = FeatureTable::merge(tables, queries);

  Sink sink(ctx.common.out, *ctx.out);
  write_header(*sink, ctx, false);
  write_feature_table(*sink, merged);
}

struct CorrelateOpts {
  std::string features, eval, coefficient = "pearson", ranker, collection;
};

void cmd_correlate(const Context& ctx, const CorrelateOpts& o) {
  const FeatureTable features = load_feature_table(o.features);
  const EvalTable evals = load_eval_table(o.eval);
  const CorrelationReport report =
      correlation_table(features, evals, parse_coefficient(o.coefficient), o.ranker, o.collection, ctx.threads());
  Sink sink(ctx.common.out, *ctx.out);
  write_header(*sink, ctx, ctx.markdown());
  if (ctx.markdown())
    write_report_markdown(*sink, report);
  else
    write_report_tsv(*sink, report);
}

struct RegressOpts {
  std::string features, eval, aggregation = "mean", predictions;
  std::vector<std::string> measures, learners, columns;
  ForestParams forest;
};

void cmd_regress(const Context& ctx, const RegressOpts& o) {
  const FeatureTable features = load_feature_table(o.features);
  const EvalTable evals = load_eval_table(o.eval);
  const auto aggregation = o.aggregation == "pooled" ? FoldAggregation::Pooled : FoldAggregation::MeanOfFolds;
  const std::vector<std::string> measures = o.measures.empty() ? std::vector<std::string>{"NDCG"} : o.measures;
  const std::vector<std::string> learners = o.learners.empty() ? std::vector<std::string>{"linear"} : o.learners;

  struct Row {
    std::string learner, measure;
    CvResult cv;
  };
  std::vector<Row> rows;
  for (const auto& m : measures) {
    const auto target = evals.column(m);
    for (const auto& l : learners) {
      LearnerSpec spec;
      spec.kind = LearnerSpec::parse_kind(l);
      spec.forest = o.forest;
      spec.threads = ctx.threads();
      if (spec.kind == LearnerSpec::Kind::Single) {
        // One row per feature, as in a per-predictor table.
        for (const auto& c : o.columns.empty() ? features.columns() : o.columns) {
          spec.columns = {c};
          rows.push_back({c, m, cross_validate(features, target, spec, ctx.common.seed, aggregation)});
        }
      } else {
        spec.columns = o.columns;
        rows.push_back({spec.name(), m, cross_validate(features, target, spec, ctx.common.seed, aggregation)});
      }
    }
  }

  Sink sink(ctx.common.out, *ctx.out);
  write_header(*sink, ctx, ctx.markdown());
  auto r2 = [](const ErrorReport& e, bool exact) {
    if (!e.r_squared) return std::string("n/a");
    return exact ? format_exact(*e.r_squared) : format_fixed(*e.r_squared);
  };
  if (!ctx.markdown()) {
    *sink << "learner\tmeasure\tn\tpearson\tpearson_p\tpearson_marker\tkendall\tkendall_p\tkendall_marker"
             "\tMAE\tRMSE\tMedAE\tR2\n";
    for (const auto& r : rows) {
      const auto& cv = r.cv;
      *sink << r.learner << '\t' << r.measure << '\t' << cv.queries.size() << '\t'
            << format_exact(cv.pearson.coefficient) << '\t' << format_exact(cv.pearson.p_value) << '\t'
            << marker_name(cv.pearson.marker) << '\t' << format_exact(cv.kendall.coefficient) << '\t'
            << format_exact(cv.kendall.p_value) << '\t' << marker_name(cv.kendall.marker) << '\t'
            << format_exact(cv.errors.mae) << '\t' << format_exact(cv.errors.rmse) << '\t'
            << format_exact(cv.errors.medae) << '\t' << r2(cv.errors, true) << '\n';
    }
  } else {
    *sink << "| Learner | Measure | r | τ | MAE | RMSE | MedAE | R² |\n";
    *sink << "|---|---|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& r : rows) {
      const auto& cv = r.cv;
      *sink << "| " << r.learner << " | " << r.measure << " | " << format_fixed(cv.pearson.coefficient)
            << marker_symbol(cv.pearson.marker) << " | " << format_fixed(cv.kendall.coefficient)
            << marker_symbol(cv.kendall.marker) << " | " << format_fixed(cv.errors.mae) << " | "
            << format_fixed(cv.errors.rmse) << " | " << format_fixed(cv.errors.medae) << " | " << r2(cv.errors, false)
            << " |\n";
    }
  }

  if (!o.predictions.empty()) {
    Sink pred(o.predictions, *ctx.out);
    write_header(*pred, ctx, false);
    *pred << "qid\tlearner\tmeasure\tfold\tpredicted\tactual\n";
    for (const auto& r : rows) {
      const auto target = evals.column(r.measure);
      for (const auto& q : r.cv.queries)
        *pred << q << '\t' << r.learner << '\t' << r.measure << '\t' << (r.cv.split.fold_a.contains(q) ? "A" : "B")
              << '\t' << format_exact(r.cv.out_of_fold.at(q)) << '\t' << format_exact(target.at(q)) << '\n';
    }
  }
}

struct AnovaOpts {
  std::vector<std::string> inputs;
  std::string by, value = "coefficient", factor;
};

void cmd_anova(const Context& ctx, const AnovaOpts& o) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& path : o.inputs) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    for (auto& [label, values] : read_grouped_values(in, o.by, o.value, path))
      groups[label].insert(groups[label].end(), values.begin(), values.end());
  }
  const AnovaTable table = anova_one_way(groups, o.factor.empty() ? o.by : o.factor);
  Sink sink(ctx.common.out, *ctx.out);
  write_header(*sink, ctx, ctx.markdown());
  write_anova(*sink, table, ctx.format());
}

struct SelectOpts {
  std::string eval1, eval2, measure = "NDCG", features, threshold_column, r1_column, r2_column, learner;
  std::string sweep, choices;
  std::vector<std::string> columns;
  double step = 0.01;
  ForestParams forest;
};

void cmd_select(const Context& ctx, const SelectOpts& o) {
  const auto all1 = load_eval_table(o.eval1).column(o.measure);
  const auto all2 = load_eval_table(o.eval2).column(o.measure);
  std::vector<QuerySource> sources{{o.eval1, keys_of(all1)}, {o.eval2, keys_of(all2)}};
  const bool need_features = !o.threshold_column.empty() || !o.r1_column.empty() || !o.r2_column.empty() ||
                             !o.learner.empty();
  FeatureTable features;
  if (need_features) {
    if (o.features.empty()) throw Error(ErrorKind::Config, "--features is required by the requested policies");
    features = load_feature_table(o.features);
    sources.push_back({o.features, features.query_ids()});
  }
  const auto queries = align_queries(sources);
  const auto e1 = restrict(all1, queries);
  const auto e2 = restrict(all2, queries);
  if (need_features) features = features.restricted_to(queries);

  std::vector<RouteResult> policies;
  if (!o.threshold_column.empty()) {
    const auto predicted = features.column(o.threshold_column);
    const ThresholdSweep sweep = threshold_sweep(predicted, e1, e2, o.step, ctx.threads());
    const double t = sweep.points[sweep.best].threshold;
    policies.push_back(evaluate_policy(route_threshold(predicted, t), e1, e2, "threshold:" + o.threshold_column));
    if (!o.sweep.empty()) {
      Sink sink(o.sweep, *ctx.out);
      write_header(*sink, ctx, false);
      write_sweep(*sink, sweep);
    }
  }
  if (!o.r1_column.empty() || !o.r2_column.empty()) {
    if (o.r1_column.empty() || o.r2_column.empty())
      throw Error(ErrorKind::Config, "pairwise routing needs both --r1-column and --r2-column");
    const auto choices = route_pairwise(features.column(o.r1_column), features.column(o.r2_column));
    policies.push_back(evaluate_policy(choices, e1, e2, "pairwise"));
  }
  if (!o.learner.empty()) {
    LearnerSpec spec;
    spec.kind = LearnerSpec::parse_kind(o.learner);
    spec.columns = o.columns;
    spec.forest = o.forest;
    spec.threads = ctx.threads();
    const auto choices = route_learned_cv(features, e1, e2, spec, ctx.common.seed);
    policies.push_back(evaluate_policy(choices, e1, e2, "learned:" + spec.name()));
  }
  const RouteResult oracle = oracle_route(e1, e2);
  const std::vector<RouteResult> summary = policies.empty() ? std::vector<RouteResult>{oracle} : policies;

  Sink sink(ctx.common.out, *ctx.out);
  write_header(*sink, ctx, ctx.markdown());
  write_route_summary(*sink, summary, ctx.format());
  if (!o.choices.empty()) {
    policies.push_back(oracle);
    Sink choices(o.choices, *ctx.out);
    write_header(*choices, ctx, false);
    write_route_choices(*choices, policies);
  }
}

struct ReportOpts {
  std::string kind;
  std::vector<std::string> inputs;
  std::string by = "ranker", value = "coefficient";
  std::string features, eval, column, measure = "NDCG", coefficient = "pearson";
};

void cmd_report(const Context& ctx, const ReportOpts& o) {
  auto need = [](const std::string& v, const char* flag, const std::string& kind) {
    if (v.empty()) throw Error(ErrorKind::Config, std::string(flag) + " is required for report " + kind);
  };
  std::ostringstream body;
  bool markdown = ctx.markdown();
  if (o.kind == "table") {
    if (o.inputs.empty()) throw Error(ErrorKind::Config, "--input is required for report table");
    std::vector<CorrelationReport> reports;
    for (const auto& path : o.inputs) {
      std::ifstream in(path);
      if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
      reports.push_back(parse_report_tsv(in, path));
    }
    const auto combined = combine_reports(reports);
    if (markdown)
      write_report_markdown(body, combined);
    else
      write_report_tsv(body, combined);
  } else if (o.kind == "boxplot") {
    if (o.inputs.empty()) throw Error(ErrorKind::Config, "--input is required for report boxplot");
    std::map<std::string, std::vector<double>> groups;
    for (const auto& path : o.inputs) {
      std::ifstream in(path);
      if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
      for (auto& [label, values] : read_grouped_values(in, o.by, o.value, path))
        groups[label].insert(groups[label].end(), values.begin(), values.end());
    }
    write_boxplot(body, boxplot_groups(groups), ctx.format());
  } else if (o.kind == "scatter") {
    need(o.features, "--features", o.kind);
    need(o.eval, "--eval", o.kind);
    need(o.column, "--column", o.kind);
    const auto predicted = load_feature_table(o.features).column(o.column);
    const auto actual = load_eval_table(o.eval).column(o.measure);
    body << scatter_export(predicted, actual, o.column, o.measure);
    markdown = false;
  } else if (o.kind == "matrix") {
    need(o.features, "--features", o.kind);
    need(o.eval, "--eval", o.kind);
    const auto matrix = correlation_matrix(load_feature_table(o.features), load_eval_table(o.eval),
                                           parse_coefficient(o.coefficient), ctx.threads());
    write_matrix(body, matrix, ctx.format());
  } else {
    throw Error(ErrorKind::Config, "unknown report '" + o.kind + "' (expected table, boxplot, scatter or matrix)");
  }
  Sink sink(ctx.common.out, *ctx.out);
  write_header(*sink, ctx, markdown);
  *sink << body.str();
}

struct SynthOpts {
  int queries = 50;
  int docs = 100;
  double informativeness = 0.5;
};

void cmd_synth(const Context& ctx, const SynthOpts& o) {
  if (ctx.common.out.empty()) throw Error(ErrorKind::Config, "synth needs --out DIR");
  SynthParams params;
  params.seed = ctx.common.seed;
  params.n_queries = o.queries;
  params.n_docs = o.docs;
  params.informativeness = o.informativeness;
  const SynthCollection c = synthesize(params);

  const std::filesystem::path dir(ctx.common.out);
  std::filesystem::create_directories(dir);
  auto emit = [&](const std::string& name, auto&& writer) {
    const std::string path = (dir / name).string();
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    write_header(file, ctx, false);
    writer(file);
  };
  emit("sys1.run", [&](std::ostream& os) { write_run(os, c.run1); });
  emit("sys2.run", [&](std::ostream& os) { write_run(os, c.run2); });
  emit("feedback.run", [&](std::ostream& os) { write_run(os, c.feedback); });
  emit("qrels.txt", [&](std::ostream& os) { write_qrels(os, c.qrels); });
  emit("corpus_scores.tsv", [&](std::ostream& os) { write_corpus_scores(os, c.corpus_scores); });
  emit("term_stats.tsv", [&](std::ostream& os) { write_query_term_stats(os, c.term_stats); });
  emit("letor.tsv", [&](std::ostream& os) { write_letor_sidecar(os, c.letor); });
  emit("predictors.tsv", [&](std::ostream& os) { write_feature_table(os, c.predictors); });

  // JSON has no comments, so the header becomes a field.
  auto manifest = nlohmann::json::parse(synth_manifest(c));
  manifest["generated_by"] = {{"tool", std::string("qpplab ") + kVersion},
                              {"subcommand", ctx.subcommand},
                              {"flags", ctx.flags},
                              {"seed", ctx.common.seed}};
  std::ofstream file(dir / "manifest.json", std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot write manifest.json");
  file << manifest.dump(2) << '\n';
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Duplicate: return kParse;
    case ErrorKind::Alignment: return kAlignment;
    case ErrorKind::Merge: return kMerge;
    default: return kUsage;
  }
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query performance prediction lab", "qpplab"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string("qpplab ") + kVersion);
  Common common;

  auto* eval = app.add_subcommand("eval", "per-query effectiveness of a run");
  EvalOpts eval_o;
  eval->add_option("--run", eval_o.run, "TREC run file")->required();
  eval->add_option("--qrels", eval_o.qrels, "TREC qrels file")->required();
  list_option(eval, "--measures", eval_o.measures, "NDCG, NDCG@k, MAP, P@k, MRR@k (default NDCG,MAP,P@10,MRR@10)");
  add_common(eval, common);

  auto* predict = app.add_subcommand("predict", "query performance predictors");
  PredictOpts pred_o;
  predict->add_option("modes", pred_o.modes, "predictor families: sota, letor");
  predict->add_option("--run", pred_o.run, "TREC run file")->required();
  predict->add_option("--corpus-scores", pred_o.corpus_scores, "query-vs-corpus score table");
  predict->add_option("--term-stats", pred_o.term_stats, "per-query term frequencies");
  predict->add_option("--feedback", pred_o.feedback, "run of the expanded queries (adds QF)");
  predict->add_option("--letor", pred_o.letor, "per-document LETOR scores");
  list_option(predict, "--letor-features", pred_o.letor_features, "LETOR features to summarize (default: all)");
  predict->add_option("--aggregator", pred_o.aggregator, "min, max, mean, q1, median, q3, std, var, sum")
      ->capture_default_str();
  predict->add_option("--letor-k", pred_o.letor_k, "documents summarized per query")->capture_default_str();
  predict->add_option("--k-nqc", pred_o.config.k_nqc, "NQC depth")->capture_default_str();
  predict->add_option("--k-uqc", pred_o.config.k_uqc, "UQC depth")->capture_default_str();
  predict->add_option("--k-wig", pred_o.config.k_wig, "WIG depth")->capture_default_str();
  predict->add_option("--qf-depth", pred_o.config.qf_depth, "QF overlap depth")->capture_default_str();
  predict->add_option("--wig-variant", pred_o.wig_variant, "mean-difference or classic")
      ->check(CLI::IsMember({"mean-difference", "classic"}))
      ->capture_default_str();
  list_option(predict, "--ingest", pred_o.ingest, "precomputed feature table to merge (repeatable)");
  add_common(predict, common);

  auto* correlate = app.add_subcommand("correlate", "predictor vs effectiveness correlations");
  CorrelateOpts corr_o;
  correlate->add_option("--features", corr_o.features, "feature table")->required();
  correlate->add_option("--eval", corr_o.eval, "evaluation table")->required();
  correlate->add_option("--coefficient", corr_o.coefficient, "pearson or kendall")
      ->check(CLI::IsMember({"pearson", "kendall"}))
      ->capture_default_str();
  correlate->add_option("--ranker", corr_o.ranker, "ranker label for the column group");
  correlate->add_option("--collection", corr_o.collection, "collection label for the column group");
  add_common(correlate, common);

  auto* regress = app.add_subcommand("regress", "two-fold cross-validated performance regression");
  RegressOpts reg_o;
  regress->add_option("--features", reg_o.features, "feature table")->required();
  regress->add_option("--eval", reg_o.eval, "evaluation table")->required();
  list_option(regress, "--measure", reg_o.measures, "target measures (default NDCG)");
  list_option(regress, "--learner", reg_o.learners, "linear, forest or single (default linear)");
  list_option(regress, "--columns", reg_o.columns, "feature columns (default: all)");
  regress->add_option("--trees", reg_o.forest.n_trees, "forest size")->capture_default_str();
  regress->add_option("--depth", reg_o.forest.max_depth, "maximum tree depth")->capture_default_str();
  regress->add_option("--min-leaf", reg_o.forest.min_leaf, "minimum leaf size")->capture_default_str();
  regress->add_option("--aggregation", reg_o.aggregation, "mean (of fold coefficients) or pooled")
      ->check(CLI::IsMember({"mean", "pooled"}))
      ->capture_default_str();
  regress->add_option("--predictions", reg_o.predictions, "also write out-of-fold predictions here");
  add_common(regress, common);

  auto* anova = app.add_subcommand("anova", "one-way ANOVA over grouped values");
  AnovaOpts anova_o;
  list_option(anova, "--input", anova_o.inputs, "headed TSV (repeatable)")->required();
  anova->add_option("--by", anova_o.by, "grouping column")->required();
  anova->add_option("--value", anova_o.value, "value column")->capture_default_str();
  anova->add_option("--factor", anova_o.factor, "factor name in the table (default: --by)");
  add_common(anova, common);

  auto* select = app.add_subcommand("select", "selective routing between two rankers");
  SelectOpts sel_o;
  select->add_option("--eval1", sel_o.eval1, "evaluation table of ranker R1")->required();
  select->add_option("--eval2", sel_o.eval2, "evaluation table of ranker R2")->required();
  select->add_option("--measure", sel_o.measure, "measure to route on")->capture_default_str();
  select->add_option("--features", sel_o.features, "feature table");
  select->add_option("--threshold-column", sel_o.threshold_column, "predictor for the threshold policy");
  select->add_option("--r1-column", sel_o.r1_column, "predictor of R1 for the pairwise policy");
  select->add_option("--r2-column", sel_o.r2_column, "predictor of R2 for the pairwise policy");
  select->add_option("--learner", sel_o.learner, "learner for the learned policy (linear or forest)");
  list_option(select, "--columns", sel_o.columns, "feature columns for the learned policy (default: all)");
  select->add_option("--step", sel_o.step, "threshold grid step")->capture_default_str();
  select->add_option("--trees", sel_o.forest.n_trees, "forest size")->capture_default_str();
  select->add_option("--depth", sel_o.forest.max_depth, "maximum tree depth")->capture_default_str();
  select->add_option("--min-leaf", sel_o.forest.min_leaf, "minimum leaf size")->capture_default_str();
  select->add_option("--sweep", sel_o.sweep, "also write the threshold sweep here");
  select->add_option("--choices", sel_o.choices, "also write per-query choices here");
  add_common(select, common);

  auto* report = app.add_subcommand("report", "tables and plot data");
  ReportOpts rep_o;
  report->add_option("kind", rep_o.kind, "table, boxplot, scatter or matrix")->required();
  list_option(report, "--input", rep_o.inputs, "input TSV (repeatable)");
  report->add_option("--by", rep_o.by, "grouping column for boxplot")->capture_default_str();
  report->add_option("--value", rep_o.value, "value column for boxplot")->capture_default_str();
  report->add_option("--features", rep_o.features, "feature table");
  report->add_option("--eval", rep_o.eval, "evaluation table");
  report->add_option("--column", rep_o.column, "feature column for scatter");
  report->add_option("--measure", rep_o.measure, "measure for scatter")->capture_default_str();
  report->add_option("--coefficient", rep_o.coefficient, "pearson or kendall (matrix)")
      ->check(CLI::IsMember({"pearson", "kendall"}))
      ->capture_default_str();
  add_common(report, common);

  auto* synth = app.add_subcommand("synth", "synthetic two-system collection");
  SynthOpts syn_o;
  synth->add_option("--queries", syn_o.queries, "number of queries")->capture_default_str();
  synth->add_option("--docs", syn_o.docs, "documents per query")->capture_default_str();
  synth->add_option("--informativeness", syn_o.informativeness, "predictor informativeness in [0, 1]")
      ->capture_default_str();
  add_common(synth, common);

  try {
    std::vector<std::string> args = with_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    err << "qpplab: " << e.what() << '\n';
    return exit_code(e.kind());
  }

  CLI::App* active = app.get_subcommands().front();
  Context ctx;
  ctx.subcommand = active->get_name();
  ctx.flags = flag_summary(*active);
  ctx.common = common;
  ctx.out = &out;

  try {
    if (active == eval) cmd_eval(ctx, eval_o);
    else if (active == predict) cmd_predict(ctx, pred_o);
    else if (active == correlate) cmd_correlate(ctx, corr_o);
    else if (active == regress) cmd_regress(ctx, reg_o);
    else if (active == anova) cmd_anova(ctx, anova_o);
    else if (active == select) cmd_select(ctx, sel_o);
    else if (active == report) cmd_report(ctx, rep_o);
    else cmd_synth(ctx, syn_o);
  } catch (const Error& e) {
    err << "qpplab: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "qpplab: error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace qpplab::cli
