// gbtsvm: command-line front end.
//
// Exit codes: 0 success, 1 parse / io / usage error, 2 degenerate data,
// 3 granulation did not converge, 4 solver failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gbtsvm/all.hpp"

namespace {

using namespace gbt;

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* v = std::getenv("GBTSVM_LOG");
  if (v == nullptr) return LogLevel::info;
  const std::string s(v);
  if (s == "quiet" || s == "0") return LogLevel::quiet;
  if (s == "debug" || s == "2") return LogLevel::debug;
  return LogLevel::info;
}

void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(log_level())) std::cerr << msg << '\n';
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::degenerate: return 2;
    case ErrorKind::convergence: return 3;
    case ErrorKind::solver:
    case ErrorKind::not_positive_definite:
    case ErrorKind::indefinite_diagonal: return 4;
    default: return 1;
  }
}

std::string fmt(double v) { return detail::format_double(v); }

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto f : detail::split_fields(s)) {
    const auto v = detail::parse_double(f);
    if (!v) throw Error(ErrorKind::invalid_argument, std::string(what) + ": bad number '" + std::string(f) + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw Error(ErrorKind::invalid_argument, std::string(what) + ": empty list");
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    save_text(path, text);
  }
}

// Options shared by every subcommand that reads a dataset.
struct DataOptions {
  std::string path;
  bool header = false;
  int label_column = -1;

  void add(CLI::App* app, const char* flag = "--in") {
    app->add_option(flag, path, "input CSV (one sample per row)")->required();
    app->add_flag("--header", header, "first row is a header");
    app->add_option("--label-column", label_column,
                    "0-based label column (default: last)");
  }

  Dataset load() const {
    CsvOptions o;
    o.has_header = header;
    if (label_column >= 0) o.label_column = LabelColumn::at(static_cast<std::size_t>(label_column));
    return load_csv(path, o);
  }
};

Dataset apply_metadata(const Dataset& d, const std::string& meta_path) {
  if (meta_path.empty()) return d;
  const DatasetMetadata md = metadata_from_json(load_json(meta_path));
  if (!md.normalization) return d;
  if (md.normalization->min.size() != d.m()) {
    throw Error(ErrorKind::dimension_mismatch, "metadata: normalization width differs from data");
  }
  return md.normalization->apply(d);
}

// Hyperparameter and training options shared by train and benchmark.
struct TrainOptions {
  std::string model = "gbtsvm";
  std::string kernel = "linear";
  double sigma = 1.0;
  double d1 = 1.0, d2 = 1.0, d3 = 1.0, d4 = 1.0;
  double delta = 1e-6;
  double purity = 1.0;
  long min_balls = 2;
  std::uint64_t seed = 0;
  std::string solver = "generic";
  double omega = 1.0;
  double tolerance = 1e-8;
  int max_sweeps = 200000;

  void add(CLI::App* app) {
    app->add_option("--model", model, "gbtsvm | lsgbtsvm | tsvm")
        ->check(CLI::IsMember({"gbtsvm", "lsgbtsvm", "tsvm"}))
        ->capture_default_str();
    app->add_option("--kernel", kernel, "linear | gaussian")
        ->check(CLI::IsMember({"linear", "gaussian"}))
        ->capture_default_str();
    app->add_option("--sigma", sigma, "gaussian kernel width")->capture_default_str();
    app->add_option("--d1", d1, "penalty on -1 ball violations")->capture_default_str();
    app->add_option("--d2", d2, "penalty on +1 ball violations")->capture_default_str();
    app->add_option("--d3", d3, "lsgbtsvm regularizer, first plane")->capture_default_str();
    app->add_option("--d4", d4, "lsgbtsvm regularizer, second plane")->capture_default_str();
    app->add_option("--delta", delta, "gbtsvm ridge on H'H and G'G")->capture_default_str();
    app->add_option("--purity", purity, "granulation purity threshold")->capture_default_str();
    app->add_option("--min-balls", min_balls, "lower bound on the ball count")->capture_default_str();
    app->add_option("--seed", seed, "seed for every stochastic step")->capture_default_str();
    app->add_option("--solver", solver, "lsgbtsvm coordinate order: generic | sor")
        ->check(CLI::IsMember({"generic", "sor"}))
        ->capture_default_str();
    app->add_option("--omega", omega, "relaxation factor in (0, 2)")->capture_default_str();
    app->add_option("--tol", tolerance, "solver tolerance")->capture_default_str();
    app->add_option("--max-sweeps", max_sweeps, "solver sweep cap")->capture_default_str();
  }

  PipelineConfig config() const {
    PipelineConfig c;
    c.model = parse_model_kind(model);
    c.kernel = parse_kernel_kind(kernel);
    c.cell = {d1, d2, d3, d4, sigma};
    c.delta = delta;
    c.granulation.purity_threshold = purity;
    c.granulation.min_balls = min_balls;
    c.granulation.seed = seed;
    c.solver.omega = omega;
    c.solver.tolerance = tolerance;
    c.solver.max_sweeps = max_sweeps;
    c.ls_solver = parse_ls_solver_kind(solver);
    return c;
  }
};

struct GridOptions {
  bool enabled = false;
  std::string d_values;
  std::string d34_values;
  std::string sigma_values;
  int folds = 5;
  int jobs = 1;

  void add(CLI::App* app) {
    app->add_flag("--grid", enabled, "tune d1..d4 / sigma by k-fold grid search");
    app->add_option("--grid-d", d_values, "comma list for d1 = d2 (default 1e-5..1e5 decades)");
    app->add_option("--grid-d34", d34_values, "comma list for d3 = d4 (lsgbtsvm)");
    app->add_option("--grid-sigma", sigma_values, "comma list for sigma (default 2^-5..2^5)");
    app->add_option("--folds", folds, "cross-validation folds")->capture_default_str();
    app->add_option("--jobs", jobs, "worker threads for the grid")->capture_default_str();
  }

  GridSpec spec(const PipelineConfig& c) const {
    GridSpec g = GridSpec::defaults(c.model == ModelKind::lsgbtsvm, c.kernel == KernelKind::gaussian);
    if (!d_values.empty()) g.d_values = parse_list(d_values, "--grid-d");
    if (!d34_values.empty() && c.model == ModelKind::lsgbtsvm) {
      g.d34_values = parse_list(d34_values, "--grid-d34");
    }
    if (!sigma_values.empty() && c.kernel == KernelKind::gaussian) {
      g.sigma_values = parse_list(sigma_values, "--grid-sigma");
    }
    return g;
  }
};

// Subcommands ---------------------------------------------------------------

int cmd_synth(const std::string& kind, const SynthSpec& base, const std::string& out,
              bool header) {
  SynthSpec spec = base;
  spec.kind = parse_synth_kind(kind);
  const Dataset d = generate_synthetic(spec);
  std::ostringstream os;
  write_csv(os, d, header);
  write_output(out, os.str());
  log(LogLevel::info, "synth: " + std::to_string(d.n()) + " samples, " +
                          std::to_string(d.count(1)) + " positive");
  return 0;
}

int cmd_noise(const DataOptions& data, const NoiseSpec& spec, const std::string& out) {
  const Dataset d = data.load();
  const Dataset noisy = inject_label_noise(d, spec);
  std::ostringstream os;
  write_csv(os, noisy, data.header);
  write_output(out, os.str());
  const auto flips = (d.labels.array() != noisy.labels.array()).count();
  log(LogLevel::info, "noise: flipped " + std::to_string(flips) + " labels");
  return 0;
}

int cmd_granulate(const DataOptions& data, const GranulationConfig& cfg, const std::string& out,
                  const std::string& plot) {
  const Dataset d = data.load();
  d.require_trainable("granulate");
  const GranulationResult g = granulate(d, cfg);
  write_output(out, dump(balls_to_json(g)));
  if (!plot.empty()) {
    std::ostringstream os;
    write_ball_svg(os, g, &d);
    save_text(plot, os.str());
  }
  log(LogLevel::info, "granulate: " + std::to_string(g.size()) + " balls (" +
                          std::to_string(g.count(1)) + " positive) from " +
                          std::to_string(d.n()) + " samples");
  return 0;
}

int cmd_train(const DataOptions& data, const TrainOptions& opts, const GridOptions& grid,
              bool normalize, const std::string& out, const std::string& meta_out,
              const std::string& balls_out) {
  Dataset d = data.load();
  DatasetMetadata md;
  md.label_map = d.label_map;
  md.feature_names = d.feature_names;
  if (normalize) {
    auto [nd, record] = minmax_normalize(d);
    d = std::move(nd);
    md.normalization = record;
  }
  const PipelineConfig cfg = opts.config();
  const GridSpec spec = grid.spec(cfg);
  const TunedFit fit = fit_tuned(d, cfg, grid.enabled ? &spec : nullptr, grid.folds, opts.seed, grid.jobs);
  write_output(out, dump(model_to_json(fit.model)));
  if (!meta_out.empty()) save_text(meta_out, dump(metadata_to_json(md)));
  if (!balls_out.empty()) {
    if (cfg.model == ModelKind::tsvm) {
      throw Error(ErrorKind::invalid_argument, "train: tsvm has no balls to write");
    }
    save_text(balls_out, dump(balls_to_json(granulate(d, cfg.granulation))));
  }
  std::string msg = "train: " + std::string(to_string(fit.model.mode)) + " model";
  if (fit.tuned) {
    msg += ", grid best d1=" + fmt(fit.cell.d1) + " d2=" + fmt(fit.cell.d2);
    if (cfg.model == ModelKind::lsgbtsvm) msg += " d3=" + fmt(fit.cell.d3) + " d4=" + fmt(fit.cell.d4);
    if (cfg.kernel == KernelKind::gaussian) msg += " sigma=" + fmt(fit.cell.sigma);
    msg += " (cv " + fmt(fit.cv_accuracy) + "%)";
  }
  log(LogLevel::info, msg);
  return 0;
}

std::string label_name(const TwinModel& m, int label) {
  if (m.label_map) return label == 1 ? m.label_map->positive : m.label_map->negative;
  return label == 1 ? "1" : "-1";
}

int cmd_predict(const std::string& model_path, const DataOptions& data, const std::string& meta,
                const std::string& out) {
  const TwinModel m = model_from_json(load_json(model_path));
  const Dataset d = apply_metadata(data.load(), meta);
  const Eigen::VectorXi pred = predict_batch(m, d.features);
  std::ostringstream os;
  os << "label\n";
  for (Index i = 0; i < pred.size(); ++i) os << label_name(m, pred(i)) << '\n';
  write_output(out, os.str());
  return 0;
}

int cmd_eval(const std::string& model_path, const DataOptions& data, const std::string& meta,
             const std::string& out) {
  const TwinModel m = model_from_json(load_json(model_path));
  const Dataset d = apply_metadata(data.load(), meta);
  // Labels are compared by raw name so a file whose label order differs
  // from the training file still scores correctly.
  Eigen::VectorXi truth = d.labels;
  if (m.label_map && d.label_map && !(*m.label_map == *d.label_map)) {
    for (Index i = 0; i < truth.size(); ++i) {
      const std::string& raw = truth(i) == 1 ? d.label_map->positive : d.label_map->negative;
      if (raw == m.label_map->positive) {
        truth(i) = 1;
      } else if (raw == m.label_map->negative) {
        truth(i) = -1;
      } else {
        throw Error(ErrorKind::schema, "eval: label '" + raw + "' unknown to the model");
      }
    }
  }
  const Eigen::VectorXi pred = predict_batch(m, d.features);
  const double acc = accuracy(pred, truth);
  const Json j{{"mode", to_string(m.mode)},
               {"n", d.n()},
               {"correct", (pred.array() == truth.array()).count()},
               {"accuracy", acc}};
  write_output(out, dump(j));
  log(LogLevel::info, "eval: accuracy " + fmt(acc) + "%");
  return 0;
}

int cmd_benchmark(const std::vector<std::string>& files, const std::vector<std::string>& synth,
                  const SynthSpec& synth_base, bool header, const std::vector<std::string>& model_names,
                  const std::string& noise, const TrainOptions& opts, const BenchmarkProtocol& base,
                  const std::string& out_csv, const std::string& out_json) {
  std::vector<BenchmarkDataset> datasets;
  for (const auto& f : files) {
    CsvOptions o;
    o.has_header = header;
    datasets.push_back({std::filesystem::path(f).stem().string(), load_csv(f, o)});
  }
  for (const auto& k : synth) {
    SynthSpec s = synth_base;
    s.kind = parse_synth_kind(k);
    datasets.push_back({k + std::to_string(s.n), generate_synthetic(s)});
  }
  if (datasets.size() * parse_list(noise, "--noise").size() < 2) {
    throw Error(ErrorKind::invalid_argument, "benchmark: need at least two (dataset, noise) rows");
  }
  std::vector<BenchmarkModel> models;
  for (const auto& spec : model_names) {
    // name[:kernel], e.g. gbtsvm, lsgbtsvm:gaussian
    const auto colon = spec.find(':');
    TrainOptions o = opts;
    o.model = spec.substr(0, colon);
    if (colon != std::string::npos) o.kernel = spec.substr(colon + 1);
    models.push_back({spec, o.config()});
  }
  if (models.size() < 2) throw Error(ErrorKind::invalid_argument, "benchmark: need at least two models");
  BenchmarkProtocol proto = base;
  proto.noise_levels = parse_list(noise, "--noise");
  const BenchmarkResult r = run_benchmark(datasets, models, proto);
  for (const auto& f : r.failures) log(LogLevel::info, "benchmark: failed " + f);
  std::ostringstream csv;
  write_rank_table(csv, r.table);
  write_output(out_csv, csv.str());
  if (!out_json.empty()) save_text(out_json, dump(stats_to_json(r.table, compute_stats(r.table))));
  return 0;
}

int cmd_stats(const std::string& in, const std::string& ranks, int n, const std::string& out) {
  Json j;
  if (!ranks.empty()) {
    const std::vector<double> r = parse_list(ranks, "--ranks");
    const Eigen::VectorXd avg = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Index>(r.size()));
    const int q = static_cast<int>(r.size());
    const FriedmanResult f = friedman(avg, n, q);
    const double qa = nemenyi_q_alpha(q);
    j = {{"N", n},
         {"q", q},
         {"avg_ranks", r},
         {"chi2F", f.chi2},
         {"FF", f.ff},
         {"q_alpha", qa},
         {"CD", nemenyi_cd(q, n, qa)},
         {"wtl", {{"threshold", wtl_threshold(n)}}}};
  } else {
    if (in.empty()) throw Error(ErrorKind::invalid_argument, "stats: give --in or --ranks");
    const RankTable t = load_rank_table(in);
    j = stats_to_json(t, compute_stats(t));
  }
  write_output(out, dump(j));
  log(LogLevel::info, "stats: chi2F " + fmt(j["chi2F"].get<double>()) + ", FF " +
                          fmt(j["FF"].get<double>()) + ", CD " + fmt(j["CD"].get<double>()));
  return 0;
}

int cmd_vtub(const std::string& model_path, const std::string& balls_path, const VTUBParams& p,
             const std::string& out) {
  const TwinModel m = model_from_json(load_json(model_path));
  const GranulationResult g = balls_from_json(load_json(balls_path));
  const VTUBReport r = verify(m, g, p);
  if (!out.empty()) save_text(out, dump(vtub_to_json(r)));
  std::cout << "pairs " << r.pairs.size() << " violations " << r.violations() << " max_ratio "
            << fmt(r.max_ratio()) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Granular-ball twin SVM toolkit"};
  app.require_subcommand(1);
  std::function<int()> run;

  // synth
  SynthSpec synth;
  std::string synth_kind = "linear-margin";
  std::string synth_out;
  bool synth_header = false;
  auto* s_synth = app.add_subcommand("synth", "generate a synthetic two-class dataset");
  s_synth->add_option("--kind", synth_kind, "linear-margin | crossplane | checkerboard")
      ->capture_default_str();
  s_synth->add_option("--n", synth.n, "samples")->capture_default_str();
  s_synth->add_option("--m", synth.m, "features")->capture_default_str();
  s_synth->add_option("--balance", synth.class_balance, "fraction of +1 samples")->capture_default_str();
  s_synth->add_option("--separation", synth.separation, "class separation")->capture_default_str();
  s_synth->add_option("--seed", synth.seed, "random seed")->capture_default_str();
  s_synth->add_option("--out", synth_out, "output CSV (default stdout)");
  s_synth->add_flag("--header", synth_header, "write a header row");
  s_synth->callback([&] { run = [&] { return cmd_synth(synth_kind, synth, synth_out, synth_header); }; });

  // noise
  DataOptions noise_data;
  NoiseSpec noise;
  std::string noise_out;
  auto* s_noise = app.add_subcommand("noise", "flip a fraction of labels");
  noise_data.add(s_noise);
  s_noise->add_option("--rate", noise.rate, "fraction of labels to flip, in [0, 0.5]")->required();
  s_noise->add_option("--seed", noise.seed, "random seed")->capture_default_str();
  s_noise->add_option("--out", noise_out, "output CSV (default stdout)");
  s_noise->callback([&] { run = [&] { return cmd_noise(noise_data, noise, noise_out); }; });

  // granulate
  DataOptions gran_data;
  GranulationConfig gran;
  std::string gran_out, gran_plot;
  auto* s_gran = app.add_subcommand("granulate", "split a dataset into granular balls");
  gran_data.add(s_gran);
  s_gran->add_option("--purity", gran.purity_threshold, "purity threshold in (0.5, 1]")->capture_default_str();
  s_gran->add_option("--min-balls", gran.min_balls, "lower bound on the ball count")->capture_default_str();
  s_gran->add_option("--max-splits", gran.max_iterations, "cap on the number of splits")->capture_default_str();
  s_gran->add_option("--seed", gran.seed, "random seed")->capture_default_str();
  s_gran->add_option("--out", gran_out, "ball JSON (default stdout)");
  s_gran->add_option("--plot", gran_plot, "SVG plot of the balls (two features only)");
  s_gran->callback([&] { run = [&] { return cmd_granulate(gran_data, gran, gran_out, gran_plot); }; });

  // train
  DataOptions train_data;
  TrainOptions train;
  GridOptions grid;
  bool normalize = false;
  std::string train_out, meta_out, balls_out;
  auto* s_train = app.add_subcommand("train", "granulate and fit a twin classifier");
  train_data.add(s_train);
  train.add(s_train);
  grid.add(s_train);
  s_train->add_flag("--normalize", normalize, "min-max scale features to [0, 1]");
  s_train->add_option("--out", train_out, "model JSON (default stdout)");
  s_train->add_option("--meta-out", meta_out, "metadata sidecar JSON (labels, normalization)");
  s_train->add_option("--balls-out", balls_out, "ball JSON used for the final fit");
  s_train->callback([&] {
    run = [&] { return cmd_train(train_data, train, grid, normalize, train_out, meta_out, balls_out); };
  });

  // predict
  DataOptions pred_data;
  std::string pred_model, pred_meta, pred_out;
  auto* s_pred = app.add_subcommand("predict", "label samples with a trained model");
  s_pred->add_option("--model", pred_model, "model JSON")->required();
  pred_data.add(s_pred);
  s_pred->add_option("--meta", pred_meta, "metadata sidecar from train");
  s_pred->add_option("--out", pred_out, "prediction CSV (default stdout)");
  s_pred->callback([&] { run = [&] { return cmd_predict(pred_model, pred_data, pred_meta, pred_out); }; });

  // eval
  DataOptions eval_data;
  std::string eval_model, eval_meta, eval_out;
  auto* s_eval = app.add_subcommand("eval", "accuracy of a trained model on labeled data");
  s_eval->add_option("--model", eval_model, "model JSON")->required();
  eval_data.add(s_eval);
  s_eval->add_option("--meta", eval_meta, "metadata sidecar from train");
  s_eval->add_option("--out", eval_out, "report JSON (default stdout)");
  s_eval->callback([&] { run = [&] { return cmd_eval(eval_model, eval_data, eval_meta, eval_out); }; });

  // benchmark
  std::vector<std::string> bench_files, bench_synth;
  std::vector<std::string> bench_models{"tsvm", "gbtsvm", "lsgbtsvm"};
  SynthSpec bench_synth_spec;
  bool bench_header = false;
  std::string bench_noise = "0";
  std::string bench_csv, bench_json;
  TrainOptions bench_train;
  BenchmarkProtocol proto;
  auto* s_bench = app.add_subcommand("benchmark", "datasets x noise levels x models accuracy table");
  s_bench->add_option("--data", bench_files, "input CSV files (label last)");
  s_bench->add_option("--synth", bench_synth, "synthetic kinds to add as datasets");
  s_bench->add_option("--synth-n", bench_synth_spec.n, "samples per synthetic dataset")->capture_default_str();
  s_bench->add_option("--synth-m", bench_synth_spec.m, "features per synthetic dataset")->capture_default_str();
  s_bench->add_flag("--header", bench_header, "input files have a header row");
  s_bench->add_option("--models", bench_models, "models as name[:kernel]")->capture_default_str();
  s_bench->add_option("--noise", bench_noise, "comma list of label-noise rates")->capture_default_str();
  bench_train.add(s_bench);
  s_bench->add_option("--folds", proto.folds, "cross-validation folds")->capture_default_str();
  s_bench->add_option("--split", proto.train_fraction, "training fraction")->capture_default_str();
  s_bench->add_flag("!--no-grid", proto.tune, "skip grid search, use the given hyperparameters");
  s_bench->add_option("--jobs", proto.jobs, "worker threads for the grid")->capture_default_str();
  s_bench->add_option("--out-csv", bench_csv, "accuracy CSV (default stdout)");
  s_bench->add_option("--out-json", bench_json, "statistics JSON");
  s_bench->callback([&] {
    proto.seed = bench_train.seed;
    bench_synth_spec.seed = bench_train.seed;
    run = [&] {
      return cmd_benchmark(bench_files, bench_synth, bench_synth_spec, bench_header, bench_models,
                           bench_noise, bench_train, proto, bench_csv, bench_json);
    };
  });

  // stats
  std::string stats_in, stats_ranks, stats_out;
  int stats_n = 0;
  auto* s_stats = app.add_subcommand("stats", "Friedman, Nemenyi and win-tie-loss statistics");
  s_stats->add_option("--in", stats_in, "accuracy CSV (dataset column, then one per model)");
  s_stats->add_option("--ranks", stats_ranks, "comma list of average ranks instead of a table");
  s_stats->add_option("--datasets", stats_n, "dataset count N for --ranks");
  s_stats->add_option("--out", stats_out, "statistics JSON (default stdout)");
  s_stats->callback([&] { run = [&] { return cmd_stats(stats_in, stats_ranks, stats_n, stats_out); }; });

  // vtub
  std::string vtub_model, vtub_balls, vtub_out;
  VTUBParams vtub;
  auto* s_vtub = app.add_subcommand("vtub", "check the slack-difference bounds of a linear model");
  s_vtub->add_option("--model", vtub_model, "linear model JSON")->required();
  s_vtub->add_option("--balls", vtub_balls, "ball JSON the model was fitted on")->required();
  s_vtub->add_option("--Delta", vtub.Delta, "perturbation scale")->capture_default_str();
  s_vtub->add_option("--delta", vtub.delta, "ridge used in training")->capture_default_str();
  s_vtub->add_option("--out", vtub_out, "report JSON");
  s_vtub->callback([&] { run = [&] { return cmd_vtub(vtub_model, vtub_balls, vtub, vtub_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    return run();
  } catch (const SingleClassError& e) {
    std::cerr << "error (degenerate): " << e.what() << '\n';
    return exit_code(ErrorKind::degenerate);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
