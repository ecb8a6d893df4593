#include "bnnmi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "bnnmi/active_loop.hpp"
#include "bnnmi/data_io.hpp"
#include "bnnmi/errors.hpp"
#include "bnnmi/estimation.hpp"
#include "bnnmi/uncertainty.hpp"
#include "bnnmi/verify.hpp"

namespace bnnmi::cli {

namespace {

namespace fs = std::filesystem;

struct ScoreOptions {
  std::string alpha;
  std::string csv;
};

struct EstimationOptions {
  std::size_t max_iterations = 1000;
  double tol = 1e-10;
  std::string statistic = "paper-log-of-mean";
  double degenerate_eps = 1e-8;
  bool refine = false;

  estimation::EstimationConfig config() const {
    estimation::EstimationConfig c;
    c.max_iterations = max_iterations;
    c.convergence_tol = tol;
    c.statistic_mode = estimation::parse_statistic_mode(statistic);
    c.degenerate_epsilon = degenerate_eps;
    c.refine_inverse_digamma = refine;
    return c;
  }
};

void add_estimation_flags(CLI::App* cmd, EstimationOptions& opt) {
  cmd->add_option("--statistic", opt.statistic,
                  "Fixed-point statistic: paper-log-of-mean or mean-of-logs")
      ->capture_default_str();
  cmd->add_option("--max-iterations", opt.max_iterations, "Fixed-point iteration budget")
      ->capture_default_str();
  cmd->add_option("--tol", opt.tol,
                  "Stop when max |alpha change| per sweep is <= tol (0 = full budget)")
      ->capture_default_str();
  cmd->add_option("--degenerate-eps", opt.degenerate_eps,
                  "Class is degenerate when E[p] < eps and E[p^2] < eps^2")
      ->capture_default_str();
  cmd->add_flag("--refine", opt.refine,
                "Newton-refine the approximate inverse digamma");
}

struct EstimateOptions {
  std::string samples;
  std::string report;
  EstimationOptions est;
};

struct VerifyOptions {
  std::string classes = "2,3";
  std::string alpha_grid = "0.5,1,2,5";
  std::size_t mc_samples = 100000;
  std::size_t bootstrap = 100;
  std::uint64_t seed = 1;
  std::string output;
};

struct AlRunOptions {
  std::string dataset = "synth";
  std::string images, labels, test_images, test_labels;
  std::string emnist_split = "balanced";
  bool transpose = false;
  std::size_t synth_classes = 4;
  std::size_t synth_dim = 8;
  double synth_spread = 0.6;
  std::size_t pool_size = 2000;
  std::size_t test_size = 1000;
  std::size_t pool_subsample = 5000;
  std::size_t test_subsample = 2000;
  std::string strategies = "random,bald-empirical,bald-analytic,baba-empirical,baba-analytic";
  std::size_t seeds = 3;
  std::uint64_t seed = 1;
  std::size_t k = 20;
  std::size_t k_tot = 200;
  std::size_t m = 50;
  std::size_t initial_size = 0;  // 0: same as K
  model::ModelConfig model;
  EstimationOptions est{.statistic = "mean-of-logs"};
  std::string out = "curves.csv";
  std::string scores_dir;
  bool wall_time = true;
};

struct PlotOptions {
  std::string curves;
  std::string out;
};

std::string fmt12(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) items.push_back(item);
  }
  if (items.empty()) throw ParseError("empty list '" + text + "'");
  return items;
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> values;
  for (const double v : io::parse_real_list(text)) {
    if (v < 0 || v != std::floor(v)) {
      throw ParseError("expected non-negative integers in '" + text + "'");
    }
    values.push_back(static_cast<std::size_t>(v));
  }
  return values;
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

std::size_t parse_thread_count(const std::string& text) {
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value == 0) {
    throw CLI::ValidationError("BNNMI_THREADS", "expected a positive integer, got '" + text + "'");
  }
  return value;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Replaces `--config FILE` with the file's key=value entries as --key=value
// arguments, skipping keys already given on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (path.empty()) return kept;
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (!has_flag(kept, key)) extra.push_back(key + "=" + value);
  }
  kept.insert(kept.end(), extra.begin(), extra.end());
  return kept;
}

int cmd_score(const ScoreOptions& opt, std::ostream& out) {
  std::vector<double> alpha;
  try {
    alpha = io::parse_real_list(opt.alpha);
  } catch (const ParseError& e) {
    throw ParseError(std::string("--alpha: ") + e.what());
  }
  const DirichletParams params(std::move(alpha));
  const auto report = uncertainty::analyze(params);
  out << "alpha=" << verify::format_alpha(params) << '\n'
      << "predictive_entropy=" << fmt12(report.predictive_entropy) << '\n'
      << "epistemic=" << fmt12(report.epistemic) << '\n'
      << "aleatoric=" << fmt12(report.aleatoric) << '\n';
  if (report.joint_entropy) {
    out << "joint_entropy=" << fmt12(*report.joint_entropy) << '\n';
  }
  out << "mjent=" << fmt12(report.mjent) << '\n'
      << "baba=" << fmt12(report.baba) << '\n';
  if (!opt.csv.empty()) {
    std::ofstream csv(opt.csv);
    if (!csv) throw IoError("cannot write " + opt.csv);
    csv << "alpha,predictive_entropy,epistemic,aleatoric,joint_entropy,mjent,baba\n";
    for (std::size_t k = 0; k < params.classes(); ++k) {
      csv << (k ? " " : "") << fmt12(params[k]);
    }
    csv << ',' << fmt12(report.predictive_entropy) << ',' << fmt12(report.epistemic)
        << ',' << fmt12(report.aleatoric) << ','
        << (report.joint_entropy ? fmt12(*report.joint_entropy) : std::string())
        << ',' << fmt12(report.mjent) << ',' << fmt12(report.baba) << '\n';
    if (!csv) throw IoError("failed writing " + opt.csv);
  }
  return kSuccess;
}

int cmd_estimate(const EstimateOptions& opt, std::ostream& out) {
  const auto config = opt.est.config();
  const auto batch = io::read_samples_csv(opt.samples);
  const auto result = estimation::fixed_point_estimate(batch, config);
  std::ostringstream text;
  text << "alpha=";
  for (std::size_t k = 0; k < result.alpha.classes(); ++k) {
    text << (k ? "," : "") << fmt12(result.alpha[k]);
  }
  text << '\n'
       << "iterations=" << result.iterations << '\n'
       << "converged=" << (result.converged ? "true" : "false") << '\n'
       << "statistic_mode=" << estimation::to_string(result.statistic_mode) << '\n'
       << "samples=" << batch.size() << '\n'
       << "degenerate_classes=";
  for (std::size_t i = 0; i < result.degenerate_classes.size(); ++i) {
    text << (i ? "," : "") << result.degenerate_classes[i];
  }
  text << '\n';
  out << text.str();
  if (!opt.report.empty()) {
    std::ofstream report(opt.report);
    if (!report) throw IoError("cannot write " + opt.report);
    report << text.str();
    const auto u = uncertainty::analyze(result.alpha);
    report << "epistemic=" << fmt12(u.epistemic) << '\n'
           << "aleatoric=" << fmt12(u.aleatoric) << '\n'
           << "empirical_bald=" << fmt12(uncertainty::empirical_bald(batch)) << '\n';
  }
  return kSuccess;
}

int cmd_verify(const VerifyOptions& opt, std::size_t threads, std::ostream& out) {
  verify::VerifyConfig config;
  config.classes = parse_count_list(opt.classes);
  config.alpha_grid = io::parse_real_list(opt.alpha_grid);
  config.mc_samples = opt.mc_samples;
  config.bootstrap_replicates = opt.bootstrap;
  config.seed = opt.seed;
  config.threads = threads;
  const auto report = verify::run_verification(config);
  verify::print_report(report, out);
  if (!opt.output.empty()) {
    std::ofstream file(opt.output);
    if (!file) throw IoError("cannot write " + opt.output);
    verify::print_report(report, file);
    if (!file) throw IoError("failed writing " + opt.output);
  }
  return report.all_passed() ? kSuccess : kVerificationFailed;
}

std::pair<LabeledDataset, LabeledDataset> load_al_data(const AlRunOptions& opt) {
  if (opt.dataset == "synth") {
    const std::size_t total = opt.pool_size + opt.test_size;
    const std::size_t per_class = (total + opt.synth_classes - 1) / opt.synth_classes;
    const auto all = io::synth_blobs(opt.synth_classes, per_class, opt.synth_dim,
                                     opt.synth_spread, derive_seed(opt.seed, 0xDA7A));
    std::vector<std::size_t> pool_idx(opt.pool_size), test_idx(opt.test_size);
    for (std::size_t i = 0; i < opt.pool_size; ++i) pool_idx[i] = i;
    for (std::size_t i = 0; i < opt.test_size; ++i) test_idx[i] = opt.pool_size + i;
    return {all.subset(pool_idx), all.subset(test_idx)};
  }
  if (opt.dataset != "mnist" && opt.dataset != "emnist") {
    throw ParseError("--dataset must be synth, mnist or emnist");
  }
  if (opt.images.empty() || opt.labels.empty()) {
    throw ParseError("--dataset " + opt.dataset + " needs --images and --labels");
  }
  const bool transpose = opt.transpose;
  auto train = io::read_idx(opt.images, opt.labels, transpose);
  train.name = opt.dataset == "emnist" ? "emnist-" + opt.emnist_split : "mnist";
  LabeledDataset test;
  if (!opt.test_images.empty() && !opt.test_labels.empty()) {
    test = io::read_idx(opt.test_images, opt.test_labels, transpose);
  } else {
    // Hold out the tail of the training file.
    const std::size_t held = std::min(opt.test_subsample, train.size() / 2);
    std::vector<std::size_t> head(train.size() - held), tail(held);
    for (std::size_t i = 0; i < head.size(); ++i) head[i] = i;
    for (std::size_t i = 0; i < held; ++i) tail[i] = head.size() + i;
    test = train.subset(tail);
    train = train.subset(head);
  }
  test.classes = train.classes = std::max(train.classes, test.classes);
  train = io::subsample(train, opt.pool_subsample, derive_seed(opt.seed, 0x9001));
  test = io::subsample(test, opt.test_subsample, derive_seed(opt.seed, 0x7E57));
  return {std::move(train), std::move(test)};
}

int cmd_al_run(const AlRunOptions& opt, std::size_t threads, std::ostream& out,
               std::ostream& err) {
  std::vector<active::AcquisitionStrategy> strategies;
  for (const auto& name : split_list(opt.strategies)) {
    strategies.push_back(active::parse_strategy(name));
  }
  active::ALConfig config;
  config.k = opt.k;
  config.k_total = opt.k_tot;
  config.mc_samples = opt.m;
  config.initial_size = opt.initial_size ? opt.initial_size : opt.k;
  config.seeds.clear();
  for (std::size_t i = 0; i < opt.seeds; ++i) config.seeds.push_back(opt.seed + i);
  config.model = opt.model;
  config.estimation = opt.est.config();
  config.threads = threads;
  config.keep_scores = !opt.scores_dir.empty();
  config.record_wall_time = opt.wall_time;
  for (const auto s : strategies) config.validate(s);

  const auto [pool, test] = load_al_data(opt);
  std::vector<io::LearningCurveRecord> records;
  bool failed = false;
  for (const auto strategy : strategies) {
    const auto result = active::run_active_learning(pool, test, config, strategy);
    const auto curves = result.curves();
    records.insert(records.end(), curves.begin(), curves.end());
    std::size_t fallbacks = 0;
    for (const auto& run : result.runs) {
      fallbacks += run.fallback_count;
      if (run.failure) {
        failed = true;
        err << "strategy " << active::to_string(strategy) << " seed " << run.seed
            << " stopped at " << *run.failure << '\n';
      }
      if (config.keep_scores) {
        fs::create_directories(opt.scores_dir);
        io::write_scores(run.scores,
                         fs::path(opt.scores_dir) /
                             (std::string(active::to_string(strategy)) + "_seed" +
                              std::to_string(run.seed) + ".csv"));
      }
    }
    out << "final_accuracy strategy=" << active::to_string(strategy)
        << " mean=" << fmt12(result.mean_final_accuracy())
        << " seeds=" << result.runs.size() << " fallbacks=" << fallbacks << '\n';
  }
  if (!records.empty()) io::write_curves(records, opt.out);
  out << "wrote " << records.size() << " rows to " << opt.out << '\n';
  return failed ? kVerificationFailed : kSuccess;
}

int cmd_plot_data(const PlotOptions& opt, std::ostream& out) {
  const auto records = io::read_curves(opt.curves);
  if (records.empty()) throw ParseError(opt.curves + ": no rows");
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.strategy, r.labeled_count}].push_back(r.test_accuracy);
  std::ofstream file(opt.out);
  if (!file) throw IoError("cannot write " + opt.out);
  file << "strategy,labeled_count,runs,mean_accuracy,std_accuracy\n";
  for (const auto& [key, acc] : groups) {
    double mean = 0.0;
    for (const double a : acc) mean += a;
    mean /= static_cast<double>(acc.size());
    double ss = 0.0;
    for (const double a : acc) ss += (a - mean) * (a - mean);
    const double sd = acc.size() > 1 ? std::sqrt(ss / static_cast<double>(acc.size() - 1)) : 0.0;
    file << key.first << ',' << key.second << ',' << acc.size() << ',' << fmt12(mean)
         << ',' << fmt12(sd) << '\n';
  }
  if (!file) throw IoError("failed writing " + opt.out);
  out << "wrote " << groups.size() << " rows to " << opt.out << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytic epistemic/aleatoric uncertainty for Dirichlet predictive "
               "distributions, Dirichlet estimation, and active-learning runs"};
  app.name(args.empty() ? "bnnmi" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);
  std::size_t threads = 1;
  auto* threads_opt =
      app.add_option("--threads", threads,
                     "Worker threads for pool scoring and verification (env BNNMI_THREADS)")
          ->check(CLI::PositiveNumber)
          ->capture_default_str();

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Analytic uncertainty report for one alpha");
  score_cmd->add_option("--alpha", score.alpha, "Comma-separated concentrations")
      ->required()
      ->allow_extra_args(false);
  score_cmd->add_option("--csv", score.csv, "Also write the report as CSV");

  EstimateOptions estimate;
  auto* estimate_cmd =
      app.add_subcommand("estimate", "Fit Dirichlet parameters to probability samples");
  estimate_cmd->add_option("--samples", estimate.samples,
                           "CSV of M rows x C probabilities")
      ->required();
  estimate_cmd->add_option("--report", estimate.report, "Also write a report file");
  add_estimation_flags(estimate_cmd, estimate.est);

  VerifyOptions verify_opt;
  auto* verify_cmd =
      app.add_subcommand("verify", "Check analytic formulas against Monte-Carlo oracles");
  verify_cmd->add_option("--classes", verify_opt.classes, "Class counts")
      ->capture_default_str();
  verify_cmd->add_option("--alpha-grid", verify_opt.alpha_grid, "Concentration scales")
      ->capture_default_str();
  verify_cmd->add_option("--mc-samples", verify_opt.mc_samples, "Dirichlet draws per point")
      ->capture_default_str();
  verify_cmd->add_option("--bootstrap", verify_opt.bootstrap, "Bootstrap replicates")
      ->capture_default_str();
  verify_cmd->add_option("--seed", verify_opt.seed, "RNG seed")->capture_default_str();
  verify_cmd->add_option("--output", verify_opt.output, "Also write the report here");

  AlRunOptions al;
  auto* al_cmd = app.add_subcommand("al-run", "Pool-based active-learning experiment");
  al_cmd->add_option("--dataset", al.dataset, "synth, mnist or emnist")
      ->check(CLI::IsMember({"synth", "mnist", "emnist"}))
      ->capture_default_str();
  al_cmd->add_option("--images", al.images, "IDX image file (mnist/emnist)");
  al_cmd->add_option("--labels", al.labels, "IDX label file (mnist/emnist)");
  al_cmd->add_option("--test-images", al.test_images, "IDX test image file");
  al_cmd->add_option("--test-labels", al.test_labels, "IDX test label file");
  al_cmd->add_option("--emnist-split", al.emnist_split, "EMNIST split name")
      ->capture_default_str();
  al_cmd->add_flag("--transpose", al.transpose, "Transpose IDX images (EMNIST layout)");
  al_cmd->add_option("--synth-classes", al.synth_classes)->capture_default_str();
  al_cmd->add_option("--synth-dim", al.synth_dim)->capture_default_str();
  al_cmd->add_option("--synth-spread", al.synth_spread)->capture_default_str();
  al_cmd->add_option("--pool-size", al.pool_size, "Synthetic pool size")
      ->capture_default_str();
  al_cmd->add_option("--test-size", al.test_size, "Synthetic test size")
      ->capture_default_str();
  al_cmd->add_option("--pool-subsample", al.pool_subsample, "IDX pool subsample")
      ->capture_default_str();
  al_cmd->add_option("--test-subsample", al.test_subsample, "IDX test subsample")
      ->capture_default_str();
  al_cmd->add_option("--strategies", al.strategies, "Comma-separated strategies")
      ->capture_default_str();
  al_cmd->add_option("--seeds", al.seeds, "Number of seeds (seed, seed+1, ...)")
      ->capture_default_str();
  al_cmd->add_option("--seed", al.seed, "First seed")->capture_default_str();
  al_cmd->add_option("--k", al.k, "Acquisitions per iteration")->capture_default_str();
  al_cmd->add_option("--k-tot", al.k_tot, "Total labeling budget")->capture_default_str();
  al_cmd->add_option("--m", al.m, "MC dropout samples per item")->capture_default_str();
  al_cmd->add_option("--initial-size", al.initial_size,
                     "Random initial labeled set (default: K)");
  al_cmd->add_option("--hidden", al.model.hidden_width)->capture_default_str();
  al_cmd->add_option("--dropout", al.model.dropout_rate)->capture_default_str();
  al_cmd->add_option("--lr", al.model.learning_rate)->capture_default_str();
  al_cmd->add_option("--epochs", al.model.epochs)->capture_default_str();
  al_cmd->add_option("--batch-size", al.model.batch_size)->capture_default_str();
  add_estimation_flags(al_cmd, al.est);
  al_cmd->add_option("--out", al.out, "Learning-curve CSV")->capture_default_str();
  al_cmd->add_option("--scores-dir", al.scores_dir, "Directory for per-run score dumps");
  al_cmd->add_flag("--wall-time,!--no-wall-time", al.wall_time,
                   "Record elapsed seconds in the curve CSV (off writes 0)");

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand(
      "plot-data", "Aggregate a curve CSV into mean/std accuracy per budget");
  plot_cmd->add_option("--curves", plot.curves)->required();
  plot_cmd->add_option("--out", plot.out)->required();

  std::string config_file;
  for (auto* cmd : {score_cmd, estimate_cmd, verify_cmd, al_cmd, plot_cmd}) {
    cmd->add_option("--config", config_file,
                    "Plain key=value file of long-option names; command-line flags win");
  }

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  }
  std::vector<const char*> argv;
  for (const auto& a : expanded) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("bnnmi");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (threads_opt->count() == 0) {
      if (const char* env = std::getenv("BNNMI_THREADS"); env && *env) {
        threads = parse_thread_count(env);
      }
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (*score_cmd) return cmd_score(score, out);
    if (*estimate_cmd) return cmd_estimate(estimate, out);
    if (*verify_cmd) return cmd_verify(verify_opt, threads, out);
    if (*al_cmd) return cmd_al_run(al, threads, out, err);
    if (*plot_cmd) return cmd_plot_data(plot, out);
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const io::IdxError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kInputError;
  } catch (const DegenerateError& e) {
    err << "estimation failed: " << e.what() << '\n';
    return kDegenerate;
  } catch (const EstimationError& e) {
    err << "estimation failed: " << e.what() << '\n';
    return kDegenerate;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const IndexError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
  return kInputError;
}

}  // namespace bnnmi::cli
