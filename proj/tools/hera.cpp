// Command-line front end: corrupt / train / eval / sweep.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include "hera/data.hpp"
#include "hera/eval.hpp"
#include "hera/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct InputPaths {
  std::string data;
  std::vector<std::string> csv;  // {features, labels} when used
};

void add_input_flags(CLI::App* cmd, InputPaths& in, const char* data_flag) {
  cmd->add_option(data_flag, in.data, "dataset in PLL format");
  cmd->add_option("--csv", in.csv, "features.csv labels.csv as an alternative input")
      ->expected(2);
}

hera::PartialLabelDataset load_input(const InputPaths& in) {
  if (!in.data.empty() && !in.csv.empty()) {
    throw hera::Error(hera::ErrorCode::InvalidArgument, "give either --data/--in or --csv, not both");
  }
  if (!in.csv.empty()) return hera::load_csv_dataset(in.csv[0], in.csv[1]);
  if (in.data.empty()) {
    throw hera::Error(hera::ErrorCode::InvalidArgument, "an input dataset is required (--data/--in or --csv)");
  }
  return hera::load_dataset(in.data);
}

void add_hyper_flags(CLI::App* cmd, hera::Hyperparams& hp) {
  cmd->add_option("--alpha", hp.alpha, "reconstruction weight");
  cmd->add_option("--beta", hp.beta, "weight decay");
  cmd->add_option("--mu", hp.mu, "l1 weight");
  cmd->add_option("--nu", hp.nu, "nuclear weight");
  cmd->add_option("--iter-max", hp.iter_max, "outer iteration cap");
  cmd->add_option("--loss-tol", hp.loss_tol, "objective decrement stop threshold");
  cmd->add_option("--inner-steps", hp.inner_steps, "gradient steps per W/P update");
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string mean_std(const hera::EvalResult& r) {
  return fmt("%.3f", r.mean) + "±" + fmt("%.3f", r.std_dev);
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void append_result_record(const std::string& path, const std::string& dataset,
                          const nlohmann::json& protocol, const nlohmann::json& value,
                          const std::string& method, const hera::EvalResult& r,
                          int folds, std::uint64_t seed) {
  nlohmann::json record{
      {"dataset", dataset}, {"protocol", protocol},   {"value", value},
      {"method", method},   {"mean", r.mean},         {"std", r.std_dev},
      {"folds", folds},     {"seed", seed},           {"timestamp", iso_timestamp()},
  };
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw hera::Error(hera::ErrorCode::IoError, "cannot open '" + path + "'");
  out << record.dump() << '\n';
  if (!out) throw hera::Error(hera::ErrorCode::IoError, "write to '" + path + "' failed");
}

std::vector<double> parse_grid(const std::string& s) {
  double start = 0.0, end = 0.0, step = 0.0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &start, &end, &step) != 3 || !(step > 0.0) ||
      end < start) {
    throw hera::Error(hera::ErrorCode::InvalidArgument,
                      "--grid must be start:end:step with step > 0, got '" + s + "'");
  }
  const auto count = static_cast<int>(std::floor((end - start) / step + 0.5)) + 1;
  if (count > 1000) {
    throw hera::Error(hera::ErrorCode::InvalidArgument, "grid has more than 1000 points");
  }
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = start + i * step;
  return grid;
}

int run_corrupt(const InputPaths& in, const std::string& out_path,
                const hera::CorruptionSpec& spec) {
  const hera::PartialLabelDataset clean = load_input(in);
  const hera::PartialLabelDataset corrupted = hera::corrupt(clean, spec);
  hera::save_dataset(corrupted, out_path);

  const auto n = corrupted.num_instances();
  long long corrupted_columns = 0;
  double total = 0.0;
  for (hera::Index j = 0; j < n; ++j) {
    const double size = corrupted.candidates.col(j).sum();
    total += size;
    if (size > 1.0) ++corrupted_columns;
  }
  std::printf("n=%lld q=%lld corrupted=%lld mean-candidates=%.3f\n",
              static_cast<long long>(n), static_cast<long long>(corrupted.num_labels()),
              corrupted_columns, total / static_cast<double>(n));
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int run_train(const InputPaths& in, const std::string& out_path,
              const hera::Hyperparams& hp) {
  const hera::PartialLabelDataset ds = load_input(in);
  const std::string log_path = out_path + ".log";

  std::string log = "# iteration\tobjective\tresidual-decomposition\tresidual-auxiliary\tlambda\trho\n";
  const hera::FitResult result =
      hera::fit(ds, hp, [&log](const hera::IterationLogEntry& e) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\n", e.iteration,
                      e.objective, e.residual_decomposition, e.residual_auxiliary,
                      e.lambda, e.rho);
        log += buf;
      });
  {
    std::ofstream out(log_path, std::ios::binary | std::ios::trunc);
    if (!out) throw hera::Error(hera::ErrorCode::IoError, "cannot open '" + log_path + "'");
    out << log;
  }
  hera::save_model({result.model, result.state.confidence, hp}, out_path);

  double objective = 0.0;
  double residual_d = 0.0;
  double residual_a = 0.0;
  if (!result.report.loss_trace.empty()) {
    objective = result.report.loss_trace.back();
    residual_d = result.report.feasibility_trace.back().first;
    residual_a = result.report.feasibility_trace.back().second;
  } else {
    objective = hera::augmented_objective(ds, result.model.weights, result.state, hp,
                                          hp.lambda0, hp.rho0)
                    .total;
  }
  std::printf("iterations=%d converged=%s objective=%.9g residual-decomposition=%.3e "
              "residual-auxiliary=%.3e\n",
              result.report.iterations, result.report.converged ? "yes" : "no", objective,
              residual_d, residual_a);
  std::printf("model: %s\nlog: %s\n", out_path.c_str(), log_path.c_str());
  return 0;
}

int run_eval(const InputPaths& in, const hera::Hyperparams& hp,
             const hera::EvalOptions& opts, const std::string& out_path,
             const std::string& baseline) {
  if (!baseline.empty() && baseline != "plknn") {
    throw hera::Error(hera::ErrorCode::InvalidArgument,
                      "unknown baseline '" + baseline + "' (supported: plknn)");
  }
  hera::EvalOptions local = opts;
  local.method = baseline.empty() ? hera::Method::Hera : hera::Method::PlKnn;
  const char* method_name = baseline.empty() ? "hera" : "plknn";

  const hera::PartialLabelDataset ds = load_input(in);
  const hera::EvalResult result = hera::cross_validate(ds, hp, local);

  std::printf("method=%s folds=%d seed=%llu\n", method_name, local.folds,
              static_cast<unsigned long long>(local.seed));
  std::string folds_line = "fold-accuracy:";
  for (const double a : result.per_fold_accuracy) folds_line += " " + fmt("%.4f", a);
  std::printf("%s\n", folds_line.c_str());
  std::printf("accuracy: %s\n", mean_std(result).c_str());

  if (!out_path.empty()) {
    const std::string dataset = in.data.empty() ? in.csv[0] : in.data;
    append_result_record(out_path, dataset, nullptr, nullptr, method_name, result,
                         local.folds, local.seed);
  }
  return 0;
}

int run_sweep(const InputPaths& in, const std::string& protocol_name,
              const std::string& grid_spec, const hera::Hyperparams& hp, int folds,
              std::uint64_t seed, const std::string& out_path) {
  hera::SweepProtocol protocol;
  if (protocol_name == "r1") protocol = hera::SweepProtocol::R1;
  else if (protocol_name == "r2") protocol = hera::SweepProtocol::R2;
  else if (protocol_name == "r3") protocol = hera::SweepProtocol::R3;
  else if (protocol_name == "eps") protocol = hera::SweepProtocol::Eps;
  else {
    throw hera::Error(hera::ErrorCode::InvalidArgument,
                      "--protocol must be one of r1, r2, r3, eps");
  }
  const std::vector<double> grid = parse_grid(grid_spec);
  const hera::PartialLabelDataset clean = load_input(in);
  const auto points = hera::run_sweep(clean, protocol, grid, hp, folds, seed);

  std::string table = "value\thera\tplknn\n";
  for (const auto& point : points) {
    table += fmt("%g", point.value) + "\t" + mean_std(point.hera) + "\t" +
             mean_std(point.plknn) + "\n";
  }
  std::fputs(table.c_str(), stdout);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw hera::Error(hera::ErrorCode::IoError, "cannot open '" + out_path + "'");
  out << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partial-label learning with a sparse plus low-rank candidate decomposition"};
  app.require_subcommand(1);

  // corrupt
  InputPaths corrupt_in;
  std::string corrupt_out;
  double corrupt_p = 0.0;
  int corrupt_r = 1;
  double corrupt_eps = 0.0;
  std::uint64_t corrupt_seed = 0;
  CLI::App* cmd_corrupt = app.add_subcommand("corrupt", "add false candidate labels to a fully labeled dataset");
  add_input_flags(cmd_corrupt, corrupt_in, "--in");
  cmd_corrupt->add_option("--out", corrupt_out, "output dataset path")->required();
  cmd_corrupt->add_option("--p", corrupt_p, "fraction of instances to corrupt")->required();
  cmd_corrupt->add_option("--r", corrupt_r, "false labels per corrupted instance")->required();
  CLI::Option* eps_opt = cmd_corrupt->add_option(
      "--eps", corrupt_eps, "coupling rate; switches to the p=1, r=1 coupling protocol");
  cmd_corrupt->add_option("--seed", corrupt_seed, "RNG seed")->required();

  // train
  InputPaths train_in;
  std::string train_out;
  hera::Hyperparams train_hp;
  CLI::App* cmd_train = app.add_subcommand("train", "fit the model and write it to a file");
  add_input_flags(cmd_train, train_in, "--data");
  cmd_train->add_option("--out", train_out, "output model path")->required();
  add_hyper_flags(cmd_train, train_hp);

  // eval
  InputPaths eval_in;
  hera::Hyperparams eval_hp;
  hera::EvalOptions eval_opts;
  std::string eval_out;
  std::string eval_baseline;
  CLI::App* cmd_eval = app.add_subcommand("eval", "k-fold cross-validated accuracy");
  add_input_flags(cmd_eval, eval_in, "--data");
  cmd_eval->add_option("--folds", eval_opts.folds, "fold count")->required();
  cmd_eval->add_option("--seed", eval_opts.seed, "fold RNG seed")->required();
  cmd_eval->add_option("--out", eval_out, "append a JSON-lines result record here");
  add_hyper_flags(cmd_eval, eval_hp);
  cmd_eval->add_option("--k", eval_hp.k_neighbors, "prediction neighbor count");
  cmd_eval->add_option("--baseline", eval_baseline, "evaluate a baseline instead (plknn)");
  cmd_eval->add_flag("--standardize", eval_opts.standardize,
                     "standardize features with training-fold statistics");
  cmd_eval->add_flag("--grid-alpha", eval_opts.grid_alpha,
                     "pick alpha per fold by inner 3-fold cross-validation");

  // sweep
  InputPaths sweep_in;
  std::string sweep_protocol;
  std::string sweep_grid;
  hera::Hyperparams sweep_hp;
  int sweep_folds = 10;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "corruption-level sweep; corruption seed at grid index i is seed + i");
  add_input_flags(cmd_sweep, sweep_in, "--data");
  cmd_sweep->add_option("--protocol", sweep_protocol, "r1, r2, r3 or eps")->required();
  cmd_sweep->add_option("--grid", sweep_grid, "start:end:step")->required();
  cmd_sweep->add_option("--folds", sweep_folds, "fold count")->required();
  cmd_sweep->add_option("--seed", sweep_seed, "RNG seed")->required();
  cmd_sweep->add_option("--out", sweep_out, "table output path")->required();
  add_hyper_flags(cmd_sweep, sweep_hp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_corrupt->parsed()) {
      hera::CorruptionSpec spec;
      spec.p = corrupt_p;
      spec.r = corrupt_r;
      if (eps_opt->count() > 0) spec.epsilon = corrupt_eps;
      spec.seed = corrupt_seed;
      return run_corrupt(corrupt_in, corrupt_out, spec);
    }
    if (cmd_train->parsed()) {
      return run_train(train_in, train_out, train_hp);
    }
    if (cmd_eval->parsed()) {
      return run_eval(eval_in, eval_hp, eval_opts, eval_out, eval_baseline);
    }
    if (cmd_sweep->parsed()) {
      return run_sweep(sweep_in, sweep_protocol, sweep_grid, sweep_hp, sweep_folds,
                       sweep_seed, sweep_out);
    }
    return 2;
  } catch (const hera::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case hera::ErrorCode::SvdFailure:
      case hera::ErrorCode::NonFiniteIterate:
        return 4;
      case hera::ErrorCode::BadHyperparams:
      case hera::ErrorCode::InvalidArgument:
      case hera::ErrorCode::RTooLarge:
      case hera::ErrorCode::BadFoldCount:
      case hera::ErrorCode::KTooLarge:
      case hera::ErrorCode::NegativeThreshold:
        return 2;
      default:
        return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
