// mps — moving-partial-sum CLT laboratory command line.
//
// Subcommands: generate, variance, conditions, clt, fdd, newman, ruin.
// Every run writes its reports into --out; identical config and seed produce
// byte-identical report bodies.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mps/conditions.hpp"
#include "mps/errors.hpp"
#include "mps/model.hpp"
#include "mps/report.hpp"
#include "mps/ruin.hpp"
#include "mps/stats.hpp"
#include "mps/sums.hpp"
#include "mps/weakconv.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string model_file;
  std::string scenario_file;
  std::int64_t n = 100;
  std::int64_t p = 0;
  std::string ell = "auto";  // "auto" or a fixed integer
  double delta = 1.0;
  double eps = 1.0;
  std::vector<double> grid{0.25, 0.5, 1.0};
  std::size_t replicates = 2000;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  unsigned threads = 1;
  std::int64_t k = 2;         // newman coordinate count
  std::int64_t horizon = 50;  // ruin periods
};

std::ofstream open_output(const Options& options, const std::string& name) {
  fs::create_directories(options.out_dir);
  const fs::path path = fs::path(options.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  return out;
}

std::optional<std::int64_t> parse_ell(const Options& options) {
  if (options.ell == "auto") return std::nullopt;
  try {
    return std::stoll(options.ell);
  } catch (const std::exception&) {
    throw mps::PreconditionError("--ell: expected 'auto' or an integer");
  }
}

// Resolved-config header, embedded in every text report for auditability.
void write_config(std::ostream& out, const std::string& subcommand, const Options& options) {
  out << "command: " << subcommand << '\n';
  if (!options.model_file.empty()) out << "model_file: " << options.model_file << '\n';
  if (!options.scenario_file.empty()) out << "scenario_file: " << options.scenario_file << '\n';
  out << "n: " << options.n << "\np: " << options.p << "\nell: " << options.ell
      << "\ndelta: " << mps::format_real(options.delta)
      << "\neps: " << mps::format_real(options.eps) << "\ngrid:";
  for (double t : options.grid) out << ' ' << mps::format_real(t);
  out << "\nR: " << options.replicates << "\nseed: " << options.seed
      << "\nthreads: " << options.threads << '\n';
}

int run_generate(const Options& options) {
  const auto model = mps::load_model(options.model_file);
  auto csv = open_output(options, "path.csv");
  csv << "replicate,k,value\n";
  for (std::size_t r = 0; r < options.replicates; ++r) {
    const auto path = mps::gen_path(model, options.p, options.n, options.seed, r);
    for (std::int64_t k = path.first; k <= path.last(); ++k)
      csv << r << ',' << k << ',' << mps::format_real(path.at(k)) << '\n';
  }
  return 0;
}

int run_variance(const Options& options) {
  const auto model = mps::load_model(options.model_file);
  const mps::Window window{options.p, options.n};
  const double exact = mps::window_variance(model, window);
  const auto mc = mps::window_variance_mc(model, window, options.replicates, options.seed);
  mps::ConditionReport report;
  report.context.model_id = model.id;
  report.context.n = options.n;
  report.context.p = options.p;
  report.context.seed = options.seed;
  report.add("s2_exact", exact);
  report.add("s2_mc", mc.value);
  report.add("s2_mc_stderr", mc.stderr_value);
  auto csv = open_output(options, "report.csv");
  mps::write_condition_csv(csv, report);
  auto txt = open_output(options, "report.txt");
  write_config(txt, "variance", options);
  mps::write_condition_text(txt, report);
  return 0;
}

int run_conditions(const Options& options) {
  const auto model = mps::load_model(options.model_file);
  const mps::Window window{options.p, options.n};
  auto report = mps::condition_report(model, window, parse_ell(options), options.delta,
                                      options.eps);
  report.context.seed = options.seed;
  auto csv = open_output(options, "report.csv");
  mps::write_condition_csv(csv, report);
  auto txt = open_output(options, "report.txt");
  write_config(txt, "conditions", options);
  mps::write_condition_text(txt, report);
  return 0;
}

int run_clt(const Options& options) {
  const auto model = mps::load_model(options.model_file);
  const mps::Window window{options.p, options.n};
  const auto ensemble = mps::mc_normalized_sums(model, window, options.replicates,
                                                options.seed, options.threads);
  const double ks = mps::ks_to_normal(ensemble);
  const double cvm = mps::cvm_to_normal(ensemble);
  const double ks_cutoff =
      1.5 * 1.36 / std::sqrt(static_cast<double>(options.replicates));

  mps::ConditionReport report;
  report.context.model_id = model.id;
  report.context.n = options.n;
  report.context.p = options.p;
  report.context.seed = options.seed;
  report.add("ks", ks, ks_cutoff, ks <= ks_cutoff);
  report.add("cvm", cvm);
  static const std::vector<double> kCfGrid{-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0};
  std::vector<std::vector<double>> points;
  for (double t : kCfGrid) points.push_back({t});
  const auto cf = mps::ecf(ensemble, points);
  for (std::size_t i = 0; i < cf.points.size(); ++i) {
    const double t = cf.points[i][0];
    report.add("ecf_re(t=" + mps::format_real(t) + ")", cf.values[i].real());
    report.add("ecf_gauss_target(t=" + mps::format_real(t) + ")", std::exp(-0.5 * t * t));
  }
  auto csv = open_output(options, "report.csv");
  mps::write_condition_csv(csv, report);
  auto txt = open_output(options, "report.txt");
  write_config(txt, "clt", options);
  mps::write_condition_text(txt, report);
  auto ens = open_output(options, "ensemble.csv");
  mps::write_ensemble_csv(ens, ensemble);
  return 0;
}

int run_fdd(const Options& options) {
  const auto model = mps::load_model(options.model_file);
  const auto ensemble = mps::fdd_ensemble(model, options.n, options.grid, options.replicates,
                                          options.seed, options.threads);
  const auto scaling = mps::scaling_ratio(model, options.n, options.grid);
  const auto check = mps::fdd_covariance_check(ensemble, scaling);

  mps::ConditionReport report;
  report.context.model_id = model.id;
  report.context.n = options.n;
  report.context.seed = options.seed;
  for (std::size_t g = 0; g < scaling.grid.size(); ++g)
    report.add("a_hat(t=" + mps::format_real(scaling.grid[g]) + ")", scaling.values[g]);
  for (std::size_t i = 0; i < check.empirical.size(); ++i)
    for (std::size_t j = 0; j < check.empirical.size(); ++j) {
      const std::string suffix = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      report.add("cov_empirical" + suffix, check.empirical[i][j]);
      report.add("cov_target" + suffix, check.target[i][j]);
    }
  report.add("max_abs_deviation", check.max_abs_deviation);
  auto csv = open_output(options, "report.csv");
  mps::write_condition_csv(csv, report);
  auto txt = open_output(options, "report.txt");
  write_config(txt, "fdd", options);
  mps::write_condition_text(txt, report);
  auto ens = open_output(options, "ensemble.csv");
  mps::write_ensemble_csv(ens, ensemble);
  return 0;
}

int run_newman(const Options& options) {
  const auto model = mps::load_model(options.model_file);
  static const std::vector<double> kCfGrid{-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0};
  std::vector<std::vector<double>> points;
  for (double t : kCfGrid)
    points.emplace_back(static_cast<std::size_t>(options.k), t);
  const auto report = mps::newman_verify(model, static_cast<std::size_t>(options.k), points,
                                         options.replicates, options.seed, options.threads);
  auto txt = open_output(options, "report.txt");
  write_config(txt, "newman", options);
  txt << "slack: " << mps::format_real(report.slack) << '\n';
  auto csv = open_output(options, "report.csv");
  csv << "statistic,n,ell,delta,eps,value,threshold,verdict\n";
  for (const auto& check : report.checks) {
    std::string label = "gap(t=";
    for (std::size_t i = 0; i < check.point.size(); ++i)
      label += (i ? "," : "") + mps::format_real(check.point[i]);
    label += ")";
    csv << mps::csv_field(label) << ',' << options.k << ",,,," << mps::format_real(check.gap)
        << ',' << mps::format_real(check.bound + report.slack) << ','
        << (check.holds ? "pass" : "fail") << '\n';
    txt << label << " gap=" << mps::format_real(check.gap)
        << " bound=" << mps::format_real(check.bound);
    if (check.exact_gap >= 0.0) txt << " exact_gap=" << mps::format_real(check.exact_gap);
    txt << (check.holds ? " [pass]" : " [fail]") << '\n';
  }
  txt << "all_hold: " << (report.all_hold ? "true" : "false") << '\n';
  return 0;
}

mps::SurplusModel load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw mps::SchemaError("scenario file: cannot open " + file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw mps::SchemaError(std::string("scenario file: ") + e.what());
  }
  mps::SurplusModel scenario;
  scenario.initial_capital = j.value("u", 0.0);
  scenario.premium_rate = j.value("c", 0.0);
  scenario.period_length = j.value("t0", 1.0);
  if (!j.contains("claims")) throw mps::SchemaError("claims: missing");
  scenario.claims = mps::parse_model(j.at("claims").dump());
  scenario.claim_shift = j.value("claim_shift", 0.0);
  const std::string count = j.value("count", "one-per-period");
  if (count == "one-per-period") {
    scenario.count = mps::CountProcess::OnePerPeriod;
  } else if (count == "poisson") {
    scenario.count = mps::CountProcess::Poisson;
    scenario.lambda = j.value("lambda", 1.0);
  } else {
    throw mps::SchemaError("count: expected one-per-period or poisson");
  }
  mps::validate(scenario);
  return scenario;
}

int run_ruin(const Options& options) {
  const auto scenario = load_scenario(options.scenario_file);
  const auto exact = mps::ruin_probability(scenario, options.horizon, options.replicates,
                                           options.seed, mps::RuinMethod::ExactSim);
  const auto brownian = mps::ruin_probability(scenario, options.horizon, options.replicates,
                                              options.seed, mps::RuinMethod::BrownianApprox);
  mps::ConditionReport report;
  report.context.model_id = scenario.claims.id;
  report.context.n = options.horizon;
  report.context.seed = options.seed;
  report.add("ruin_exact_sim", exact.probability);
  report.add("ruin_exact_sim_stderr", exact.stderr_value);
  report.add("ruin_brownian_approx", brownian.probability);
  report.add("ruin_brownian_approx_stderr", brownian.stderr_value);
  auto csv = open_output(options, "report.csv");
  mps::write_condition_csv(csv, report);
  auto txt = open_output(options, "report.txt");
  write_config(txt, "ruin", options);
  txt << "note: brownian-approx centers the claims internally and carries the mean as drift\n";
  mps::write_condition_text(txt, report);
  auto path_csv = open_output(options, "path.csv");
  path_csv << "period,surplus\n";
  const auto path = mps::simulate_surplus(scenario, options.horizon, options.seed, 0);
  for (std::size_t i = 0; i < path.size(); ++i)
    path_csv << (i + 1) << ',' << mps::format_real(path[i]) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moving-partial-sum central limit theorem laboratory"};
  app.require_subcommand(1);
  app.set_config("--config");

  Options options;
  const auto add_common = [&options](CLI::App* cmd, bool needs_model) {
    if (needs_model)
      cmd->add_option("--model", options.model_file, "model description file")->required();
    cmd->add_option("--n", options.n, "window length n");
    cmd->add_option("--p", options.p, "window offset p(n)");
    cmd->add_option("--ell", options.ell, "block rule: 'auto' (n^{1/3}) or a fixed length");
    cmd->add_option("--delta", options.delta, "Lyapounov exponent delta");
    cmd->add_option("--eps", options.eps, "Lindeberg threshold eps");
    cmd->add_option("--grid", options.grid, "time grid in (0,1]")->delimiter(',');
    cmd->add_option("--R", options.replicates, "replicate count");
    cmd->add_option("--seed", options.seed, "64-bit seed");
    cmd->add_option("--out", options.out_dir, "output directory");
    cmd->add_option("--threads", options.threads, "worker threads");
  };

  auto* generate = app.add_subcommand("generate", "sample paths to CSV");
  add_common(generate, true);
  auto* variance = app.add_subcommand("variance", "exact and Monte Carlo window variance");
  add_common(variance, true);
  auto* conditions = app.add_subcommand("conditions", "convergence condition statistics");
  add_common(conditions, true);
  auto* clt = app.add_subcommand("clt", "Monte Carlo check of S'_n/s'_n against N(0,1)");
  add_common(clt, true);
  auto* fdd = app.add_subcommand("fdd", "finite-dimensional invariance principle check");
  add_common(fdd, true);
  auto* newman = app.add_subcommand("newman", "characteristic-function covariance bound");
  add_common(newman, true);
  newman->add_option("--k", options.k, "number of leading coordinates");
  auto* ruin = app.add_subcommand("ruin", "surplus-process demo");
  add_common(ruin, false);
  ruin->add_option("--scenario", options.scenario_file, "scenario file")->required();
  ruin->add_option("--horizon", options.horizon, "periods to simulate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    std::cerr << "valid subcommands: generate variance conditions clt fdd newman ruin\n";
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return run_generate(options);
    if (variance->parsed()) return run_variance(options);
    if (conditions->parsed()) return run_conditions(options);
    if (clt->parsed()) return run_clt(options);
    if (fdd->parsed()) return run_fdd(options);
    if (newman->parsed()) return run_newman(options);
    if (ruin->parsed()) return run_ruin(options);
  } catch (const mps::SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mps::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  }
  return kExitUsage;
}
