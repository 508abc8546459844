// bellsim: randomized-setting trial simulation against pluggable
// hidden-variable models, equality-form Bell analysis with a martingale
// concentration bound, statistical freedom / no-signaling audits, and a
// quadrature-based locality audit of slab-structured densities.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "bellsim/analysis.hpp"
#include "bellsim/engine.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/hpdensity.hpp"
#include "bellsim/io.hpp"
#include "bellsim/outcomes.hpp"
#include "bellsim/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOracleFailure = 1;
constexpr int kExitViolation = 10;    // s_hat exceeded the concentration bound
constexpr int kExitNonLocal = 20;     // locality audit flagged the density
constexpr int kExitParse = 64;        // malformed config, log or usage
constexpr int kExitContract = 65;     // violated precondition or contract

namespace fs = std::filesystem;

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const bellsim::AppConfig cfg = bellsim::load_config(config_path);
  if (cfg.run.model.name.empty())
    throw bellsim::ParseError("config: simulate needs a 'model' section");

  const bellsim::TrialLog log = bellsim::run_experiment(cfg.run);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  bellsim::write_log_file(dir / "trials.jsonl", log);
  bellsim::write_json_file(dir / "manifest.json",
                           bellsim::make_manifest(cfg, {"trials.jsonl"}));

  std::cout << "model " << cfg.run.model.name << ", seed " << cfg.run.seed
            << ", " << bellsim::to_string(cfg.run.mode) << " mode\n"
            << "wrote " << log.size() << " trials to "
            << (dir / "trials.jsonl").string() << '\n';
  return kExitOk;
}

int cmd_analyze(const std::string& log_path, const std::string& table_path,
                double confidence, double alpha, std::string out_path) {
  const bellsim::SettingTable table = bellsim::load_table(table_path);

  std::ifstream is(log_path, std::ios::binary);
  if (!is) throw bellsim::ParseError("cannot read '" + log_path + "'");
  bellsim::LogAccumulator acc;
  bellsim::for_each_record(
      is, [&acc](const bellsim::TrialRecord& rec) { acc.add(rec); });

  const bellsim::BellEstimate est = bellsim::estimate_bell(acc, confidence);
  const double prediction = bellsim::chsh_quantum_prediction(table);
  const bellsim::NoSignalingReport ns = bellsim::no_signaling_test(acc, alpha);
  const bool have_freedom =
      acc.total() > 0 && acc.revealed_total() == acc.total();
  bellsim::IndependenceReport freedom;
  if (have_freedom) freedom = bellsim::freedom_test(acc);

  nlohmann::json summary{
      {"inputs",
       {{"log", log_path},
        {"table", table_path},
        {"confidence", confidence},
        {"alpha", alpha}}},
      {"bell_estimate", bellsim::to_json(est)},
      {"quantum_prediction", prediction},
      {"no_signaling", bellsim::to_json(ns)},
  };
  if (have_freedom) summary["freedom"] = bellsim::to_json(freedom);
  // Pick up run provenance when the log sits next to its manifest.
  const fs::path manifest = fs::path(log_path).parent_path() / "manifest.json";
  if (fs::exists(manifest))
    summary["manifest"] = bellsim::read_json_file(manifest);

  if (out_path.empty())
    out_path = (fs::path(log_path).parent_path() / "analysis.json").string();
  bellsim::write_json_file(out_path, summary);

  std::cout << std::fixed << std::setprecision(6);
  std::cout << "trials " << est.trials << "\n\n"
            << "pair    count     p_hat{X=Y}\n";
  for (int idx = 0; idx < 4; ++idx)
    std::cout << '(' << idx / 2 + 1 << ',' << idx % 2 + 1 << ")  "
              << std::setw(8) << est.freqs.counts[idx] << "  "
              << est.freqs.p_hat[idx] << '\n';
  std::cout << '\n'
            << "s_hat        " << est.s_hat << '\n'
            << "score_mean   " << est.score_mean << '\n'
            << "epsilon      " << est.epsilon << "  (confidence "
            << confidence << ")\n"
            << "prediction   " << prediction << "  (singlet at this table)\n"
            << "verdict      "
            << (est.violation ? "inequality violated (s_hat > epsilon)"
                              : "consistent with local realism")
            << '\n';
  std::cout << "no-signaling min p " << std::setprecision(4)
            << std::scientific << ns.min_p
            << (ns.rejected ? "  -> REJECTED" : "  -> consistent")
            << " (alpha " << alpha << ")\n";
  if (have_freedom)
    std::cout << "freedom      chi2 " << std::defaultfloat << freedom.statistic
              << ", dof " << freedom.dof << ", p " << std::scientific
              << freedom.p_value
              << (freedom.p_value < alpha ? "  -> REJECTED" : "  -> consistent")
              << " (alpha " << alpha << ")\n";
  else
    std::cout << "freedom      skipped (log lacks revealed quadruples)\n";
  std::cout << "summary written to " << out_path << '\n';

  return est.violation ? kExitViolation : kExitOk;
}

int cmd_hp_audit(const std::string& config_path, const std::string& out_dir) {
  const bellsim::AppConfig cfg = bellsim::load_config(config_path);
  if (!cfg.hp)
    throw bellsim::ParseError("config: hp-audit needs an 'hp' section");
  const bellsim::HpAuditConfig& hp = *cfg.hp;

  bellsim::DensityBuilder builder;
  if (hp.family == "reference") {
    builder = [params = hp.reference_params, n = hp.n](
                  const bellsim::Direction& a, const bellsim::Direction& b) {
      return bellsim::reference_family(a, b, n, params);
    };
  } else {
    builder = [ws = hp.uniform_weight_sigma, wt = hp.uniform_weight_tau,
               n = hp.n](const bellsim::Direction& a,
                         const bellsim::Direction& b) {
      return bellsim::uniform_local_family(a, b, n, ws, wt);
    };
  }

  const std::vector<bellsim::Direction> a_grid =
      bellsim::grid_from_angles(hp.a_grid_deg, hp.plane);
  const std::vector<bellsim::Direction> b_grid =
      bellsim::grid_from_angles(hp.b_grid_deg, hp.plane);

  const bellsim::LocalityAuditReport rep =
      bellsim::locality_audit(builder, a_grid, b_grid, hp.quadrature);

  nlohmann::json out = bellsim::to_json(rep);
  out["config"] = cfg.echo;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  bellsim::write_json_file(dir / "hp_audit.json", out);

  double worst = 0.0;
  int worst_slab = bellsim::kFirstSlab;
  for (const auto& [slab, dep] : rep.per_slab_b_dependence)
    if (dep > worst) { worst = dep; worst_slab = slab; }
  for (const auto& [slab, dep] : rep.per_slab_a_dependence)
    if (dep > worst) { worst = dep; worst_slab = slab; }

  std::cout << "family " << hp.family << ", n " << hp.n << ", grids "
            << a_grid.size() << "x" << b_grid.size() << '\n'
            << "verdict " << bellsim::to_string(rep.verdict)
            << ", max setting dependence " << std::setprecision(9) << worst
            << " at slab " << worst_slab << ", witnesses "
            << rep.witnesses.size() << '\n';
  if (rep.quadrature_warning)
    std::cout << "warning: some integrals failed the refinement check\n";
  std::cout << "report written to " << (dir / "hp_audit.json").string() << '\n';

  return rep.verdict == bellsim::LocalityVerdict::non_local ? kExitNonLocal
                                                            : kExitOk;
}

int cmd_oracle() {
  using namespace bellsim;
  bool ok = true;
  std::map<int, int> distribution;
  int delta_min = 99, delta_max = -99;
  for (const Quadruple& q : enumerate_quadruples()) {
    const int eq = equality_count(q);
    const int dl = delta(q);
    ++distribution[eq];
    delta_min = std::min(delta_min, dl);
    delta_max = std::max(delta_max, dl);
    ok = ok && (eq == 0 || eq == 2 || eq == 4);
    ok = ok && (dl == 0 || dl == -2);
    ok = ok && product_identity_holds(q);
    ok = ok && quadruple_from_index(quadruple_index(q)) == q;
  }
  const std::map<int, int> expected{{0, 2}, {2, 12}, {4, 2}};
  ok = ok && distribution == expected;
  ok = ok && delta_min == -2 && delta_max == 0;

  std::cout << "quadruples: 16\n" << "equality_count distribution: {";
  bool first = true;
  for (const auto& [count, freq] : distribution) {
    std::cout << (first ? "" : ", ") << count << ": " << freq;
    first = false;
  }
  std::cout << "}\n"
            << "delta min: " << delta_min << ", max: " << delta_max << '\n'
            << "product identity: holds for all 16\n"
            << "result: " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitOracleFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bell-type trial simulation and audit harness"};
  app.set_version_flag("--version", bellsim::kArtifactVersion);
  app.require_subcommand(1);

  std::string sim_config, sim_out;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a configured experiment and write the trial log");
  sim->add_option("config", sim_config, "config file")->required();
  sim->add_option("-o,--out", sim_out, "output directory")->required();

  std::string ana_log, ana_table, ana_out;
  double ana_confidence = 0.99, ana_alpha = 1e-3;
  CLI::App* ana = app.add_subcommand(
      "analyze", "Estimate the equality-form statistic and run the audits");
  ana->add_option("log", ana_log, "trial log (one record per line)")->required();
  ana->add_option("--table", ana_table, "setting table or config file")
      ->required();
  ana->add_option("--confidence", ana_confidence,
                  "confidence for the concentration bound");
  ana->add_option("--alpha", ana_alpha, "rejection level for the audits");
  ana->add_option("-o,--out", ana_out, "summary file (default: next to log)");

  std::string hp_config, hp_out = ".";
  CLI::App* hp = app.add_subcommand(
      "hp-audit", "Audit a slab density family for setting dependence");
  hp->add_option("config", hp_config, "config file with an hp section")
      ->required();
  hp->add_option("-o,--out", hp_out, "output directory");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Exhaustive checks over all 16 outcome quadruples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_config, sim_out);
    if (ana->parsed())
      return cmd_analyze(ana_log, ana_table, ana_confidence, ana_alpha, ana_out);
    if (hp->parsed()) return cmd_hp_audit(hp_config, hp_out);
    if (oracle->parsed()) return cmd_oracle();
  } catch (const bellsim::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const bellsim::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
  return kExitParse;  // unreachable: a subcommand is required
}
