// Command-line front end: subcommands over JSON problem configs, emitting
// CSV tracks and JSON result envelopes. Exit codes: 0 success, 2 config
// or usage error, 3 numeric failure or failed verification.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "polarsturm/errors.hpp"

using polarsturm::ConfigError;
using polarsturm::NumericError;
using namespace polarsturm::cli;

int main(int argc, char** argv) {
  CLI::App app{"polar-angle toolkit for linear Hamiltonian systems"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  std::uint64_t seed_v = 0;
  double lambda_min_v = 0, lambda_max_v = 0;
  int count_v = 0, oracle_v = 0, branch_v = 0, k_v = 0;
  std::vector<int> branches_v;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "problem config (json)")
        ->required();
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--format", format, "output format override");
  };

  CLI::App* angles = app.add_subcommand(
      "angles", "lifted angle branches over tau, or over lambda at t");
  add_common(angles);
  angles->add_option("--lambda-min", lambda_min_v, "surface lower bound");
  angles->add_option("--lambda-max", lambda_max_v, "surface upper bound");

  CLI::App* conjugate = app.add_subcommand(
      "conjugate", "conjugate instants: angle crossings of det Q2 = 0");
  add_common(conjugate);

  CLI::App* morse = app.add_subcommand(
      "morse", "Morse index with branch counts and conjugate instants");
  add_common(morse);
  morse->add_option("--oracle", oracle_v,
                    "cross-check against the discretized form on m cells");

  CLI::App* sl_eigs = app.add_subcommand(
      "sl-eigs", "Sturm-Liouville eigenvalues by angle bisection");
  add_common(sl_eigs);
  sl_eigs->add_option("--branches", branches_v, "restrict to these branches");
  sl_eigs->add_option("--count", count_v, "eigenvalues per branch");
  sl_eigs->add_option("--lambda-min", lambda_min_v,
                      "start of the downward limit search");

  CLI::App* sl_fn = app.add_subcommand(
      "sl-eigenfunction", "eigenfunction samples for one (branch, k)");
  add_common(sl_fn);
  sl_fn->add_option("--branch", branch_v, "branch index (default 0)");
  sl_fn->add_option("--k", k_v, "eigenvalue number on the branch");
  sl_fn->add_option("--lambda-min", lambda_min_v,
                    "start of the downward limit search");

  CLI::App* verify = app.add_subcommand(
      "verify", "property checks for the configured problem");
  add_common(verify);
  verify->add_option("--seed", seed_v, "seed for randomized probes");
  verify->add_option("--lambda-min", lambda_min_v, "probe grid lower bound");
  verify->add_option("--lambda-max", lambda_max_v, "probe grid upper bound");

  CLI::App* classify = app.add_subcommand(
      "classify-n1", "classify or realize a scalar boundary template");
  add_common(classify);
  classify->add_option("--seed", seed_v, "seed for symplectic probes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  Invocation inv;
  inv.command = sub->get_name();
  inv.out_path = out_path;
  inv.format = format;
  inv.threads = thread_cap_from_env();
  auto given = [&](const char* name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--seed")) inv.seed = seed_v;
  if (given("--lambda-min")) inv.lambda_min = lambda_min_v;
  if (given("--lambda-max")) inv.lambda_max = lambda_max_v;
  if (given("--count")) inv.count = count_v;
  if (given("--oracle")) inv.oracle_m = oracle_v;
  if (given("--branches")) inv.branches = branches_v;
  if (given("--branch")) inv.branch = branch_v;
  if (given("--k")) inv.k = k_v;

  try {
    inv.cfg = load_config(config_path);
    return run_command(inv);
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const NumericError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}
