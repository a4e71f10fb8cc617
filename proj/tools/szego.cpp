#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "szego/cli.hpp"
#include "szego/errors.hpp"
#include "szego/parallel.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool refine = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "config file (.json or TOML)");
  cmd->add_option("--out", c.out, "write the table or report here instead of stdout");
  cmd->add_option("--seed", c.seed, "seed for samplers and Monte Carlo");
  cmd->add_option("--threads", c.threads, "OpenMP threads");
  cmd->add_flag("--refine", c.refine, "double the quadrature orders");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace szego;
  CLI::App app{"Szego kernel estimates on boundaries of convex model domains"};
  app.require_subcommand(1);
  Common common;

  CLI::App* poly = app.add_subcommand("poly", "polynomial tools");
  poly->require_subcommand(1);
  CLI::App* poly_check = poly->add_subcommand("check", "combined degree and convexity of [polynomial]");
  CLI::App* kernel = app.add_subcommand("kernel", "kernel evaluation");
  kernel->require_subcommand(1);
  CLI::App* kernel_eval = kernel->add_subcommand("eval", "evaluate S at the configured pairs");
  CLI::App* verify = app.add_subcommand("verify", "run the property suites");
  CLI::App* sweep = app.add_subcommand("sweep", "ratio |S| / bound over sampled pairs");
  std::vector<std::string> suites;
  verify->add_option("--suite", suites, "suite to run (repeatable): coeff_bound, bnw, appendix, decay");
  for (CLI::App* c : {poly_check, kernel_eval, verify, sweep}) add_common(c, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  try {
    cli::RunConfig cfg;
    if (!common.config.empty()) {
      cfg = cli::load_run_config(common.config);
    } else if (!verify->parsed()) {
      throw ConfigError("--config is required");
    }
    cli::Overrides o;
    o.seed = common.seed;
    o.threads = common.threads;
    o.refine = common.refine;
    o.out = common.out;
    o.suites = suites;
    cli::apply_overrides(cfg, o);
    if (cfg.threads > 0) kernels::set_threads(cfg.threads);

    std::string out_path = verify->parsed() || poly_check->parsed() ? cfg.json_out : cfg.csv_out;
    if (!common.out.empty()) out_path = common.out;
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot write '" + out_path + "'");
    }
    std::ostream& data = out_path.empty() ? std::cout : file;
    std::ostream& info = out_path.empty() ? std::cerr : std::cout;

    if (poly_check->parsed()) return cli::cmd_poly_check(cfg, data, info);
    if (kernel_eval->parsed()) return cli::cmd_kernel_eval(cfg, data, info);
    if (verify->parsed()) return cli::cmd_verify(cfg, data, info);
    return cli::cmd_sweep(cfg, data, info);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitFailure;
  }
}
