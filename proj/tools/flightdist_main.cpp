#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flightdist/commands.hpp"
#include "flightdist/quadrature.hpp"

using namespace flightdist;

int main(int argc, char** argv) {
  CLI::App app{"Distribution of the distance between two planar random flights"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<double> c1, c2, lambda1, lambda2, t, tol, alpha;
  std::vector<double> rs;
  std::optional<int> grid_n, threads;
  std::optional<std::uint64_t> mc_n, seed;
  std::optional<std::string> out_path, format;
  bool raw_samples = false;
  bool dump = false;

  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--c1", c1, "speed of the first flight");
  app.add_option("--c2", c2, "speed of the second flight");
  app.add_option("--lambda1", lambda1, "switching rate of the first flight");
  app.add_option("--lambda2", lambda2, "switching rate of the second flight");
  app.add_option("--t", t, "time horizon");
  app.add_option("--r", rs, "distance value(s); repeatable, comma lists allowed")
      ->delimiter(',');
  app.add_option("--grid-n", grid_n, "auto grid size over [0, (c1+c2)t]");
  app.add_option("--tol", tol,
                 "absolute tolerance for single integrals (double integrals run at 100x)");
  app.add_option("--mc-n", mc_n, "Monte Carlo sample count");
  app.add_option("--seed", seed, "RNG seed (FLIGHTDIST_SEED also works)");
  app.add_option("--alpha", alpha, "miss probability of the DKW confidence band");
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--format", format, "output format (csv)");
  app.add_option("--threads", threads, "worker threads");
  app.add_flag("--raw", raw_samples, "sample: dump raw draws instead of the ECDF");
  app.add_flag("--dump-config", dump, "print the merged configuration and exit");

  CLI::App* eval = app.add_subcommand("eval", "evaluate the distance law on a grid");
  CLI::App* validate = app.add_subcommand("validate", "run the self-check battery");
  CLI::App* sample = app.add_subcommand("sample", "draw Monte Carlo distances");
  for (CLI::App* sub : {eval, validate, sample}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
      cfg = parse_config_file(in, config_path);
    }
    apply_env_overrides(cfg);
    if (c1) cfg.c1 = *c1;
    if (c2) cfg.c2 = *c2;
    if (lambda1) cfg.lambda1 = *lambda1;
    if (lambda2) cfg.lambda2 = *lambda2;
    if (t) cfg.t = *t;
    if (!rs.empty()) cfg.r_grid = rs;
    if (grid_n) cfg.grid_n = *grid_n;
    if (tol) cfg.tol = *tol;
    if (mc_n) cfg.mc_n = static_cast<std::size_t>(*mc_n);
    if (seed) cfg.seed = *seed;
    if (alpha) cfg.alpha = *alpha;
    if (out_path) cfg.out = *out_path;
    if (format) cfg.format = *format;
    if (threads) cfg.threads = *threads;
    if (raw_samples) cfg.raw_samples = true;

    if (dump) {
      std::cout << dump_config(cfg);
      return kExitOk;
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!cfg.out.empty()) {
      file.open(cfg.out);
      if (!file) throw ConfigError("cannot open output file '" + cfg.out + "'");
      out = &file;
    }

    if (eval->parsed()) return cmd_eval(cfg, *out, std::cerr);
    if (validate->parsed()) return cmd_validate(cfg, *out, std::cerr);
    if (sample->parsed()) return cmd_sample(cfg, *out, std::cerr);

    std::cerr << app.help();
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}
