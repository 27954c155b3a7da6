// horolab: runs one experiment config and writes report.json plus CSV tables.
// Exit status: 0 all checks pass, 1 a check failed, 2 invalid config.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "horolab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"horolab experiment runner"};
  std::string config;
  std::string out_dir = "horolab_out";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  int verbosity = 0;
  app.add_option("-c,--config", config, "experiment config (JSON)")->required();
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("-s,--seed", seed, "override the config seed");
  app.add_option("-w,--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_flag("-v,--verbose", verbosity, "print check summaries (repeat for witnesses)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  horolab::RunOptions opts;
  opts.seed = seed;
  opts.workers = workers;
  opts.verbosity = verbosity;
  const auto r = horolab::run_experiment_file(config, opts);
  try {
    horolab::emit_report(r, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "horolab: " << e.what() << "\n";
    return 2;
  }

  if (r.exit_status == 2) {
    std::cerr << "horolab: invalid config: " << r.report.value("error", std::string{}) << "\n";
    return 2;
  }
  for (const auto& c : r.report.at("checks")) {
    const bool pass = c.at("pass").get<bool>();
    if (verbosity > 0 || !pass)
      std::printf("%-4s %-32s checked=%zu violations=%zu\n", pass ? "ok" : "FAIL",
                  c.at("name").get<std::string>().c_str(), c.at("checked").get<std::size_t>(),
                  c.at("violation_count").get<std::size_t>());
    if (!pass && verbosity > 1)
      for (const auto& w : c.at("witnesses"))
        std::printf("     %s lhs=%.17g rhs=%.17g\n", w.at("relation").get<std::string>().c_str(),
                    w.at("lhs").is_null() ? 0.0 : w.at("lhs").get<double>(),
                    w.at("rhs").is_null() ? 0.0 : w.at("rhs").get<double>());
  }
  std::printf("%s: %s (exit %d, %.2fs)\n", r.report.at("experiment").get<std::string>().c_str(),
              r.exit_status == 0 ? "pass" : "fail", r.exit_status, r.wall_seconds);
  return r.exit_status;
}
