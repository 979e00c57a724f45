#include <CLI11.hpp>
#include <iostream>

#include "dmafas/cli/commands.hpp"

namespace {

const char *describe(const std::string &verb) {
  if (verb == "validate") return "check the design and config without running anything";
  if (verb == "field") return "field magnitude and phase along the waveguide axis";
  if (verb == "pattern") return "directivity pattern, azimuth cut or 3d grid";
  if (verb == "covariance") return "FAS covariance and correlation of the codebook";
  if (verb == "eigen") return "eigen-spectra of the FAS and channel covariances";
  if (verb == "codebook") return "exhaustive beam-steering codebook search";
  if (verb == "outage") return "FAMA outage curves: dense, reduced and ideal";
  if (verb == "calibrate") return "fit Y_rad to measured axis field samples";
  return "";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"DMA fluid antenna simulator"};
  app.require_subcommand(1);
  dmafas::cli::RunOptions opts;
  std::string out;
  std::uint64_t seed = 0;

  for (const auto &verb : dmafas::cli::verbs()) {
    auto *sub = app.add_subcommand(verb, describe(verb));
    sub->add_option("--config", opts.config, "experiment config (YAML)");
    sub->add_option("--manifest", opts.manifest, "replay the options of a previous run");
    if (verb == "validate") {
      sub->add_option("--termination", opts.termination, "short, matched or load");
      continue;
    }
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "root seed override");
    sub->add_option("--termination", opts.termination, "short, matched or load");
    sub->add_option("--threads", opts.threads, "worker threads (0: all cores)");
    if (verb == "field" || verb == "pattern" || verb == "calibrate")
      sub->add_option("--conf", opts.conf, "configuration name or bit mask");
    if (verb == "pattern")
      sub->add_option("--cut", opts.cut, "azimuth or 3d");
    if (verb == "calibrate")
      sub->add_option("--samples", opts.samples, "axis field samples CSV");
    if (verb == "covariance" || verb == "eigen" || verb == "outage" || verb == "codebook")
      sub->add_option("--codebook", opts.codebook, "codebook CSV instead of a fresh search");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  auto *sub = app.get_subcommands().front();
  if (auto *o = sub->get_option_no_throw("--out"); o && o->count())
    opts.out = out;
  if (auto *o = sub->get_option_no_throw("--seed"); o && o->count())
    opts.seed = seed;
  return dmafas::cli::run(sub->get_name(), opts, std::cout, std::cerr);
}
