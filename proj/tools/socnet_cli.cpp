// socnet command line: synthetic data generation, input validation and the
// staged analysis pipeline.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "socnet/error.hpp"
#include "socnet/io.hpp"
#include "socnet/pipeline.hpp"
#include "socnet/synthgen.hpp"

namespace fs = std::filesystem;
using namespace socnet;

namespace {

struct GlobalOptions {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 1;
  std::string null_model;
  std::size_t realizations = 0;
  double swap_multiplier = 0.0;
  std::string events, transactions, profiles, locations;
  std::size_t classes = 0;
  std::size_t segments = 0;
  bool rich_club_control = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* realizations_opt = nullptr;
  CLI::Option* swap_opt = nullptr;
  CLI::Option* classes_opt = nullptr;
  CLI::Option* segments_opt = nullptr;
};

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (!g.events.empty()) cfg.inputs.events = g.events;
  if (!g.transactions.empty()) cfg.inputs.transactions = g.transactions;
  if (!g.profiles.empty()) cfg.inputs.profiles = g.profiles;
  if (!g.locations.empty()) cfg.inputs.locations = g.locations;
  if (g.seed_opt->count()) cfg.shuffle.seed = g.seed;
  if (g.out_opt->count()) cfg.out_dir = g.out;
  if (g.threads_opt->count()) cfg.threads = g.threads;
  if (!g.null_model.empty()) cfg.shuffle.model = parse_null_model(g.null_model);
  if (g.realizations_opt->count()) cfg.realizations = g.realizations;
  if (g.swap_opt->count()) cfg.shuffle.swap_multiplier = g.swap_multiplier;
  if (g.classes_opt->count()) cfg.n_classes = g.classes;
  if (g.segments_opt->count()) cfg.segments = g.segments;
  if (g.rich_club_control) cfg.rich_club_control = true;
  return cfg;
}

void print_report(const AnalysisReport& report, const RunConfig& cfg) {
  for (const auto& s : report.stages) {
    std::printf("%-9s %7.2fs\n", to_string(s.stage), s.seconds);
    for (const auto& f : s.files) {
      std::printf("  %-32s %10ju  %s\n", f.name.c_str(), f.bytes, f.sha256.c_str());
    }
  }
  bool any = false;
  for (const auto& r : report.reference) {
    if (!r.computed) continue;
    if (!any) std::printf("\n%-34s %12s %12s\n", "reference quantity", "reference", "computed");
    any = true;
    std::printf("%-34s %12.6g %12.6g\n", r.quantity.c_str(), r.reference, *r.computed);
  }
  std::printf("\nreport: %s\n", (cfg.out_dir / "report.json").string().c_str());
}

int run_stages(const GlobalOptions& g, std::vector<Stage> stages) {
  RunConfig cfg = resolve_config(g);
  cfg.stages = std::move(stages);
  print_report(run(cfg), cfg);
  return 0;
}

int validate(const GlobalOptions& g) {
  const RunConfig cfg = resolve_config(g);
  const ValidationReport report = validate_inputs(cfg.inputs);
  for (const auto& d : report.diagnostics.items) std::cerr << format_diagnostic(d) << '\n';
  std::printf("events %zu, transactions %zu, profiles %zu, locations %zu rows; %zu fatal, %zu warnings\n",
              report.event_rows, report.transaction_rows, report.profile_rows, report.location_rows,
              report.diagnostics.count(Severity::fatal), report.diagnostics.count(Severity::warning));
  return report.diagnostics.has_fatal() ? 1 : 0;
}

int synth(const GlobalOptions& g, SynthConfig cfg) {
  if (g.seed_opt->count()) cfg.seed = g.seed;
  cfg.validate();
  const fs::path dir = g.out_opt->count() ? fs::path(g.out) : fs::path("synthetic");
  const SyntheticSociety society = generate_society(cfg);
  const InputPaths paths = write_synthetic_inputs(society, cfg, dir);

  std::ofstream conf(dir / "socnet.conf");
  conf << "# synthetic society: " << cfg.n_nodes << " nodes, " << society.graph.edge_count()
       << " edges, seed " << cfg.seed << "\n"
       << "events = \"" << paths.events.filename().string() << "\"\n"
       << "transactions = \"" << paths.transactions.filename().string() << "\"\n"
       << "profiles = \"" << paths.profiles.filename().string() << "\"\n"
       << "locations = \"" << paths.locations.filename().string() << "\"\n"
       << "out = \"results\"\n"
       << "classes = " << cfg.n_classes << "\n"
       << "seed = " << cfg.seed << "\n";
  std::printf("wrote %s (%zu nodes, %zu edges)\n", dir.string().c_str(), society.graph.node_count(),
              society.graph.edge_count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social stratification analysis of communication and spending data"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Key-value configuration file")->check(CLI::ExistingFile);
  g.seed_opt = app.add_option("--seed", g.seed, "Base seed");
  g.out_opt = app.add_option("--out", g.out, "Output directory");
  g.threads_opt = app.add_option("--threads", g.threads, "Worker threads for null ensembles")
                      ->check(CLI::PositiveNumber);
  app.add_option("--null-model", g.null_model, "nm1 or nm2")->check(CLI::IsMember({"nm1", "nm2"}));
  g.realizations_opt = app.add_option("--realizations", g.realizations, "Null-model realizations")
                           ->check(CLI::PositiveNumber);
  g.swap_opt = app.add_option("--swap-multiplier", g.swap_multiplier, "Successful swaps per edge");
  app.add_option("--events", g.events, "Events CSV");
  app.add_option("--transactions", g.transactions, "Transactions CSV");
  app.add_option("--profiles", g.profiles, "Profiles CSV");
  app.add_option("--locations", g.locations, "Locations CSV");
  g.classes_opt = app.add_option("--classes", g.classes, "Number of wealth classes");
  g.segments_opt = app.add_option("--segments", g.segments, "Rich-club removal steps");
  app.add_flag("--rich-club-control", g.rich_club_control, "Also write the NM2 control rich-club curve");

  std::vector<std::pair<CLI::App*, Stage>> stage_commands;
  for (Stage s : all_stages()) {
    stage_commands.emplace_back(app.add_subcommand(to_string(s), std::string("Write the outputs of the ") +
                                                                     to_string(s) + " stage"),
                                s);
  }
  CLI::App* run_cmd = app.add_subcommand("run", "Run every stage");
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check the input files");

  SynthConfig sc;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic society as input files");
  synth_cmd->add_option("--nodes", sc.n_nodes)->capture_default_str();
  synth_cmd->add_option("--edges", sc.n_edges)->capture_default_str();
  synth_cmd->add_option("--alpha", sc.pareto_alpha, "Pareto tail exponent")->capture_default_str();
  synth_cmd->add_option("--wealth-min", sc.wealth_min)->capture_default_str();
  synth_cmd->add_option("--classes", sc.n_classes)->capture_default_str();
  synth_cmd->add_option("--homophily", sc.homophily)->capture_default_str();
  synth_cmd->add_option("--rich-club-boost", sc.rich_club_boost)->capture_default_str();
  synth_cmd->add_option("--rich-fraction", sc.rich_fraction)->capture_default_str();
  synth_cmd->add_option("--clusters", sc.spatial_clusters)->capture_default_str();
  synth_cmd->add_option("--dispersion-km", sc.cluster_dispersion_km)->capture_default_str();
  synth_cmd->add_option("--cluster-coupling", sc.class_cluster_coupling)->capture_default_str();
  synth_cmd->add_option("--commute-coupling", sc.commute_class_coupling)->capture_default_str();
  synth_cmd->add_option("--commute-median-km", sc.commute_median_km)->capture_default_str();
  synth_cmd->add_option("--commute-sigma", sc.commute_sigma)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth_cmd) return synth(g, sc);
    if (*validate_cmd) return validate(g);
    if (*run_cmd) return run_stages(g, all_stages());
    for (const auto& [cmd, stage] : stage_commands) {
      if (*cmd) return run_stages(g, {stage});
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
