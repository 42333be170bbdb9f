#include "socnet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "socnet/digest.hpp"
#include "socnet/econometrics.hpp"
#include "socnet/graph.hpp"
#include "socnet/stratify.hpp"

#ifndef SOCNET_VERSION
#define SOCNET_VERSION "0.0.0"
#endif

namespace socnet {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr Stage kStageOrder[] = {Stage::ingest,   Stage::graph,   Stage::classify, Stage::stratify,
                                 Stage::richclub, Stage::spatial, Stage::commute};

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json numbers(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number_or_null(x));
  return a;
}

json correlation_json(const std::optional<Correlation>& c) {
  if (!c) return nullptr;
  return {{"r", c->r}, {"p_value", c->p_value}, {"standard_error", c->standard_error}, {"n", c->n}};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
std::string matrix_csv(const Matrix<T>& m, const Matrix<CellStatus>* status = nullptr) {
  std::ostringstream os;
  os << "class";
  for (std::size_t j = 0; j < m.cols(); ++j) os << ',' << j + 1;
  os << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << i + 1;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      os << ',';
      if (status && (*status)(i, j) != CellStatus::ok) {
        os << "NA";
      } else if constexpr (std::is_floating_point_v<T>) {
        os << format_number(m(i, j));
      } else {
        os << m(i, j);
      }
    }
    os << '\n';
  }
  return os.str();
}

// Files written by one stage; renamed to *.quarantine if the stage fails.
class StageOutputs {
 public:
  explicit StageOutputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::input_error, "cannot write " + p.string());
    f << content;
    f.close();
    names_.push_back(name);
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  std::vector<OutputFile> manifest() const {
    std::vector<OutputFile> out;
    for (const auto& n : names_) {
      const fs::path p = dir_ / n;
      out.push_back({n, sha256_file(p), fs::file_size(p)});
    }
    return out;
  }

  void quarantine() noexcept {
    for (const auto& n : names_) {
      std::error_code ec;
      fs::rename(dir_ / n, dir_ / (n + ".quarantine"), ec);
    }
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

struct Analysis {
  explicit Analysis(const RunConfig& c) : cfg(c) {}

  const RunConfig& cfg;

  // ingest
  std::vector<EventRecord> events;
  std::vector<TransactionRecord> transactions;
  std::vector<ProfileRecord> profiles;
  std::vector<LocationRecord> locations;
  Diagnostics diagnostics;
  std::map<std::string, EconomicIndicators> indicators;

  // graph
  std::size_t directed_nodes = 0, directed_arcs = 0, filtered_nodes = 0, filtered_arcs = 0;
  std::size_t undirected_nodes = 0, undirected_edges = 0, intersected_nodes = 0,
              intersected_edges = 0;
  SocialGraph graph;
  std::vector<double> amp;
  DegreeStats degree;
  std::optional<Correlation> degree_wealth;

  // classify
  ClassPartition partition;

  std::map<std::string, double> computed;  // for the reference table
  std::vector<std::string> warnings;
};

const std::vector<std::pair<std::string, double>>& reference_values() {
  static const std::vector<std::pair<std::string, double>> values = {
      {"gini_amp", 0.461},
      {"gini_amd", 0.627},
      {"pareto_index_amp", 1.315},
      {"pareto_index_amd", 1.140},
      {"top_people_amp", 0.27},
      {"top_wealth_amp", 0.73},
      {"top_people_amd", 0.19},
      {"top_wealth_amd", 0.81},
      {"corr_amp_income", 0.758},
      {"corr_amp_salary", 0.691},
      {"corr_amp_amd", 0.104},
      {"degree_assortativity", -0.00813},
      {"degree_wealth_correlation", 0.0357},
      {"richest_class_self_link_ratio", 2.25},
      {"max_rich_club_coefficient", 8.0},
      {"network_nodes", 992538},
      {"network_edges", 1960239},
  };
  return values;
}

// --- ingest ----------------------------------------------------------------------

void require_file(const fs::path& p, const char* what) {
  if (!fs::exists(p)) {
    throw Error(ErrorCode::input_error, std::string(what) + " file not found: " + p.string());
  }
}

void ingest(Analysis& a, StageOutputs* out) {
  const InputPaths& in = a.cfg.inputs;
  if (in.events.empty()) throw Error(ErrorCode::input_error, "no events file configured");
  if (in.transactions.empty()) throw Error(ErrorCode::input_error, "no transactions file configured");
  require_file(in.events, "events");
  require_file(in.transactions, "transactions");
  if (!in.profiles.empty()) require_file(in.profiles, "profiles");
  if (!in.locations.empty()) require_file(in.locations, "locations");

  auto ev = read_events(in.events);
  a.diagnostics.append(ev.diagnostics);
  auto tx = read_transactions(in.transactions);
  a.diagnostics.append(tx.diagnostics);
  if (!in.profiles.empty()) {
    auto pr = read_profiles(in.profiles);
    a.diagnostics.append(pr.diagnostics);
    a.profiles = std::move(pr.rows);
  }
  if (!in.locations.empty()) {
    auto lo = read_locations(in.locations);
    a.diagnostics.append(lo.diagnostics);
    a.locations = std::move(lo.rows);
  }
  if (a.diagnostics.has_fatal()) {
    const auto first = std::find_if(a.diagnostics.items.begin(), a.diagnostics.items.end(),
                                    [](const Diagnostic& d) { return d.severity == Severity::fatal; });
    throw Error(ErrorCode::input_error,
                format_diagnostic(*first) + " (" +
                    std::to_string(a.diagnostics.count(Severity::fatal)) + " fatal diagnostics)");
  }
  a.events = std::move(ev.rows);
  a.transactions = std::move(tx.rows);
  a.indicators = compute_indicators(a.transactions);

  if (!out) return;
  std::size_t with_amp = 0, with_amd = 0;
  for (const auto& [user, ind] : a.indicators) {
    with_amp += ind.amp ? 1 : 0;
    with_amd += ind.amd ? 1 : 0;
  }
  json warnings = json::array();
  for (const auto& d : a.diagnostics.items) warnings.push_back(format_diagnostic(d));
  out->write_json("ingest_summary.json",
                  {{"event_rows", a.events.size()},
                   {"transaction_rows", a.transactions.size()},
                   {"profile_rows", a.profiles.size()},
                   {"location_rows", a.locations.size()},
                   {"users_with_amp", with_amp},
                   {"users_with_amd", with_amd},
                   {"warnings", warnings}});
}

// --- graph ------------------------------------------------------------------------

void build_graph(Analysis& a, StageOutputs* out) {
  const DirectedInteractionGraph directed = build_interaction_graph(a.events);
  a.directed_nodes = directed.node_count();
  a.directed_arcs = directed.arc_count();
  const DirectedInteractionGraph filtered = recursive_activity_filter(directed);
  a.filtered_nodes = filtered.node_count();
  a.filtered_arcs = filtered.arc_count();
  if (filtered.empty()) throw Error(ErrorCode::empty_graph, "activity filter removed every node");
  const SocialGraph undirected = undirect_and_simplify(filtered);
  a.undirected_nodes = undirected.node_count();
  a.undirected_edges = undirected.edge_count();

  std::vector<NodeIndex> bank_users;
  for (NodeIndex v = 0; v < undirected.node_count(); ++v) {
    const auto it = a.indicators.find(undirected.ids()[v]);
    if (it != a.indicators.end() && it->second.amp && *it->second.amp > 0.0) bank_users.push_back(v);
  }
  if (bank_users.empty()) {
    throw Error(ErrorCode::empty_graph, "no graph node has a positive AMP");
  }
  const SocialGraph intersected = induce_subgraph(undirected, bank_users);
  a.intersected_nodes = intersected.node_count();
  a.intersected_edges = intersected.edge_count();
  a.graph = largest_component(intersected);

  a.amp.resize(a.graph.node_count());
  for (NodeIndex v = 0; v < a.graph.node_count(); ++v) {
    a.amp[v] = *a.indicators.at(a.graph.ids()[v]).amp;
  }
  a.degree = degree_stats(a.graph);
  try {
    a.degree_wealth = degree_wealth_correlation(a.graph, a.amp);
  } catch (const Error&) {
    a.degree_wealth.reset();
  }
  a.computed["network_nodes"] = static_cast<double>(a.graph.node_count());
  a.computed["network_edges"] = static_cast<double>(a.graph.edge_count());
  if (a.degree.assortativity) a.computed["degree_assortativity"] = a.degree.assortativity->r;
  if (a.degree_wealth) a.computed["degree_wealth_correlation"] = a.degree_wealth->r;

  if (!out) return;
  std::ostringstream edges;
  edges << "src,dst\n";
  for (const Edge& e : a.graph.edges()) edges << a.graph.ids()[e.u] << ',' << a.graph.ids()[e.v] << '\n';
  out->write("graph_edges.csv", edges.str());

  std::map<std::size_t, std::size_t> nodes_per_degree;
  for (std::size_t k : a.degree.degrees) ++nodes_per_degree[k];
  std::ostringstream knn;
  knn << "k,knn,nodes\n";
  for (const auto& [k, value] : a.degree.knn) {
    knn << k << ',' << format_number(value) << ',' << nodes_per_degree[k] << '\n';
  }
  out->write("knn.csv", knn.str());

  out->write_json("graph_summary.json",
                  {{"directed", {{"nodes", a.directed_nodes}, {"arcs", a.directed_arcs}}},
                   {"filtered", {{"nodes", a.filtered_nodes}, {"arcs", a.filtered_arcs}}},
                   {"undirected", {{"nodes", a.undirected_nodes}, {"edges", a.undirected_edges}}},
                   {"bank_intersection",
                    {{"nodes", a.intersected_nodes}, {"edges", a.intersected_edges}}},
                   {"largest_component",
                    {{"nodes", a.graph.node_count()}, {"edges", a.graph.edge_count()}}},
                   {"degree_assortativity", correlation_json(a.degree.assortativity)},
                   {"degree_wealth_correlation", correlation_json(a.degree_wealth)}});
}

// --- classify ---------------------------------------------------------------------

std::string lorenz_csv(const LorenzCurve& c) {
  std::ostringstream os;
  os << "f,c\n";
  for (const auto& p : c.points()) os << format_number(p.f) << ',' << format_number(p.c) << '\n';
  return os.str();
}

json inequality_json(Analysis& a, std::span<const double> values, const std::string& suffix,
                     StageOutputs* out) {
  if (values.empty()) return nullptr;
  const LorenzCurve curve = lorenz_curve(values);
  const double g = gini(curve);
  const ParetoSplit split = pareto_split(curve);
  json j = {{"population", values.size()},
            {"gini", g},
            {"top_people", split.top_people},
            {"top_wealth", split.top_wealth}};
  a.computed["gini_" + suffix] = g;
  a.computed["top_people_" + suffix] = split.top_people;
  a.computed["top_wealth_" + suffix] = split.top_wealth;
  j["pareto_index_from_gini"] = g > 0.0 && g < 1.0 ? json(pareto_index_from_gini(g)) : json(nullptr);
  try {
    const double alpha = pareto_tail_index(values);
    j["pareto_index_hill"] = alpha;
    a.computed["pareto_index_" + suffix] = alpha;
  } catch (const Error&) {
    j["pareto_index_hill"] = nullptr;
  }
  if (out) out->write("lorenz_" + suffix + ".csv", lorenz_csv(curve));
  return j;
}

std::optional<Correlation> try_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return pearson_with_se(x, y);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void classify(Analysis& a, StageOutputs* out) {
  a.partition = partition_equal_wealth(a.amp, a.cfg.n_classes);
  if (!out) return;

  std::vector<double> amp_all, amd_all;
  for (const auto& [user, ind] : a.indicators) {
    if (ind.amp) amp_all.push_back(*ind.amp);
    if (ind.amd) amd_all.push_back(*ind.amd);
  }
  json inequality;
  inequality["amp"] = inequality_json(a, amp_all, "amp", out);
  inequality["amd"] = inequality_json(a, amd_all, "amd", out);

  std::unordered_map<std::string, const ProfileRecord*> profile_of;
  for (const auto& p : a.profiles) profile_of.emplace(p.user, &p);

  std::vector<double> pi_x, pi_y, ps_x, ps_y, pd_x, pd_y;
  for (const auto& [user, ind] : a.indicators) {
    if (!ind.amp) continue;
    if (ind.amd) {
      pd_x.push_back(*ind.amp);
      pd_y.push_back(*ind.amd);
    }
    const auto it = profile_of.find(user);
    if (it == profile_of.end()) continue;
    if (it->second->income) {
      pi_x.push_back(*ind.amp);
      pi_y.push_back(*it->second->income);
    }
    if (it->second->salary) {
      ps_x.push_back(*ind.amp);
      ps_y.push_back(*it->second->salary);
    }
  }
  const auto c_income = try_pearson(pi_x, pi_y);
  const auto c_salary = try_pearson(ps_x, ps_y);
  const auto c_debt = try_pearson(pd_x, pd_y);
  if (c_income) a.computed["corr_amp_income"] = c_income->r;
  if (c_salary) a.computed["corr_amp_salary"] = c_salary->r;
  if (c_debt) a.computed["corr_amp_amd"] = c_debt->r;
  inequality["correlations"] = {{"amp_income", correlation_json(c_income)},
                                {"amp_salary", correlation_json(c_salary)},
                                {"amp_amd", correlation_json(c_debt)}};
  out->write_json("inequality.json", inequality);

  std::ostringstream classes;
  classes << "user,amp,class\n";
  for (NodeIndex v = 0; v < a.graph.node_count(); ++v) {
    classes << a.graph.ids()[v] << ',' << format_number(a.amp[v]) << ','
            << a.partition.assignment[v] + 1 << '\n';
  }
  out->write("classes.csv", classes.str());

  std::vector<EgoProfile> egos(a.graph.node_count());
  for (NodeIndex v = 0; v < a.graph.node_count(); ++v) {
    egos[v].user = a.graph.ids()[v];
    egos[v].amp = a.amp[v];
    const auto it = profile_of.find(egos[v].user);
    if (it != profile_of.end()) {
      egos[v].age = it->second->age;
      egos[v].gender = it->second->gender;
    }
  }
  const auto demo = class_demographics(a.partition, egos);
  std::ostringstream d;
  d << "class,size,sum_amp,mean_amp,mean_age,fraction_women\n";
  for (std::size_t c = 0; c < demo.size(); ++c) {
    d << c + 1 << ',' << demo[c].size << ',' << format_number(a.partition.class_sums[c]) << ','
      << format_number(demo[c].mean_amp) << ','
      << (demo[c].mean_age ? format_number(*demo[c].mean_age) : "NA") << ','
      << (demo[c].fraction_women ? format_number(*demo[c].fraction_women) : "NA") << '\n';
  }
  out->write("class_demographics.csv", d.str());
}

// --- null-model stages ----------------------------------------------------------------

json ensemble_json(const NullEnsembleStats& s) {
  json runs = json::array();
  for (const auto& r : s.runs) {
    runs.push_back({{"seed", r.seed},
                    {"performed_swaps", r.performed_swaps},
                    {"proposals", r.proposals},
                    {"skipped_edges", r.skipped_edges},
                    {"exhausted", r.exhausted}});
  }
  return {{"null_model", to_string(s.config.model)},
          {"swap_multiplier", s.config.swap_multiplier},
          {"max_attempt_factor", s.config.max_attempt_factor},
          {"base_seed", s.config.seed},
          {"realizations", s.realizations},
          {"seeds", s.seeds},
          {"warnings", s.warning_count()},
          {"runs", runs}};
}

EnsembleOptions ensemble_options(const RunConfig& cfg) {
  EnsembleOptions o;
  o.realizations = cfg.realizations;
  o.threads = cfg.threads;
  return o;
}

void stratify(Analysis& a, StageOutputs& out) {
  const ClassLinkMatrix counts = class_link_matrix(a.graph, a.partition);
  const GraphStatistic stats[] = {class_link_statistic(a.partition)};
  const NullEnsembleStats ensemble = run_ensemble(a.graph, a.cfg.shuffle, ensemble_options(a.cfg), stats);
  const std::size_t n = a.partition.n;
  const Matrix<double> null_mean = mean_class_links(ensemble, n);
  const StratMatrix L = stratification_matrix(counts, null_mean, a.cfg.reliability_floor);

  out.write("class_links.csv", matrix_csv(counts));
  out.write("null_class_links.csv", matrix_csv(null_mean));
  out.write("strat_matrix.csv", matrix_csv(L.ratio, &L.status));

  json meta = ensemble_json(ensemble);
  meta["reliability_floor"] = a.cfg.reliability_floor;
  json status = json::array();
  bool all_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) {
      const CellStatus s = L.status(i, j);
      all_ok = all_ok && s == CellStatus::ok;
      row.push_back(s == CellStatus::ok ? "ok" : s == CellStatus::unreliable ? "unreliable" : "undefined");
    }
    status.push_back(row);
  }
  meta["cell_status"] = status;
  meta["null_standard_error"] = numbers(ensemble.statistic(kClassLinksStatistic).standard_error);
  if (L.status(n - 1, n - 1) == CellStatus::ok) {
    a.computed["richest_class_self_link_ratio"] = L.ratio(n - 1, n - 1);
  }
  if (all_ok) {
    out.write("strat_matrix_normalized.csv", matrix_csv(normalize_rows(L.ratio)));
  } else {
    meta["normalized"] = "skipped: matrix has unreliable or undefined cells";
  }
  out.write_json("stratify.json", meta);
}

std::string rich_club_csv(const RichClubCurve& c) {
  std::ostringstream os;
  os << "threshold,phi,phi_null,rho,n_remaining,e_remaining\n";
  for (std::size_t k = 0; k < c.rho.size(); ++k) {
    os << format_number(c.thresholds[k]) << ',' << format_number(c.phi[k]) << ','
       << format_number(c.phi_null[k]) << ',' << format_number(c.rho[k]) << ','
       << c.nodes_remaining[k] << ',' << c.edges_remaining[k] << '\n';
  }
  return os.str();
}

void richclub(Analysis& a, StageOutputs& out) {
  const RemovalSchedule schedule = make_removal_schedule(a.amp, a.cfg.segments);
  const ResidualDensity observed = residual_density(a.graph, schedule);
  const GraphStatistic stats[] = {density_statistic(schedule)};
  const NullEnsembleStats ensemble = run_ensemble(a.graph, a.cfg.shuffle, ensemble_options(a.cfg), stats);
  const RichClubCurve curve = assemble_rich_club(observed, ensemble.statistic(kDensityStatistic));
  out.write("rich_club.csv", rich_club_csv(curve));

  double max_rho = std::nan("");
  for (double r : curve.rho) {
    if (std::isfinite(r) && !(max_rho >= r)) max_rho = r;
  }
  if (std::isfinite(max_rho)) a.computed["max_rich_club_coefficient"] = max_rho;

  json meta = ensemble_json(ensemble);
  meta["segments"] = a.cfg.segments;
  meta["phi_null_standard_error"] = numbers(curve.phi_null_se);
  meta["rho_standard_error"] = numbers(curve.rho_se);

  if (a.cfg.rich_club_control) {
    // Numerator from the degree-correlated null, denominator from NM1.
    ShuffleConfig nm2 = a.cfg.shuffle;
    nm2.model = NullModel::nm2;
    const NullEnsembleStats numer = run_ensemble(a.graph, nm2, ensemble_options(a.cfg), stats);
    const StatisticSummary* denom = &ensemble.statistic(kDensityStatistic);
    NullEnsembleStats nm1_stats;
    if (a.cfg.shuffle.model != NullModel::nm1) {
      ShuffleConfig nm1 = a.cfg.shuffle;
      nm1.model = NullModel::nm1;
      nm1_stats = run_ensemble(a.graph, nm1, ensemble_options(a.cfg), stats);
      denom = &nm1_stats.statistic(kDensityStatistic);
    }
    ResidualDensity control = observed;
    control.phi = numer.statistic(kDensityStatistic).mean;
    out.write("rich_club_control.csv", rich_club_csv(assemble_rich_club(control, *denom)));
    meta["control"] = ensemble_json(numer);
  }
  out.write_json("rich_club.json", meta);
}

// --- spatial ----------------------------------------------------------------------------

void spatial(Analysis& a, StageOutputs& out) {
  std::unordered_map<std::string, GeoPoint> zip;
  for (const auto& p : a.profiles) {
    if (p.zip) zip.emplace(p.user, *p.zip);
  }
  for (const auto& l : a.locations) {
    if (l.kind == LocationKind::zip) zip.insert_or_assign(l.user, l.point);
  }
  std::vector<std::optional<GeoPoint>> where(a.graph.node_count());
  std::size_t located = 0;
  for (NodeIndex v = 0; v < a.graph.node_count(); ++v) {
    const auto it = zip.find(a.graph.ids()[v]);
    if (it != zip.end()) {
      where[v] = it->second;
      ++located;
    }
  }
  const ClassDistances d = class_distance_matrix(a.graph, a.partition, where);
  const Matrix<double> rel = relative_distance_matrix(d.mean_km, d.located_links);
  out.write("class_distance.csv", matrix_csv(d.mean_km));
  out.write("relative_distance.csv", matrix_csv(rel));
  std::uint64_t located_links = 0;
  for (std::size_t i = 0; i < d.located_links.rows(); ++i) {
    for (std::size_t j = i; j < d.located_links.cols(); ++j) located_links += d.located_links(i, j);
  }
  out.write_json("spatial.json", {{"located_nodes", located},
                                  {"located_links", located_links},
                                  {"links", a.graph.edge_count()}});
}

// --- commute -------------------------------------------------------------------------------

void commute(Analysis& a, StageOutputs& out) {
  std::unordered_map<std::string, NodeIndex> index;
  for (NodeIndex v = 0; v < a.graph.node_count(); ++v) index.emplace(a.graph.ids()[v], v);

  std::vector<std::vector<LocatedEvent>> located(a.graph.node_count());
  for (const EventRecord& ev : a.events) {
    if (!ev.cell) continue;
    const auto it = index.find(ev.caller);
    if (it != index.end()) located[it->second].push_back({ev.timestamp, *ev.cell});
  }
  std::vector<HomeWork> hw(a.graph.node_count());
  for (NodeIndex v = 0; v < a.graph.node_count(); ++v) {
    if (!located[v].empty()) hw[v] = infer_home_work(located[v], a.cfg.windows);
  }
  for (const auto& l : a.locations) {
    const auto it = index.find(l.user);
    if (it == index.end()) continue;
    if (l.kind == LocationKind::home) hw[it->second].home = l.point;
    if (l.kind == LocationKind::work) hw[it->second].work = l.point;
  }

  std::ostringstream hwcsv;
  hwcsv << "user,home_lat,home_lon,work_lat,work_lon,d_hw_km\n";
  for (NodeIndex v = 0; v < a.graph.node_count(); ++v) {
    if (!hw[v].home || !hw[v].work) continue;
    hwcsv << a.graph.ids()[v] << ',' << format_number(hw[v].home->lat) << ','
          << format_number(hw[v].home->lon) << ',' << format_number(hw[v].work->lat) << ','
          << format_number(hw[v].work->lon) << ',' << format_number(haversine(*hw[v].home, *hw[v].work))
          << '\n';
  }
  out.write("home_work.csv", hwcsv.str());

  const CommuteBins bins =
      make_commute_bins(a.cfg.commute_log_bins, a.cfg.commute_min_km, a.cfg.commute_max_km);
  const CommuteDeltaTable t = commute_delta(hw, a.partition, bins);
  const std::size_t n = a.partition.n;
  std::ostringstream os;
  os << "bin_lo_km,bin_hi_km,p_all";
  for (std::size_t c = 0; c < n; ++c) os << ",p_class_" << c + 1;
  for (std::size_t c = 0; c < n; ++c) os << ",delta_" << c + 1;
  os << '\n';
  for (std::size_t b = 0; b < bins.size(); ++b) {
    os << format_number(bins.lo[b]) << ',' << format_number(bins.hi[b]) << ',' << format_number(t.p_all[b]);
    for (std::size_t c = 0; c < n; ++c) os << ',' << (t.p_class[c].empty() ? "NA" : format_number(t.p_class[c][b]));
    for (std::size_t c = 0; c < n; ++c) os << ',' << (t.delta[c].empty() ? "NA" : format_number(t.delta[c][b]));
    os << '\n';
  }
  out.write("commute_delta.csv", os.str());

  json warnings = json::array();
  for (std::size_t c = 0; c < n; ++c) {
    if (t.commuters[c] == 0) {
      warnings.push_back("class " + std::to_string(c + 1) + " has no commuters; curve omitted");
      a.warnings.push_back(warnings.back());
    }
  }
  out.write_json("commute.json", {{"commuters", t.total_commuters},
                                  {"commuters_per_class", t.commuters},
                                  {"warnings", warnings}});
}

}  // namespace

// --- public API -------------------------------------------------------------------------

const char* to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::graph: return "graph";
    case Stage::classify: return "classify";
    case Stage::stratify: return "stratify";
    case Stage::richclub: return "richclub";
    case Stage::spatial: return "spatial";
    case Stage::commute: return "commute";
  }
  return "unknown";
}

Stage parse_stage(const std::string& name) {
  for (Stage s : kStageOrder) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::input_error, "unknown stage '" + name + "'");
}

std::vector<Stage> all_stages() { return {std::begin(kStageOrder), std::end(kStageOrder)}; }

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::input_error, "config line " + std::to_string(line_no) + ": " + what);
  };
  auto path_of = [&](const std::string& v) {
    const fs::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '[') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    auto as_size = [&]() -> std::size_t {
      try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) fail("invalid integer for " + key);
        return static_cast<std::size_t>(v);
      } catch (const std::logic_error&) {
        fail("invalid integer for " + key);
      }
      return 0;
    };
    auto as_int = [&]() -> int {
      try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) fail("invalid integer for " + key);
        return v;
      } catch (const std::logic_error&) {
        fail("invalid integer for " + key);
      }
      return 0;
    };
    auto as_double = [&]() -> double {
      try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) fail("invalid number for " + key);
        return v;
      } catch (const std::logic_error&) {
        fail("invalid number for " + key);
      }
      return 0.0;
    };

    if (key == "events") cfg.inputs.events = path_of(value);
    else if (key == "transactions") cfg.inputs.transactions = path_of(value);
    else if (key == "profiles") cfg.inputs.profiles = value.empty() ? fs::path{} : path_of(value);
    else if (key == "locations") cfg.inputs.locations = value.empty() ? fs::path{} : path_of(value);
    else if (key == "out") cfg.out_dir = path_of(value);
    else if (key == "stages") {
      cfg.stages.clear();
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) {
        if (!trim(item).empty()) cfg.stages.push_back(parse_stage(trim(item)));
      }
    }
    else if (key == "classes") cfg.n_classes = as_size();
    else if (key == "null_model") cfg.shuffle.model = parse_null_model(value);
    else if (key == "swap_multiplier") cfg.shuffle.swap_multiplier = as_double();
    else if (key == "max_attempt_factor") cfg.shuffle.max_attempt_factor = static_cast<std::uint32_t>(as_size());
    else if (key == "realizations") cfg.realizations = as_size();
    else if (key == "seed") cfg.shuffle.seed = as_size();
    else if (key == "threads") cfg.threads = static_cast<unsigned>(as_size());
    else if (key == "segments") cfg.segments = as_size();
    else if (key == "reliability_floor") cfg.reliability_floor = as_double();
    else if (key == "night_start") cfg.windows.night_start = as_int();
    else if (key == "night_end") cfg.windows.night_end = as_int();
    else if (key == "work_start") cfg.windows.work_start = as_int();
    else if (key == "work_end") cfg.windows.work_end = as_int();
    else if (key == "utc_offset_hours") cfg.windows.utc_offset_hours = as_int();
    else if (key == "min_appearances") cfg.windows.min_appearances = as_size();
    else if (key == "commute_bins") cfg.commute_log_bins = as_size();
    else if (key == "commute_min_km") cfg.commute_min_km = as_double();
    else if (key == "commute_max_km") cfg.commute_max_km = as_double();
    else if (key == "rich_club_control") cfg.rich_club_control = value == "true" || value == "1";
    else fail("unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::input_error, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path.parent_path());
}

AnalysisReport run(const RunConfig& config) {
  if (config.n_classes == 0) throw Error(ErrorCode::input_error, "classes must be >= 1");
  if (config.realizations == 0) throw Error(ErrorCode::input_error, "realizations must be >= 1");
  config.shuffle.validate();

  const std::set<Stage> emit(config.stages.begin(), config.stages.end());
  Stage last = Stage::ingest;
  for (Stage s : emit) last = std::max(last, s);

  Analysis a(config);
  AnalysisReport report;
  report.seed = config.shuffle.seed;
  report.version = SOCNET_VERSION;

  for (Stage stage : kStageOrder) {
    if (stage > last) break;
    const bool selected = emit.contains(stage);
    const bool upstream = stage <= Stage::classify;
    if (!selected && !upstream) continue;

    StageOutputs outputs(config.out_dir);
    const auto start = std::chrono::steady_clock::now();
    try {
      StageOutputs* out = selected ? &outputs : nullptr;
      switch (stage) {
        case Stage::ingest: ingest(a, out); break;
        case Stage::graph: build_graph(a, out); break;
        case Stage::classify: classify(a, out); break;
        case Stage::stratify: stratify(a, outputs); break;
        case Stage::richclub: richclub(a, outputs); break;
        case Stage::spatial: spatial(a, outputs); break;
        case Stage::commute: commute(a, outputs); break;
      }
    } catch (const Error& e) {
      outputs.quarantine();
      throw StageError(stage, e.code(), e.what());
    } catch (const std::exception& e) {
      outputs.quarantine();
      throw StageError(stage, ErrorCode::invalid_argument, e.what());
    }
    if (selected) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      report.stages.push_back({stage, outputs.manifest(), elapsed.count()});
    }
  }

  for (const auto& [name, value] : reference_values()) {
    ReferenceComparison rc{name, value, std::nullopt};
    if (const auto it = a.computed.find(name); it != a.computed.end()) rc.computed = it->second;
    report.reference.push_back(rc);
  }

  json stages = json::array();
  for (const auto& s : report.stages) {
    json files = json::array();
    for (const auto& f : s.files) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    stages.push_back({{"stage", to_string(s.stage)}, {"seconds", s.seconds}, {"files", files}});
  }
  json reference = json::array();
  for (const auto& r : report.reference) {
    reference.push_back({{"quantity", r.quantity},
                         {"reference", r.reference},
                         {"computed", r.computed ? json(*r.computed) : json(nullptr)}});
  }
  const json doc = {
      {"version", report.version},
      {"seed", report.seed},
      {"config",
       {{"classes", config.n_classes},
        {"null_model", to_string(config.shuffle.model)},
        {"swap_multiplier", config.shuffle.swap_multiplier},
        {"realizations", config.realizations},
        {"segments", config.segments},
        {"threads", config.threads}}},
      {"stages", stages},
      {"reference_values", reference},
      {"warnings", a.warnings},
  };
  fs::create_directories(config.out_dir);
  std::ofstream f(config.out_dir / "report.json", std::ios::binary | std::ios::trunc);
  f << doc.dump(2) << '\n';
  return report;
}

int exit_code_for(const Error& error) noexcept {
  switch (error.code()) {
    case ErrorCode::input_error: return 1;
    case ErrorCode::ensemble_warning_rate: return 3;
    default: return 2;
  }
}

}  // namespace socnet
