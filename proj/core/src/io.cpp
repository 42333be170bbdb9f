#include "socnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "socnet/error.hpp"
#include "socnet/random.hpp"

namespace socnet {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Streams a CSV file line by line after checking its header. Calls
// `row(line_number, fields)` for every non-empty data row with the right
// field count.
template <typename RowFn>
void scan_csv(const std::filesystem::path& path, std::string_view header, Diagnostics& diag,
              RowFn row) {
  const std::string file = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    diag.add(Severity::fatal, file, 0, "cannot open file");
    return;
  }
  std::string line;
  if (!std::getline(in, line)) {
    diag.add(Severity::fatal, file, 1, "missing header");
    return;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto expected = split_fields(header);
  const auto found = split_fields(line);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= found.size()) {
      diag.add(Severity::fatal, file, 1, "missing column '" + std::string(expected[i]) + "'");
      return;
    }
    if (found[i] != expected[i]) {
      diag.add(Severity::fatal, file, 1,
               "unexpected column '" + std::string(found[i]) + "' where '" +
                   std::string(expected[i]) + "' was expected");
      return;
    }
  }
  if (found.size() > expected.size()) {
    diag.add(Severity::fatal, file, 1, "unexpected extra column '" + std::string(found[expected.size()]) + "'");
    return;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != expected.size()) {
      diag.add(Severity::fatal, file, line_no,
               "expected " + std::to_string(expected.size()) + " fields, found " +
                   std::to_string(fields.size()));
      continue;
    }
    row(line_no, fields);
  }
}

// Parses an optional coordinate pair; both empty means absent.
bool parse_point(std::string_view lat_s, std::string_view lon_s, std::optional<GeoPoint>& out,
                 Diagnostics& diag, const std::string& file, std::size_t line) {
  out.reset();
  if (lat_s.empty() && lon_s.empty()) return true;
  const auto lat = parse_double(lat_s);
  const auto lon = parse_double(lon_s);
  if (!lat || !lon) {
    diag.add(Severity::fatal, file, line, "malformed coordinate");
    return false;
  }
  const GeoPoint p{*lat, *lon};
  if (!is_valid(p)) {
    diag.add(Severity::fatal, file, line,
             "coordinate out of range (lat " + std::string(lat_s) + ", lon " + std::string(lon_s) + ")");
    return false;
  }
  out = p;
  return true;
}

bool parse_optional_amount(std::string_view s, std::optional<double>& out, const char* what,
                           Diagnostics& diag, const std::string& file, std::size_t line) {
  out.reset();
  if (s.empty()) return true;
  const auto v = parse_double(s);
  if (!v || *v < 0.0) {
    diag.add(Severity::fatal, file, line, std::string("invalid ") + what + " '" + std::string(s) + "'");
    return false;
  }
  out = v;
  return true;
}

}  // namespace

// --- diagnostics ---------------------------------------------------------------------

bool Diagnostics::has_fatal() const { return count(Severity::fatal) > 0; }

std::size_t Diagnostics::count(Severity s) const {
  std::size_t n = 0;
  for (const auto& d : items) n += d.severity == s ? 1 : 0;
  return n;
}

void Diagnostics::add(Severity s, std::string file, std::size_t line, std::string message) {
  items.push_back({s, std::move(file), line, std::move(message)});
}

void Diagnostics::append(const Diagnostics& other) {
  items.insert(items.end(), other.items.begin(), other.items.end());
}

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.severity == Severity::fatal ? "error" : "warning") << ": " << d.file;
  if (d.line > 0) os << ':' << d.line;
  os << ": " << d.message;
  return os.str();
}

// --- readers -------------------------------------------------------------------------

Parsed<EventRecord> read_events(const std::filesystem::path& path) {
  Parsed<EventRecord> out;
  const std::string file = path.string();
  scan_csv(path, kEventsHeader, out.diagnostics, [&](std::size_t line, const auto& f) {
    EventRecord ev;
    ev.caller = std::string(f[0]);
    ev.callee = std::string(f[1]);
    if (ev.caller.empty() || ev.callee.empty()) {
      out.diagnostics.add(Severity::fatal, file, line, "empty user id");
      return;
    }
    const auto ts = parse_int(f[2]);
    if (!ts || *ts < 0) {
      out.diagnostics.add(Severity::fatal, file, line, "invalid timestamp '" + std::string(f[2]) + "'");
      return;
    }
    ev.timestamp = *ts;
    if (f[3] == "call") {
      ev.kind = EventKind::call;
    } else if (f[3] == "sms") {
      ev.kind = EventKind::sms;
    } else {
      out.diagnostics.add(Severity::fatal, file, line, "invalid kind '" + std::string(f[3]) + "'");
      return;
    }
    if (f[4].empty()) {
      ev.duration = 0.0;
    } else {
      const auto dur = parse_double(f[4]);
      if (!dur || *dur < 0.0) {
        out.diagnostics.add(Severity::fatal, file, line, "invalid duration '" + std::string(f[4]) + "'");
        return;
      }
      ev.duration = *dur;
    }
    if (!parse_point(f[5], f[6], ev.cell, out.diagnostics, file, line)) return;
    out.rows.push_back(std::move(ev));
  });
  return out;
}

Parsed<TransactionRecord> read_transactions(const std::filesystem::path& path) {
  Parsed<TransactionRecord> out;
  const std::string file = path.string();
  std::set<std::pair<std::string, int>> seen;
  scan_csv(path, kTransactionsHeader, out.diagnostics, [&](std::size_t line, const auto& f) {
    TransactionRecord r;
    r.user = std::string(f[0]);
    if (r.user.empty()) {
      out.diagnostics.add(Severity::fatal, file, line, "empty user id");
      return;
    }
    const auto month = parse_int(f[1]);
    if (!month || *month < 0 || *month > std::numeric_limits<int>::max()) {
      out.diagnostics.add(Severity::fatal, file, line, "invalid month '" + std::string(f[1]) + "'");
      return;
    }
    r.month = static_cast<int>(*month);
    const auto purchase = parse_double(f[2]);
    if (!purchase || *purchase < 0.0) {
      out.diagnostics.add(Severity::fatal, file, line, "invalid purchase '" + std::string(f[2]) + "'");
      return;
    }
    r.purchase = *purchase;
    if (!parse_optional_amount(f[3], r.debt, "debt", out.diagnostics, file, line)) return;
    if (!seen.emplace(r.user, r.month).second) {
      out.diagnostics.add(Severity::warning, file, line,
                          "duplicate row for user '" + r.user + "' month " + std::to_string(r.month) +
                              " (amounts are summed)");
    }
    out.rows.push_back(std::move(r));
  });
  return out;
}

Parsed<ProfileRecord> read_profiles(const std::filesystem::path& path) {
  Parsed<ProfileRecord> out;
  const std::string file = path.string();
  std::set<std::string> seen;
  scan_csv(path, kProfilesHeader, out.diagnostics, [&](std::size_t line, const auto& f) {
    ProfileRecord p;
    p.user = std::string(f[0]);
    if (p.user.empty()) {
      out.diagnostics.add(Severity::fatal, file, line, "empty user id");
      return;
    }
    if (!parse_optional_amount(f[1], p.age, "age", out.diagnostics, file, line)) return;
    if (f[2] == "F" || f[2] == "f" || f[2] == "female") {
      p.gender = Gender::female;
    } else if (f[2] == "M" || f[2] == "m" || f[2] == "male") {
      p.gender = Gender::male;
    } else if (!f[2].empty()) {
      out.diagnostics.add(Severity::fatal, file, line, "invalid gender '" + std::string(f[2]) + "'");
      return;
    }
    if (!parse_point(f[3], f[4], p.zip, out.diagnostics, file, line)) return;
    if (!parse_optional_amount(f[5], p.salary, "salary", out.diagnostics, file, line)) return;
    if (!parse_optional_amount(f[6], p.income, "income", out.diagnostics, file, line)) return;
    if (!seen.insert(p.user).second) {
      out.diagnostics.add(Severity::warning, file, line,
                          "duplicate profile for user '" + p.user + "' (first kept)");
      return;
    }
    out.rows.push_back(std::move(p));
  });
  return out;
}

Parsed<LocationRecord> read_locations(const std::filesystem::path& path) {
  Parsed<LocationRecord> out;
  const std::string file = path.string();
  std::set<std::pair<std::string, int>> seen;
  scan_csv(path, kLocationsHeader, out.diagnostics, [&](std::size_t line, const auto& f) {
    LocationRecord r;
    r.user = std::string(f[0]);
    if (r.user.empty()) {
      out.diagnostics.add(Severity::fatal, file, line, "empty user id");
      return;
    }
    if (f[1] == "zip") {
      r.kind = LocationKind::zip;
    } else if (f[1] == "home") {
      r.kind = LocationKind::home;
    } else if (f[1] == "work") {
      r.kind = LocationKind::work;
    } else {
      out.diagnostics.add(Severity::fatal, file, line, "invalid location kind '" + std::string(f[1]) + "'");
      return;
    }
    std::optional<GeoPoint> p;
    if (!parse_point(f[2], f[3], p, out.diagnostics, file, line)) return;
    if (!p) {
      out.diagnostics.add(Severity::fatal, file, line, "missing coordinate");
      return;
    }
    r.point = *p;
    if (!seen.emplace(r.user, static_cast<int>(r.kind)).second) {
      out.diagnostics.add(Severity::warning, file, line,
                          "duplicate " + std::string(f[1]) + " location for user '" + r.user +
                              "' (first kept)");
      return;
    }
    out.rows.push_back(std::move(r));
  });
  return out;
}

ValidationReport validate_inputs(const InputPaths& paths) {
  ValidationReport report;
  if (paths.events.empty()) {
    report.diagnostics.add(Severity::fatal, "<config>", 0, "no events file configured");
  } else {
    auto p = read_events(paths.events);
    report.event_rows = p.rows.size();
    report.diagnostics.append(p.diagnostics);
  }
  if (paths.transactions.empty()) {
    report.diagnostics.add(Severity::fatal, "<config>", 0, "no transactions file configured");
  } else {
    auto p = read_transactions(paths.transactions);
    report.transaction_rows = p.rows.size();
    report.diagnostics.append(p.diagnostics);
  }
  if (!paths.profiles.empty()) {
    auto p = read_profiles(paths.profiles);
    report.profile_rows = p.rows.size();
    report.diagnostics.append(p.diagnostics);
  }
  if (!paths.locations.empty()) {
    auto p = read_locations(paths.locations);
    report.location_rows = p.rows.size();
    report.diagnostics.append(p.diagnostics);
  }
  return report;
}

// --- writers ---------------------------------------------------------------------------

std::string format_number(double value) {
  if (!std::isfinite(value)) return "NA";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

InputPaths write_synthetic_inputs(const SyntheticSociety& society, const SynthConfig& cfg,
                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  InputPaths paths{dir / "events.csv", dir / "transactions.csv", dir / "profiles.csv",
                   dir / "locations.csv"};
  const SocialGraph& g = society.graph;
  const auto& home = society.placement.position;

  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::input_error, "cannot write " + p.string());
    return f;
  };

  // Monday 2015-01-05 00:00 UTC.
  constexpr std::int64_t kBase = 1420416000;
  constexpr std::int64_t kDay = 86400;
  constexpr int kLocatedEvents = 12;
  {
    std::ofstream f = open(paths.events);
    f << kEventsHeader << '\n';
    for (const Edge& e : g.edges()) {
      const std::int64_t t = kBase + static_cast<std::int64_t>((e.u * 7919ULL + e.v) % (14 * kDay));
      f << g.id(e.u) << ',' << g.id(e.v) << ',' << t << ",call,60,,\n";
      f << g.id(e.v) << ',' << g.id(e.u) << ',' << t + 300 << ",sms,0,,\n";
    }
    // Night traffic from home on consecutive days and office-hour traffic
    // from work on weekdays, addressed to the first neighbor.
    static constexpr int kWeekdays[kLocatedEvents] = {0, 1, 2, 3, 4, 7, 8, 9, 10, 11, 14, 15};
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      if (g.degree(v) == 0) continue;
      const std::string& to = g.ids()[g.neighbors(v).front()];
      const std::string hl = format_number(home[v].lat) + ',' + format_number(home[v].lon);
      const std::string wl =
          format_number(society.work[v].lat) + ',' + format_number(society.work[v].lon);
      for (int d = 0; d < kLocatedEvents; ++d) {
        f << g.ids()[v] << ',' << to << ',' << kBase + d * kDay + 23 * 3600 + v % 3000 << ",call,30,"
          << hl << '\n';
        f << g.ids()[v] << ',' << to << ',' << kBase + kWeekdays[d] * kDay + 11 * 3600 + v % 3000
          << ",sms,0," << wl << '\n';
      }
    }
  }
  {
    std::ofstream f = open(paths.transactions);
    f << kTransactionsHeader << '\n';
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      f << g.ids()[v] << ",0," << format_number(society.wealth[v]) << ",\n";
    }
  }
  {
    Rng rng(derive_seed(cfg.seed, 5));
    std::ofstream f = open(paths.profiles);
    f << kProfilesHeader << '\n';
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      const auto age = 18 + static_cast<int>(rng.below(63));
      const char* gender = rng.coin() ? "F" : "M";
      const double salary = society.wealth[v] * 1.5 * std::exp(0.3 * rng.normal());
      const double income = salary + society.wealth[v] * 0.5 * rng.uniform();
      f << g.ids()[v] << ',' << age << ',' << gender << ',' << format_number(home[v].lat) << ','
        << format_number(home[v].lon) << ',' << format_number(salary) << ','
        << format_number(income) << '\n';
    }
  }
  {
    std::ofstream f = open(paths.locations);
    f << kLocationsHeader << '\n';
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      f << g.ids()[v] << ",zip," << format_number(home[v].lat) << ','
        << format_number(home[v].lon) << '\n';
    }
  }
  return paths;
}

}  // namespace socnet
