#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socnet/econometrics.hpp"
#include "socnet/geo.hpp"
#include "socnet/graph.hpp"
#include "socnet/synthgen.hpp"

namespace socnet {

// CSV schemas (exact header lines).
inline constexpr std::string_view kEventsHeader = "src,dst,timestamp,kind,duration,cell_lat,cell_lon";
inline constexpr std::string_view kTransactionsHeader = "user,month,purchase,debt";
inline constexpr std::string_view kProfilesHeader = "user,age,gender,zip_lat,zip_lon,salary,income";
inline constexpr std::string_view kLocationsHeader = "user,kind,lat,lon";

enum class Severity { warning, fatal };

struct Diagnostic {
  Severity severity = Severity::fatal;
  std::string file;
  std::size_t line = 0;
  std::string message;
};

struct Diagnostics {
  std::vector<Diagnostic> items;

  bool has_fatal() const;
  std::size_t count(Severity s) const;
  void add(Severity s, std::string file, std::size_t line, std::string message);
  void append(const Diagnostics& other);
};

std::string format_diagnostic(const Diagnostic& d);

struct ProfileRecord {
  std::string user;
  std::optional<double> age;
  std::optional<Gender> gender;
  std::optional<GeoPoint> zip;
  std::optional<double> salary;
  std::optional<double> income;
};

enum class LocationKind { zip, home, work };

struct LocationRecord {
  std::string user;
  LocationKind kind = LocationKind::zip;
  GeoPoint point;
};

template <typename Row>
struct Parsed {
  std::vector<Row> rows;
  Diagnostics diagnostics;
};

// Readers never throw on content problems; they report them. A missing or
// unreadable file is a fatal diagnostic on line 0.
Parsed<EventRecord> read_events(const std::filesystem::path& path);
Parsed<TransactionRecord> read_transactions(const std::filesystem::path& path);
Parsed<ProfileRecord> read_profiles(const std::filesystem::path& path);
Parsed<LocationRecord> read_locations(const std::filesystem::path& path);

struct InputPaths {
  std::filesystem::path events;
  std::filesystem::path transactions;
  std::filesystem::path profiles;   // optional
  std::filesystem::path locations;  // optional
};

/// Schema, type and range checks for every configured input, plus row
/// counts and duplicate detection. Duplicate transaction rows are warnings
/// (their amounts are summed downstream).
struct ValidationReport {
  Diagnostics diagnostics;
  std::size_t event_rows = 0;
  std::size_t transaction_rows = 0;
  std::size_t profile_rows = 0;
  std::size_t location_rows = 0;
};
ValidationReport validate_inputs(const InputPaths& paths);

/// Shortest round-trip decimal form; "NA" for NaN.
std::string format_number(double value);

/// Writes the four input CSVs for a synthetic society into `dir`:
/// events.csv, transactions.csv (one month at AMP), profiles.csv and
/// locations.csv (zip rows). Events include both directions of every edge
/// and located night and weekday traffic so home and work can be inferred.
InputPaths write_synthetic_inputs(const SyntheticSociety& society, const SynthConfig& cfg,
                                  const std::filesystem::path& dir);

}  // namespace socnet
