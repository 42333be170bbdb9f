#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "socnet/error.hpp"
#include "socnet/geo.hpp"
#include "socnet/io.hpp"
#include "socnet/nullmodels.hpp"

namespace socnet {

enum class Stage { ingest, graph, classify, stratify, richclub, spatial, commute };

const char* to_string(Stage stage) noexcept;
Stage parse_stage(const std::string& name);
std::vector<Stage> all_stages();

struct RunConfig {
  InputPaths inputs;
  /// Stages whose outputs are written. Upstream stages they depend on are
  /// still computed, in memory.
  std::vector<Stage> stages = all_stages();
  std::size_t n_classes = 9;
  ShuffleConfig shuffle;
  std::size_t realizations = 100;
  unsigned threads = 1;
  std::filesystem::path out_dir = "socnet_out";
  TimeWindows windows;
  std::size_t segments = 100;
  double reliability_floor = 1.0;
  std::size_t commute_log_bins = 30;
  double commute_min_km = 0.1;
  double commute_max_km = 1000.0;
  /// Also compute the rich-club curve with an NM2 ensemble as numerator.
  bool rich_club_control = false;
};

/// Parses `key = value` lines ('#' starts a comment, optional [section]
/// headers are ignored, values may be quoted). Relative input paths are
/// resolved against `base_dir`. Unknown keys are an input error.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct StageRecord {
  Stage stage = Stage::ingest;
  std::vector<OutputFile> files;
  double seconds = 0.0;
};

struct ReferenceComparison {
  std::string quantity;
  double reference = 0.0;
  std::optional<double> computed;
};

struct AnalysisReport {
  std::vector<StageRecord> stages;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<ReferenceComparison> reference;
};

/// A stage failed. Outputs it had written are renamed with a ".quarantine"
/// suffix.
class StageError : public Error {
 public:
  StageError(Stage stage, ErrorCode cause, const std::string& what)
      : Error(cause, std::string("stage '") + to_string(stage) + "' failed: " + what),
        stage_(stage) {}

  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Runs ingest -> graph -> classify -> stratify -> richclub -> spatial ->
/// commute and writes every selected stage's outputs plus report.json.
AnalysisReport run(const RunConfig& config);

/// Process exit status for a failure: 1 input error, 3 ensemble warning
/// rate exceeded, 2 anything else.
int exit_code_for(const Error& error) noexcept;

}  // namespace socnet
