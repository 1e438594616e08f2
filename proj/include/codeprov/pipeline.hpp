#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "codeprov/clone_engine.hpp"
#include "codeprov/corpus.hpp"
#include "codeprov/provenance.hpp"
#include "codeprov/qa_ingest.hpp"
#include "codeprov/repo_ingest.hpp"
#include "codeprov/report.hpp"

namespace codeprov {

/// The run finished but some work units never succeeded. The CLI maps
/// this to exit code 2.
class IncompleteRunError : public std::runtime_error {
 public:
  IncompleteRunError(const std::string& what, std::vector<int> units)
      : std::runtime_error(what), units_(std::move(units)) {}
  const std::vector<int>& units() const { return units_; }

 private:
  std::vector<int> units_;
};

// ---- ingest-qa ----

struct IngestQaOptions {
  std::filesystem::path dump_path;
  std::filesystem::path out_dir;
  std::vector<std::string> tags{"java", "android"};
  std::optional<Timestamp> date_ceiling;
  int min_lines = 10;
  bool inherit_tags = false;
};

struct IngestQaResult {
  DumpStats dump;
  int64_t posts_kept = 0;
  int64_t snippets_written = 0;
};

IngestQaResult run_ingest_qa(const IngestQaOptions& options);

// ---- ingest-app ----

struct ReleaseInfo {
  std::string release_id;
  Timestamp release_date;
  std::filesystem::path tree;
};

struct AppInfo {
  std::string app_id;
  std::filesystem::path repo;
  std::vector<ReleaseInfo> releases;  // sorted by (date, id); the last one is the studied snapshot
};

/// Reads a release manifest, JSON ({"apps":[...]}) or CSV
/// (app_id,release_id,release_date,tree[,repo]). Relative paths resolve
/// against the manifest's directory.
std::vector<AppInfo> load_release_manifest(const std::filesystem::path& path);

struct IngestAppOptions {
  std::filesystem::path manifest_path;
  std::filesystem::path out_dir;
  std::set<std::string> extensions{".java"};
  int min_lines = 10;
  int header_lines = 60;
  NormLevel normalization_level = NormLevel::kType2;
};

struct IngestAppResult {
  int apps = 0;
  int files_scanned = 0;
  int64_t snippets_written = 0;
};

IngestAppResult run_ingest_app(const IngestAppOptions& options);

/// Cuts one file into clone-corpus snippets: brace blocks at class and
/// method depth whose normalized form clears min_lines, or the whole
/// file when no block qualifies.
std::vector<CodeSnippet> segment_file(const FileRecord& file, const std::string& release_id,
                                      int min_lines, NormLevel level);

// ---- detect ----

struct DetectOptions {
  std::filesystem::path qa_corpus;
  std::filesystem::path app_corpus;
  std::filesystem::path out_dir;
  CloneConfig config;
  int workers = 2;
  int retry_limit = 2;
  std::function<void(int, int)> unit_hook;  // test instrumentation
};

struct DetectResult {
  size_t qa_admitted = 0;
  size_t app_admitted = 0;
  size_t pair_count = 0;
  std::vector<int> incomplete_units;
  bool complete() const { return incomplete_units.empty(); }
};

DetectResult run_detect(const DetectOptions& options);

/// Reads the effective config back out of a detect manifest.
CloneConfig load_detect_config(const std::filesystem::path& detect_dir);

// ---- attribute ----

struct AttributeOptions {
  std::filesystem::path app_corpus;
  std::filesystem::path detect_dir;
  std::filesystem::path out_dir;
  double match_fraction = 0.9;
};

struct AttributeResult {
  int resolved = 0;
  int unresolved = 0;
};

AttributeResult run_attribute(const AttributeOptions& options);

// ---- analyze ----

struct AnalyzeOptions {
  std::filesystem::path qa_corpus;
  std::filesystem::path app_corpus;
  std::filesystem::path detect_dir;
  std::filesystem::path attr_dir;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> inconsistencies_csv;
  std::filesystem::path catalog_path;
  std::optional<std::filesystem::path> reviewed_path;
  int ambiguity_days = 2;
  std::string site_domain = "stackoverflow.com";
};

struct AnalyzeResult {
  int64_t pairs = 0;
  int64_t from_qa = 0;
  int64_t to_qa = 0;
  int64_t ambiguous = 0;
  int64_t unresolved = 0;
  int64_t violations_app = 0;
  int64_t violations_post = 0;
  int64_t migrations = 0;
  int64_t classes = 0;
  int64_t lifespans = 0;
};

AnalyzeResult run_analyze(const AnalyzeOptions& options);

// ---- report ----

enum class ReportFormat { kJson, kCsvBundle };

struct ReportOptions {
  std::filesystem::path qa_corpus;
  std::filesystem::path app_corpus;
  std::filesystem::path detect_dir;
  std::filesystem::path attr_dir;
  std::filesystem::path analysis_dir;
  std::filesystem::path out_dir;
  bool csv_bundle = true;  // JSON report is always written
};

void run_report(const ReportOptions& options);

// ---- one-command pipeline ----

struct PipelineOutcome {
  bool incomplete_shards = false;
};

/// Runs every stage from a pipeline manifest into out_dir/{qa,app,detect,
/// attr,analysis,report}. Relative manifest paths resolve against the
/// manifest's directory.
PipelineOutcome run_pipeline(const std::filesystem::path& manifest_path,
                             const std::filesystem::path& out_dir, int workers);

}  // namespace codeprov
