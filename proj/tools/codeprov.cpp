#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "codeprov/pipeline.hpp"
#include "codeprov/textutil.hpp"

namespace fs = std::filesystem;
using namespace codeprov;

namespace {

// The catalog ships next to the binary; --catalog overrides.
fs::path default_catalog_path() {
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) return exe.parent_path() / "catalog.json";
  return "catalog.json";
}

std::optional<Timestamp> parse_date_flag(const std::string& value, const std::string& flag) {
  if (value.empty()) return std::nullopt;
  auto ts = parse_timestamp(value);
  if (!ts) throw FatalError(flag + ": cannot parse date '" + value + "'");
  return ts;
}

NormLevel parse_norm_flag(const std::string& value) {
  if (value == "TYPE1") return NormLevel::kType1;
  if (value == "TYPE2") return NormLevel::kType2;
  throw FatalError("--normalization must be TYPE1 or TYPE2");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codeprov: bidirectional code-reuse and license analysis between a Q&A corpus "
               "and application source trees"};
  app.require_subcommand(1);

  int workers = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));

  // ingest-qa
  auto* ingest_qa = app.add_subcommand("ingest-qa", "Parse a posts dump into a snippet corpus");
  std::string qa_dump, qa_out, qa_ceiling;
  std::vector<std::string> qa_tags{"java", "android"};
  int qa_min_lines = 10;
  bool qa_inherit = false;
  ingest_qa->add_option("--dump", qa_dump, "Posts.xml path")->required();
  ingest_qa->add_option("--out", qa_out, "output corpus directory")->required();
  ingest_qa->add_option("--tags", qa_tags, "required tags (any match keeps the post)");
  ingest_qa->add_option("--date-ceiling", qa_ceiling, "keep posts created at or before this date");
  ingest_qa->add_option("--min-lines", qa_min_lines, "minimum snippet lines");
  ingest_qa->add_flag("--inherit-tags", qa_inherit,
                      "answers with no tags inherit their question's tags");

  // ingest-app
  auto* ingest_app = app.add_subcommand("ingest-app", "Scan release trees into a snippet corpus");
  std::string app_manifest, app_out, app_norm = "TYPE2";
  std::vector<std::string> app_exts{".java"};
  int app_min_lines = 10, app_header_lines = 60;
  ingest_app->add_option("--releases", app_manifest, "release manifest (.json or .csv)")->required();
  ingest_app->add_option("--out", app_out, "output corpus directory")->required();
  ingest_app->add_option("--extensions", app_exts, "source file extensions");
  ingest_app->add_option("--min-lines", app_min_lines, "minimum snippet lines");
  ingest_app->add_option("--header-lines", app_header_lines, "lines scanned for license headers");
  ingest_app->add_option("--normalization", app_norm, "TYPE1 or TYPE2");

  // detect
  auto* detect = app.add_subcommand("detect", "Cross-corpus clone detection");
  std::string det_qa, det_app, det_out, det_norm = "TYPE2";
  double det_threshold = 0.70;
  int det_min_lines = 10, det_shard_qa = 2000, det_shard_app = 500, det_retry = 2;
  bool det_no_prune = false;
  detect->add_option("--qa", det_qa, "Q&A corpus directory")->required();
  detect->add_option("--app", det_app, "app corpus directory")->required();
  detect->add_option("--out", det_out, "output directory")->required();
  detect->add_option("--threshold", det_threshold, "similarity threshold (inclusive)");
  detect->add_option("--min-lines", det_min_lines, "minimum normalized lines");
  detect->add_option("--shard-size-qa", det_shard_qa, "Q&A snippets per work-unit slice");
  detect->add_option("--shard-size-app", det_shard_app, "app snippets per work-unit slice");
  detect->add_option("--normalization", det_norm, "TYPE1 or TYPE2");
  detect->add_option("--workers", workers, "worker threads");
  detect->add_option("--retry-limit", det_retry, "re-queues per failed unit");
  detect->add_flag("--no-pruning", det_no_prune, "disable candidate pruning");

  // attribute
  auto* attribute = app.add_subcommand("attribute", "Date app snippets from commit history");
  std::string attr_app, attr_detect, attr_out;
  double attr_fraction = 0.9;
  attribute->add_option("--app", attr_app, "app corpus directory")->required();
  attribute->add_option("--detect", attr_detect, "detect output directory")->required();
  attribute->add_option("--out", attr_out, "output directory")->required();
  attribute->add_option("--match-fraction", attr_fraction,
                        "fraction of snippet lines that must appear as added lines");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Directions, classes, licenses, migrations, lifespans");
  std::string an_qa, an_app, an_detect, an_attr, an_out, an_inc, an_catalog, an_reviewed;
  std::string an_domain = "stackoverflow.com";
  int an_ambiguity = 2;
  analyze->add_option("--qa", an_qa, "Q&A corpus directory")->required();
  analyze->add_option("--app", an_app, "app corpus directory")->required();
  analyze->add_option("--detect", an_detect, "detect output directory")->required();
  analyze->add_option("--attr", an_attr, "attribute output directory")->required();
  analyze->add_option("--out", an_out, "output directory")->required();
  analyze->add_option("--inconsistencies", an_inc, "license-inconsistency CSV");
  analyze->add_option("--catalog", an_catalog, "license catalog JSON");
  analyze->add_option("--reviewed", an_reviewed, "manual review resolutions (JSONL re-import)");
  analyze->add_option("--ambiguity-days", an_ambiguity, "direction ambiguity window");
  analyze->add_option("--site-domain", an_domain, "Q&A site domain for attribution checks");

  // report
  auto* report = app.add_subcommand("report", "Aggregate results into machine-readable reports");
  std::string rep_qa, rep_app, rep_detect, rep_attr, rep_analysis, rep_out, rep_format = "json";
  report->add_option("--qa", rep_qa, "Q&A corpus directory")->required();
  report->add_option("--app", rep_app, "app corpus directory")->required();
  report->add_option("--detect", rep_detect, "detect output directory")->required();
  report->add_option("--attr", rep_attr, "attribute output directory")->required();
  report->add_option("--analysis", rep_analysis, "analyze output directory")->required();
  report->add_option("--out", rep_out, "output directory")->required();
  report->add_option("--format", rep_format, "json or csv-bundle (csv implies json too)");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a manifest");
  std::string pipe_manifest, pipe_out;
  pipeline->add_option("--manifest", pipe_manifest, "pipeline manifest JSON")->required();
  pipeline->add_option("--out", pipe_out, "output directory")->required();
  pipeline->add_option("--workers", workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*ingest_qa) {
      IngestQaOptions options;
      options.dump_path = qa_dump;
      options.out_dir = qa_out;
      options.tags = qa_tags;
      options.date_ceiling = parse_date_flag(qa_ceiling, "--date-ceiling");
      options.min_lines = qa_min_lines;
      options.inherit_tags = qa_inherit;
      auto result = run_ingest_qa(options);
      std::printf("rows=%lld posts_kept=%lld snippets=%lld skipped_missing=%lld skipped_bad_date=%lld\n",
                  static_cast<long long>(result.dump.rows_seen),
                  static_cast<long long>(result.posts_kept),
                  static_cast<long long>(result.snippets_written),
                  static_cast<long long>(result.dump.skipped_missing_field),
                  static_cast<long long>(result.dump.skipped_bad_date));
    } else if (*ingest_app) {
      IngestAppOptions options;
      options.manifest_path = app_manifest;
      options.out_dir = app_out;
      options.extensions = std::set<std::string>(app_exts.begin(), app_exts.end());
      options.min_lines = app_min_lines;
      options.header_lines = app_header_lines;
      options.normalization_level = parse_norm_flag(app_norm);
      auto result = run_ingest_app(options);
      std::printf("apps=%d files=%d snippets=%lld\n", result.apps, result.files_scanned,
                  static_cast<long long>(result.snippets_written));
    } else if (*detect) {
      DetectOptions options;
      options.qa_corpus = det_qa;
      options.app_corpus = det_app;
      options.out_dir = det_out;
      options.config.min_lines = det_min_lines;
      options.config.similarity_threshold = det_threshold;
      options.config.normalization_level = parse_norm_flag(det_norm);
      options.config.shard_size_a = det_shard_qa;
      options.config.shard_size_b = det_shard_app;
      options.config.enable_pruning = !det_no_prune;
      options.workers = workers;
      options.retry_limit = det_retry;
      auto result = run_detect(options);
      std::printf("qa_admitted=%zu app_admitted=%zu pairs=%zu incomplete_units=%zu\n",
                  result.qa_admitted, result.app_admitted, result.pair_count,
                  result.incomplete_units.size());
      if (!result.complete()) {
        std::fprintf(stderr, "detect: %zu work units did not complete\n",
                     result.incomplete_units.size());
        return 2;
      }
    } else if (*attribute) {
      AttributeOptions options;
      options.app_corpus = attr_app;
      options.detect_dir = attr_detect;
      options.out_dir = attr_out;
      options.match_fraction = attr_fraction;
      auto result = run_attribute(options);
      std::printf("dated=%d unresolved=%d\n", result.resolved, result.unresolved);
    } else if (*analyze) {
      AnalyzeOptions options;
      options.qa_corpus = an_qa;
      options.app_corpus = an_app;
      options.detect_dir = an_detect;
      options.attr_dir = an_attr;
      options.out_dir = an_out;
      if (!an_inc.empty()) options.inconsistencies_csv = an_inc;
      options.catalog_path = an_catalog.empty() ? default_catalog_path() : fs::path(an_catalog);
      if (!an_reviewed.empty()) options.reviewed_path = an_reviewed;
      options.ambiguity_days = an_ambiguity;
      options.site_domain = an_domain;
      auto result = run_analyze(options);
      std::printf("pairs=%lld from_qa=%lld to_qa=%lld ambiguous=%lld unresolved=%lld "
                  "violations=%lld migrations=%lld\n",
                  static_cast<long long>(result.pairs), static_cast<long long>(result.from_qa),
                  static_cast<long long>(result.to_qa), static_cast<long long>(result.ambiguous),
                  static_cast<long long>(result.unresolved),
                  static_cast<long long>(result.violations_app + result.violations_post),
                  static_cast<long long>(result.migrations));
    } else if (*report) {
      ReportOptions options;
      options.qa_corpus = rep_qa;
      options.app_corpus = rep_app;
      options.detect_dir = rep_detect;
      options.attr_dir = rep_attr;
      options.analysis_dir = rep_analysis;
      options.out_dir = rep_out;
      options.csv_bundle = rep_format != "json";
      run_report(options);
      std::printf("report written to %s\n", rep_out.c_str());
    } else if (*pipeline) {
      auto outcome = run_pipeline(pipe_manifest, pipe_out, workers);
      if (outcome.incomplete_shards) {
        std::fprintf(stderr, "pipeline: completed with incomplete shards\n");
        return 2;
      }
    }
  } catch (const IncompleteRunError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const FatalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
