#include "codeprov/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "codeprov/license_id.hpp"
#include "codeprov/textutil.hpp"

namespace codeprov {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string norm_level_name(NormLevel level) {
  return level == NormLevel::kType1 ? "TYPE1" : "TYPE2";
}

NormLevel norm_level_from(const std::string& name) {
  if (name == "TYPE1") return NormLevel::kType1;
  if (name == "TYPE2") return NormLevel::kType2;
  throw FatalError("unknown normalization level: " + name);
}

void write_json(const fs::path& path, const ordered_json& doc) {
  write_file(path, doc.dump(1) + "\n");
}

}  // namespace

// ---------------------------------------------------------------- ingest-qa

IngestQaResult run_ingest_qa(const IngestQaOptions& options) {
  if (options.tags.empty()) throw FatalError("ingest-qa: at least one tag is required");
  std::ifstream in(options.dump_path, std::ios::binary);
  if (!in) throw FatalError("cannot open dump: " + options.dump_path.string());

  std::vector<std::string> required;
  for (const auto& t : options.tags) required.push_back(to_lower_ascii(t));

  // Snippet files, the index, and the post sidecar are appended as the
  // dump streams past, so memory stays bounded by one post.
  fs::create_directories(options.out_dir / "snippets");
  std::ofstream index_out(options.out_dir / "index.jsonl", std::ios::binary | std::ios::trunc);
  std::ofstream posts_out(options.out_dir / "posts.jsonl", std::ios::binary | std::ios::trunc);
  if (!index_out || !posts_out) {
    throw FatalError("cannot write corpus to: " + options.out_dir.string());
  }

  IngestQaResult result;
  PostReader reader(in);
  TagInheritance inheritance;
  while (auto post = reader.next()) {
    if (options.date_ceiling && post->creation_date > *options.date_ceiling) continue;
    std::vector<std::string> effective = post->tags;
    if (options.inherit_tags) {
      if (auto inherited = inheritance.tags_for_answer(*post)) effective = std::move(*inherited);
    }
    if (!tags_intersect(effective, required)) continue;
    if (options.inherit_tags) inheritance.remember_question(*post);
    post->tags = std::move(effective);
    ++result.posts_kept;
    auto extracted = extract_snippets(*post, options.min_lines);
    if (extracted.empty()) continue;

    std::string post_row = "{\"id\":" + std::to_string(post->id);
    post_row += ",\"creation_date\":\"" + format_timestamp(post->creation_date) + "\"";
    post_row += ",\"tags\":[";
    for (size_t i = 0; i < post->tags.size(); ++i) {
      if (i) post_row += ",";
      post_row += "\"" + json_escape(post->tags[i]) + "\"";
    }
    post_row += "]";
    if (post->post_type) post_row += ",\"post_type\":" + std::to_string(*post->post_type);
    if (post->parent_id) post_row += ",\"parent_id\":" + std::to_string(*post->parent_id);
    if (post->owner) post_row += ",\"owner\":\"" + json_escape(*post->owner) + "\"";
    post_row += ",\"body_html\":\"" + json_escape(post->body_html) + "\"}\n";
    posts_out << post_row;

    for (const CodeSnippet& snippet : extracted) {
      write_file(options.out_dir / "snippets" / (snippet.snippet_id + ".txt"), snippet.raw_text);
      const QaPostOrigin& origin = snippet.qa();
      std::string row = "{\"snippet_id\":\"" + json_escape(snippet.snippet_id) + "\"";
      row += ",\"post_id\":" + std::to_string(origin.post_id);
      row += ",\"block_index\":" + std::to_string(origin.block_index);
      row += ",\"creation_date\":\"" + format_timestamp(*snippet.created_at) + "\"";
      row += ",\"line_count\":" + std::to_string(snippet.line_count);
      if (origin.post_type) row += ",\"post_type\":" + std::to_string(*origin.post_type);
      row += "}\n";
      index_out << row;
      ++result.snippets_written;
    }
  }
  result.dump = reader.stats();
  if (!index_out || !posts_out) {
    throw FatalError("write failed under: " + options.out_dir.string());
  }

  ordered_json stats;
  stats["rows_seen"] = result.dump.rows_seen;
  stats["posts_emitted"] = result.dump.posts_emitted;
  stats["skipped_missing_field"] = result.dump.skipped_missing_field;
  stats["skipped_bad_date"] = result.dump.skipped_bad_date;
  stats["posts_kept"] = result.posts_kept;
  stats["snippets_written"] = result.snippets_written;
  write_json(options.out_dir / "stats.json", stats);
  return result;
}

// --------------------------------------------------------------- ingest-app

std::vector<AppInfo> load_release_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw FatalError("release manifest not found: " + path.string());
  fs::path base = fs::absolute(path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  std::vector<AppInfo> apps;
  if (path.extension() == ".json") {
    json doc = json::parse(read_file(path));
    for (const auto& app : doc.at("apps")) {
      AppInfo info;
      info.app_id = app.at("app_id").get<std::string>();
      if (app.contains("repo")) info.repo = resolve(app.at("repo").get<std::string>());
      for (const auto& rel : app.at("releases")) {
        ReleaseInfo release;
        release.release_id = rel.at("release_id").get<std::string>();
        auto ts = parse_timestamp(rel.at("release_date").get<std::string>());
        if (!ts) throw FatalError("bad release_date for " + info.app_id);
        release.release_date = *ts;
        release.tree = resolve(rel.at("tree").get<std::string>());
        info.releases.push_back(std::move(release));
      }
      apps.push_back(std::move(info));
    }
  } else {
    auto rows = parse_csv(read_file(path));
    std::map<std::string, AppInfo> by_id;
    std::vector<std::string> order;
    for (size_t i = 0; i < rows.size(); ++i) {
      const CsvRow& row = rows[i];
      if (i == 0 && !row.fields.empty() && row.fields[0] == "app_id") continue;
      if (row.fields.size() < 4) {
        throw FatalError("release manifest line " + std::to_string(row.line_number) +
                         ": expected app_id,release_id,release_date,tree");
      }
      const std::string& app_id = row.fields[0];
      if (!by_id.count(app_id)) {
        by_id[app_id].app_id = app_id;
        order.push_back(app_id);
      }
      ReleaseInfo release;
      release.release_id = row.fields[1];
      auto ts = parse_timestamp(row.fields[2]);
      if (!ts) {
        throw FatalError("release manifest line " + std::to_string(row.line_number) +
                         ": bad release_date");
      }
      release.release_date = *ts;
      release.tree = resolve(row.fields[3]);
      by_id[app_id].releases.push_back(std::move(release));
      if (row.fields.size() > 4 && !row.fields[4].empty() && by_id[app_id].repo.empty()) {
        by_id[app_id].repo = resolve(row.fields[4]);
      }
    }
    for (const auto& id : order) apps.push_back(std::move(by_id[id]));
  }

  for (AppInfo& app : apps) {
    std::sort(app.releases.begin(), app.releases.end(),
              [](const ReleaseInfo& a, const ReleaseInfo& b) {
                if (a.release_date != b.release_date) return a.release_date < b.release_date;
                return a.release_id < b.release_id;
              });
    if (app.releases.empty()) throw FatalError("app without releases: " + app.app_id);
  }
  std::sort(apps.begin(), apps.end(),
            [](const AppInfo& a, const AppInfo& b) { return a.app_id < b.app_id; });
  return apps;
}

std::vector<CodeSnippet> segment_file(const FileRecord& file, const std::string& release_id,
                                      int min_lines, NormLevel level) {
  std::vector<CodeSnippet> out;
  auto raw_lines = split_lines(file.text);
  auto slice_text = [&](int first, int last) {
    std::string text;
    for (int i = first; i <= last && i <= static_cast<int>(raw_lines.size()); ++i) {
      text.append(raw_lines[i - 1]);
      text.push_back('\n');
    }
    return text;
  };

  int emitted = 0;
  for (const BlockSpan& block : find_brace_blocks(file.text)) {
    if (block.depth > 2) continue;
    std::string text = slice_text(block.first_line, block.last_line);
    if (static_cast<int>(normalize(text, level).size()) < min_lines) continue;
    CodeSnippet snippet;
    snippet.snippet_id = make_app_snippet_id(file.app_id, file.path, emitted);
    snippet.origin =
        AppFileOrigin{file.app_id, file.path, block.first_line, block.last_line, release_id};
    snippet.line_count = count_content_lines(text);
    snippet.raw_text = std::move(text);
    out.push_back(std::move(snippet));
    ++emitted;
  }
  if (out.empty() && file.line_count > 0) {
    if (static_cast<int>(normalize(file.text, level).size()) >= min_lines) {
      CodeSnippet snippet;
      snippet.snippet_id = make_app_snippet_id(file.app_id, file.path, 0);
      snippet.origin = AppFileOrigin{file.app_id, file.path, 1, file.line_count, release_id};
      snippet.line_count = count_content_lines(file.text);
      snippet.raw_text = file.text;
      out.push_back(std::move(snippet));
    }
  }
  return out;
}

IngestAppResult run_ingest_app(const IngestAppOptions& options) {
  std::vector<AppInfo> apps = load_release_manifest(options.manifest_path);
  IngestAppResult result;
  std::vector<CodeSnippet> snippets;

  for (const AppInfo& app : apps) {
    const ReleaseInfo& snapshot = app.releases.back();
    ScanStats scan;
    AppRelease release = scan_release(snapshot.tree, app.app_id, snapshot.release_id,
                                      snapshot.release_date, options.extensions,
                                      options.header_lines, &scan);
    result.files_scanned += scan.files_included;
    for (const FileRecord& file : release.files) {
      for (auto& snippet : segment_file(file, snapshot.release_id, options.min_lines,
                                        options.normalization_level)) {
        snippets.push_back(std::move(snippet));
      }
    }
    ++result.apps;
  }
  result.snippets_written = static_cast<int64_t>(snippets.size());
  write_corpus(options.out_dir, snippets);

  ordered_json manifest;
  manifest["extensions"] = std::vector<std::string>(options.extensions.begin(),
                                                    options.extensions.end());
  manifest["min_lines"] = options.min_lines;
  manifest["normalization"] = norm_level_name(options.normalization_level);
  manifest["header_lines"] = options.header_lines;
  ordered_json app_list = ordered_json::array();
  for (const AppInfo& app : apps) {
    ordered_json entry;
    entry["app_id"] = app.app_id;
    entry["repo"] = app.repo.string();
    ordered_json releases = ordered_json::array();
    for (const ReleaseInfo& rel : app.releases) {
      releases.push_back({{"release_id", rel.release_id},
                          {"release_date", format_timestamp(rel.release_date)},
                          {"tree", fs::absolute(rel.tree).string()}});
    }
    entry["releases"] = std::move(releases);
    app_list.push_back(std::move(entry));
  }
  manifest["apps"] = std::move(app_list);
  write_json(options.out_dir / "releases.json", manifest);

  ordered_json stats;
  stats["apps"] = result.apps;
  stats["files_scanned"] = result.files_scanned;
  stats["snippets_written"] = result.snippets_written;
  write_json(options.out_dir / "stats.json", stats);
  return result;
}

// ------------------------------------------------------------------- detect

DetectResult run_detect(const DetectOptions& options) {
  options.config.validate();
  std::vector<CodeSnippet> qa = load_corpus(options.qa_corpus);
  std::vector<CodeSnippet> app = load_corpus(options.app_corpus);
  PreparedCorpora prepared = prepare_corpora(qa, app, options.config);
  std::vector<WorkUnit> plan = plan_shards(prepared, options.config);

  ShardRunOptions run_options;
  run_options.workers = options.workers;
  run_options.retry_limit = options.retry_limit;
  run_options.unit_dir = options.out_dir / "units";
  run_options.unit_hook = options.unit_hook;
  ShardRunResult run = run_sharded(prepared, plan, options.config, run_options);

  std::string pairs_text;
  for (const ClonePair& pair : run.pairs) {
    pairs_text += format_pair_line(pair);
    pairs_text += '\n';
  }
  write_file(options.out_dir / "pairs.jsonl", pairs_text);

  const size_t sa = static_cast<size_t>(options.config.shard_size_a);
  const size_t sb = static_cast<size_t>(options.config.shard_size_b);
  ordered_json manifest;
  manifest["config"] = {{"min_lines", options.config.min_lines},
                        {"similarity_threshold", format_decimal(options.config.similarity_threshold, 6)},
                        {"normalization", norm_level_name(options.config.normalization_level)},
                        {"shard_size_qa", options.config.shard_size_a},
                        {"shard_size_app", options.config.shard_size_b},
                        {"pruning", options.config.enable_pruning}};
  manifest["corpus"] = {{"qa_total", qa.size()},
                        {"qa_admitted", prepared.a.size()},
                        {"app_total", app.size()},
                        {"app_admitted", prepared.b.size()}};
  manifest["plan"] = {{"units", plan.size()},
                      {"shards_qa", prepared.a.empty() ? 0 : (prepared.a.size() + sa - 1) / sa},
                      {"shards_app", prepared.b.empty() ? 0 : (prepared.b.size() + sb - 1) / sb}};
  ordered_json units = ordered_json::array();
  for (const UnitStatus& unit : run.units) {
    units.push_back({{"index", unit.index},
                     {"attempts", unit.attempts},
                     {"status", unit.done ? (unit.resumed ? "resumed" : "done") : "failed"}});
  }
  manifest["units"] = std::move(units);
  manifest["incomplete"] = run.incomplete;
  manifest["pair_count"] = run.pairs.size();
  write_json(options.out_dir / "manifest.json", manifest);

  DetectResult result;
  result.qa_admitted = prepared.a.size();
  result.app_admitted = prepared.b.size();
  result.pair_count = run.pairs.size();
  result.incomplete_units = run.incomplete;
  return result;
}

CloneConfig load_detect_config(const fs::path& detect_dir) {
  json manifest = json::parse(read_file(detect_dir / "manifest.json"));
  const json& c = manifest.at("config");
  CloneConfig config;
  config.min_lines = c.at("min_lines").get<int>();
  config.similarity_threshold = std::stod(c.at("similarity_threshold").get<std::string>());
  config.normalization_level = norm_level_from(c.at("normalization").get<std::string>());
  config.shard_size_a = c.at("shard_size_qa").get<int>();
  config.shard_size_b = c.at("shard_size_app").get<int>();
  config.enable_pruning = c.at("pruning").get<bool>();
  return config;
}

// ---------------------------------------------------------------- attribute

namespace {

std::string provenance_row(const ProvenanceRecord& record) {
  std::string row = "{\"snippet_id\":\"" + json_escape(record.snippet_id) + "\"";
  row += ",\"resolution\":\"" + to_string(record.resolution) + "\"";
  if (record.matched_commit) row += ",\"matched_commit\":\"" + json_escape(*record.matched_commit) + "\"";
  if (record.created_at) row += ",\"created_at\":\"" + format_timestamp(*record.created_at) + "\"";
  if (record.resolution == Resolution::kAuto) {
    row += ",\"matched_fraction\":" + format_decimal(record.matched_fraction, 6);
  }
  if (!record.matched_author.empty()) {
    row += ",\"matched_author\":\"" + json_escape(record.matched_author) + "\"";
  }
  if (record.rename_followed) row += ",\"rename_followed\":true";
  if (!record.diagnostic.empty()) row += ",\"diagnostic\":\"" + json_escape(record.diagnostic) + "\"";
  if (!record.candidates.empty()) {
    row += ",\"candidates\":[";
    for (size_t i = 0; i < record.candidates.size(); ++i) {
      const auto& c = record.candidates[i];
      if (i) row += ",";
      row += "{\"commit\":\"" + json_escape(c.commit_id) + "\",\"date\":\"" +
             format_timestamp(c.date) + "\",\"author\":\"" + json_escape(c.author) +
             "\",\"fraction\":" + format_decimal(c.cumulative_fraction, 6) + "}";
    }
    row += "]";
  }
  row += "}";
  return row;
}

ProvenanceRecord provenance_from_row(const json& row) {
  ProvenanceRecord record;
  record.snippet_id = row.at("snippet_id").get<std::string>();
  record.resolution =
      row.at("resolution").get<std::string>() == "AUTO" ? Resolution::kAuto : Resolution::kUnresolved;
  if (row.contains("matched_commit")) record.matched_commit = row.at("matched_commit").get<std::string>();
  if (row.contains("created_at")) {
    record.created_at = *parse_timestamp(row.at("created_at").get<std::string>());
  }
  if (row.contains("matched_fraction")) record.matched_fraction = row.at("matched_fraction").get<double>();
  record.matched_author = row.value("matched_author", "");
  record.rename_followed = row.value("rename_followed", false);
  record.diagnostic = row.value("diagnostic", "");
  if (row.contains("candidates")) {
    for (const auto& c : row.at("candidates")) {
      record.candidates.push_back({c.at("commit").get<std::string>(),
                                   *parse_timestamp(c.at("date").get<std::string>()),
                                   c.value("author", ""), c.at("fraction").get<double>()});
    }
  }
  return record;
}

}  // namespace

AttributeResult run_attribute(const AttributeOptions& options) {
  std::vector<CodeSnippet> corpus = load_corpus(options.app_corpus);
  std::unordered_map<std::string, const CodeSnippet*> by_id;
  for (const auto& s : corpus) by_id[s.snippet_id] = &s;

  std::vector<ClonePair> pairs = parse_pair_lines(read_file(options.detect_dir / "pairs.jsonl"));
  std::map<std::string, std::vector<const CodeSnippet*>> per_app;  // app_id -> snippets to date
  std::unordered_set<std::string> seen;
  for (const ClonePair& pair : pairs) {
    for (const std::string& id : {pair.left, pair.right}) {
      auto it = by_id.find(id);
      if (it == by_id.end() || it->second->is_qa()) continue;
      if (seen.insert(id).second) per_app[it->second->app().app_id].push_back(it->second);
    }
  }

  json releases = json::parse(read_file(options.app_corpus / "releases.json"));
  std::map<std::string, std::string> repo_of;
  for (const auto& app : releases.at("apps")) {
    repo_of[app.at("app_id").get<std::string>()] = app.value("repo", "");
  }

  std::vector<ProvenanceRecord> records;
  for (auto& [app_id, snippets] : per_app) {
    auto repo_it = repo_of.find(app_id);
    if (repo_it == repo_of.end() || repo_it->second.empty()) {
      for (const CodeSnippet* snippet : snippets) {
        ProvenanceRecord record;
        record.snippet_id = snippet->snippet_id;
        record.diagnostic = "no repository configured for app " + app_id;
        records.push_back(std::move(record));
      }
      continue;
    }
    fs::path repo(repo_it->second);
    std::string head = repo_head_commit(repo);
    fs::path cache_dir = options.out_dir / "history_cache";
    AddedLineIndex index;
    if (auto cached = load_index_cache(cache_dir, app_id, head)) {
      index = std::move(*cached);
    } else {
      index = index_history(repo);
      save_index_cache(cache_dir, app_id, index);
    }
    for (const CodeSnippet* snippet : snippets) {
      records.push_back(date_snippet(*snippet, index, options.match_fraction));
    }
  }

  std::sort(records.begin(), records.end(),
            [](const ProvenanceRecord& a, const ProvenanceRecord& b) {
              return a.snippet_id < b.snippet_id;
            });

  AttributeResult result;
  std::string provenance_text, queue_text;
  for (const ProvenanceRecord& record : records) {
    provenance_text += provenance_row(record);
    provenance_text += '\n';
    if (record.resolution == Resolution::kAuto) {
      ++result.resolved;
    } else {
      ++result.unresolved;
      queue_text += provenance_row(record);
      queue_text += '\n';
    }
  }
  fs::create_directories(options.out_dir);
  write_file(options.out_dir / "provenance.jsonl", provenance_text);
  write_file(options.out_dir / "review_queue.jsonl", queue_text);

  ordered_json stats;
  stats["dated"] = result.resolved;
  stats["unresolved"] = result.unresolved;
  write_json(options.out_dir / "stats.json", stats);
  return result;
}

// ------------------------------------------------------------------ analyze

namespace {

struct PairView {
  const ClonePair* pair = nullptr;
  const CodeSnippet* qa = nullptr;
  const CodeSnippet* app = nullptr;
};

std::string direction_name(const std::optional<Direction>& direction) {
  return direction ? to_string(*direction) : "UNRESOLVED";
}

}  // namespace

AnalyzeResult run_analyze(const AnalyzeOptions& options) {
  AnalyzeResult result;
  CloneConfig config = load_detect_config(options.detect_dir);
  LicenseCatalog catalog = LicenseCatalog::load(options.catalog_path);

  std::vector<CodeSnippet> qa_corpus = load_corpus(options.qa_corpus);
  std::vector<CodeSnippet> app_corpus = load_corpus(options.app_corpus);
  std::vector<Post> posts = load_posts(options.qa_corpus);
  std::vector<ClonePair> pairs = parse_pair_lines(read_file(options.detect_dir / "pairs.jsonl"));

  std::unordered_map<std::string, const CodeSnippet*> snippet_of;
  for (const auto& s : qa_corpus) snippet_of[s.snippet_id] = &s;
  for (const auto& s : app_corpus) snippet_of[s.snippet_id] = &s;
  std::unordered_map<int64_t, const Post*> post_of;
  for (const auto& p : posts) post_of[p.id] = &p;

  // provenance records, plus any manual review resolutions
  std::map<std::string, ProvenanceRecord> provenance;
  const std::string provenance_raw = read_file(options.attr_dir / "provenance.jsonl");
  for (std::string_view line : split_lines(provenance_raw)) {
    if (trim(line).empty()) continue;
    ProvenanceRecord record = provenance_from_row(json::parse(line));
    provenance[record.snippet_id] = std::move(record);
  }
  if (options.reviewed_path) {
    const std::string reviewed_raw = read_file(*options.reviewed_path);
    for (std::string_view line : split_lines(reviewed_raw)) {
      if (trim(line).empty()) continue;
      json row = json::parse(line);
      auto it = provenance.find(row.at("snippet_id").get<std::string>());
      if (it == provenance.end()) continue;
      if (row.contains("commit")) it->second.matched_commit = row.at("commit").get<std::string>();
      if (row.contains("created_at")) {
        auto ts = parse_timestamp(row.at("created_at").get<std::string>());
        if (ts) it->second.created_at = *ts;
      }
      if (it->second.matched_commit && it->second.created_at) {
        it->second.resolution = Resolution::kAuto;
        it->second.diagnostic.clear();
      }
    }
  }

  // release manifest: trees for header/license scans and lifespans
  json releases_doc = json::parse(read_file(options.app_corpus / "releases.json"));
  std::set<std::string> extensions;
  for (const auto& e : releases_doc.at("extensions")) extensions.insert(e.get<std::string>());
  int header_lines = releases_doc.value("header_lines", 60);

  struct AppData {
    fs::path repo;
    std::vector<ReleaseInfo> releases;
    AppRelease snapshot;  // scanned lazily
    bool snapshot_loaded = false;
  };
  std::map<std::string, AppData> app_data;
  for (const auto& app : releases_doc.at("apps")) {
    AppData data;
    data.repo = app.value("repo", "");
    for (const auto& rel : app.at("releases")) {
      ReleaseInfo info;
      info.release_id = rel.at("release_id").get<std::string>();
      info.release_date = *parse_timestamp(rel.at("release_date").get<std::string>());
      info.tree = rel.at("tree").get<std::string>();
      data.releases.push_back(std::move(info));
    }
    app_data[app.at("app_id").get<std::string>()] = std::move(data);
  }

  auto snapshot_of = [&](const std::string& app_id) -> const AppRelease& {
    AppData& data = app_data.at(app_id);
    if (!data.snapshot_loaded) {
      const ReleaseInfo& last = data.releases.back();
      data.snapshot = scan_release(last.tree, app_id, last.release_id, last.release_date,
                                   extensions, header_lines);
      data.snapshot_loaded = true;
    }
    return data.snapshot;
  };
  auto snapshot_file = [&](const std::string& app_id, const std::string& path) -> const FileRecord* {
    for (const FileRecord& f : snapshot_of(app_id).files) {
      if (f.path == path) return &f;
    }
    return nullptr;
  };

  // license findings, cached per subject
  std::map<std::string, std::vector<LicenseFinding>> project_findings;
  auto project_findings_of = [&](const std::string& app_id) {
    auto it = project_findings.find(app_id);
    if (it != project_findings.end()) return it->second;
    std::string text;
    const AppData& data = app_data.at(app_id);
    fs::path root = data.releases.back().tree;
    std::vector<fs::path> candidates;
    std::error_code ec;
    for (fs::directory_iterator dit(root, ec), end; dit != end; dit.increment(ec)) {
      if (ec) break;
      if (!dit->is_regular_file()) continue;
      std::string name = to_lower_ascii(dit->path().filename().string());
      if (name.rfind("license", 0) == 0 || name.rfind("licence", 0) == 0 ||
          name.rfind("copying", 0) == 0 || name.rfind("notice", 0) == 0) {
        candidates.push_back(dit->path());
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (const fs::path& p : candidates) {
      bool bad = false;
      text += read_file_lossy_utf8(p, bad);
      text += '\n';
    }
    auto findings = catalog.identify(text, LicenseScope::kProjectRoot);
    project_findings[app_id] = findings;
    return findings;
  };

  std::map<std::string, std::vector<LicenseFinding>> header_findings;
  auto header_findings_of = [&](const std::string& app_id, const std::string& path) {
    std::string key = app_id + ":" + path;
    auto it = header_findings.find(key);
    if (it != header_findings.end()) return it->second;
    std::vector<LicenseFinding> findings;
    if (const FileRecord* file = snapshot_file(app_id, path)) {
      auto lines = split_lines(file->text);
      std::string header;
      for (int i = 0; i < file->header_region.last && i < static_cast<int>(lines.size()); ++i) {
        header.append(lines[i]);
        header.push_back('\n');
      }
      findings = catalog.identify(header, LicenseScope::kFileHeader);
    } else {
      findings = catalog.identify("", LicenseScope::kFileHeader);
    }
    header_findings[key] = findings;
    return findings;
  };

  std::map<int64_t, std::vector<LicenseFinding>> post_findings;
  auto post_findings_of = [&](int64_t post_id) {
    auto it = post_findings.find(post_id);
    if (it != post_findings.end()) return it->second;
    std::vector<LicenseFinding> findings;
    auto pit = post_of.find(post_id);
    findings = catalog.identify(pit == post_of.end() ? "" : html_to_text(pit->second->body_html),
                                LicenseScope::kPostBody);
    post_findings[post_id] = findings;
    return findings;
  };

  // inconsistency ranges against the snapshot file inventory
  std::map<std::pair<std::string, std::string>, std::vector<LineRange>> ranges_of;
  std::vector<std::string> inconsistency_notes;
  if (options.inconsistencies_csv) {
    std::map<std::pair<std::string, std::string>, int> line_counts;
    std::set<std::string> involved_apps;
    for (const auto& s : app_corpus) involved_apps.insert(s.app().app_id);
    for (const std::string& app_id : involved_apps) {
      for (const FileRecord& f : snapshot_of(app_id).files) {
        line_counts[{app_id, f.path}] = f.line_count;
      }
    }
    InconsistencyLoadResult loaded = load_inconsistencies(*options.inconsistencies_csv, line_counts);
    for (const InconsistencyRange& r : loaded.ranges) {
      ranges_of[{r.app_id, r.path}].push_back({r.line_start, r.line_end});
    }
    inconsistency_notes = loaded.row_errors;
    for (const auto& d : loaded.dropped_unknown) inconsistency_notes.push_back(d);
  }

  // pair views and directions
  std::vector<PairView> views;
  for (const ClonePair& pair : pairs) {
    PairView view;
    view.pair = &pair;
    auto l = snippet_of.find(pair.left);
    auto r = snippet_of.find(pair.right);
    if (l == snippet_of.end() || r == snippet_of.end()) continue;
    view.qa = l->second->is_qa() ? l->second : r->second;
    view.app = l->second->is_qa() ? r->second : l->second;
    if (!view.qa->is_qa() || view.app->is_qa()) continue;  // not a cross pair
    views.push_back(view);
  }
  result.pairs = static_cast<int64_t>(views.size());

  std::string directions_text;
  std::vector<std::optional<Direction>> directions(views.size());
  for (size_t i = 0; i < views.size(); ++i) {
    const PairView& view = views[i];
    std::optional<Direction> direction;
    auto prov_it = provenance.find(view.app->snippet_id);
    const ProvenanceRecord* record =
        prov_it == provenance.end() ? nullptr : &prov_it->second;
    if (record && record->created_at && view.qa->created_at) {
      direction = classify_direction(*record->created_at, *view.qa->created_at,
                                     options.ambiguity_days);
    }
    directions[i] = direction;
    if (direction) {
      switch (*direction) {
        case Direction::kReuseFromQa: ++result.from_qa; break;
        case Direction::kReuseToQa: ++result.to_qa; break;
        case Direction::kAmbiguous: ++result.ambiguous; break;
      }
    } else {
      ++result.unresolved;
    }
    std::string row = "{\"left\":\"" + json_escape(view.pair->left) + "\",\"right\":\"" +
                      json_escape(view.pair->right) + "\"";
    row += ",\"qa_snippet\":\"" + json_escape(view.qa->snippet_id) + "\"";
    row += ",\"app_snippet\":\"" + json_escape(view.app->snippet_id) + "\"";
    row += ",\"post_id\":" + std::to_string(view.qa->qa().post_id);
    row += ",\"app_id\":\"" + json_escape(view.app->app().app_id) + "\"";
    row += ",\"qa_date\":\"" + format_timestamp(*view.qa->created_at) + "\"";
    if (record && record->created_at) {
      row += ",\"app_date\":\"" + format_timestamp(*record->created_at) + "\"";
    }
    // the poster/committer name pair is surfaced for manual comparison only
    auto post_it = post_of.find(view.qa->qa().post_id);
    if (post_it != post_of.end() && post_it->second->owner) {
      row += ",\"poster\":\"" + json_escape(*post_it->second->owner) + "\"";
    }
    if (record && !record->matched_author.empty()) {
      row += ",\"committer\":\"" + json_escape(record->matched_author) + "\"";
    }
    row += ",\"direction\":\"" + direction_name(direction) + "\"";
    char sim[32];
    std::snprintf(sim, sizeof(sim), "%.6f", view.pair->similarity());
    row += ",\"similarity\":" + std::string(sim) + "}\n";
    directions_text += row;
  }
  write_file(options.out_dir / "directions.jsonl", directions_text);

  // clone classes over snippet creation dates
  std::map<std::string, Timestamp> dates;
  for (const auto& s : qa_corpus) {
    if (s.created_at) dates[s.snippet_id] = *s.created_at;
  }
  for (const auto& [id, record] : provenance) {
    if (record.created_at) dates[id] = *record.created_at;
  }
  std::vector<CloneClass> classes = group_classes(pairs, dates);
  result.classes = static_cast<int64_t>(classes.size());
  std::string classes_text;
  for (const CloneClass& cls : classes) {
    std::string row = "{\"class_id\":\"" + cls.class_id + "\",\"representative\":\"" +
                      json_escape(cls.representative) + "\",\"members\":[";
    for (size_t i = 0; i < cls.members.size(); ++i) {
      if (i) row += ",";
      row += "\"" + json_escape(cls.members[i]) + "\"";
    }
    row += "]}\n";
    classes_text += row;
  }
  write_file(options.out_dir / "classes.jsonl", classes_text);

  // overlap rates for app snippets that appear in pairs
  std::string overlaps_text;
  std::set<std::string> app_in_pairs;
  for (const PairView& view : views) app_in_pairs.insert(view.app->snippet_id);
  for (const std::string& id : app_in_pairs) {
    const CodeSnippet* snippet = snippet_of.at(id);
    const AppFileOrigin& origin = snippet->app();
    std::optional<double> rate;
    auto rit = ranges_of.find({origin.app_id, origin.path});
    if (rit != ranges_of.end()) {
      rate = compute_overlap({origin.start_line, origin.end_line}, rit->second);
    }
    auto pit = provenance.find(id);
    if (pit != provenance.end()) pit->second.overlap_rate = rate;
    overlaps_text += "{\"snippet_id\":\"" + json_escape(id) + "\",\"overlap_rate\":";
    overlaps_text += rate ? "\"" + format_decimal(*rate, 2) + "\"" : "null";
    overlaps_text += "}\n";
  }
  write_file(options.out_dir / "overlaps.jsonl", overlaps_text);

  // violations and passes, one outcome per resolved pair
  std::string violations_text, passes_text;
  auto pair_json = [](const ClonePair& pair) {
    return "{\"left\":\"" + json_escape(pair.left) + "\",\"right\":\"" + json_escape(pair.right) +
           "\"}";
  };
  for (size_t i = 0; i < views.size(); ++i) {
    if (!directions[i]) continue;
    const PairView& view = views[i];
    if (*directions[i] == Direction::kAmbiguous) continue;
    if (*directions[i] == Direction::kReuseFromQa) {
      const AppFileOrigin& origin = view.app->app();
      std::string subject = origin.app_id + ":" + origin.path;
      const FileRecord* file = snapshot_file(origin.app_id, origin.path);
      bool attribution =
          file && has_attribution_link(file->text, options.site_domain);
      auto violation = check_app_side(catalog, subject, project_findings_of(origin.app_id),
                                      header_findings_of(origin.app_id, origin.path), attribution);
      if (violation) {
        violation->pair_left = view.pair->left;
        violation->pair_right = view.pair->right;
        violation->provenance_ref = view.app->snippet_id;
        ++result.violations_app;
        std::string row = "{\"subject\":\"" + json_escape(violation->subject) + "\"";
        row += ",\"direction\":\"REUSE_FROM_QA\",\"rules\":[";
        for (size_t k = 0; k < violation->rules.size(); ++k) {
          if (k) row += ",";
          row += "\"" + to_string(violation->rules[k]) + "\"";
        }
        row += "],\"pair\":" + pair_json(*view.pair);
        row += ",\"license_evidence\":[";
        for (size_t k = 0; k < violation->license_evidence.size(); ++k) {
          if (k) row += ",";
          row += "\"" + json_escape(violation->license_evidence[k]) + "\"";
        }
        row += "],\"provenance_ref\":\"" + json_escape(violation->provenance_ref) + "\"";
        row += ",\"potential\":true}\n";
        violations_text += row;
      } else {
        passes_text += "{\"subject\":\"" + json_escape(subject) +
                       "\",\"direction\":\"REUSE_FROM_QA\",\"pair\":" + pair_json(*view.pair) +
                       ",\"note\":\"\"}\n";
      }
    } else {  // REUSE_TO_QA
      const AppFileOrigin& origin = view.app->app();
      std::string source_license = header_findings_of(origin.app_id, origin.path).front().license_id;
      std::string subject = "post:" + std::to_string(view.qa->qa().post_id);
      PostSideOutcome outcome =
          check_post_side(subject, source_license, post_findings_of(view.qa->qa().post_id));
      if (outcome.violation) {
        outcome.violation->pair_left = view.pair->left;
        outcome.violation->pair_right = view.pair->right;
        outcome.violation->provenance_ref = view.app->snippet_id;
        ++result.violations_post;
        std::string row = "{\"subject\":\"" + json_escape(subject) + "\"";
        row += ",\"direction\":\"REUSE_TO_QA\",\"rules\":[\"POST_MISSING_SOURCE_LICENSE\"]";
        row += ",\"pair\":" + pair_json(*view.pair);
        row += ",\"license_evidence\":[";
        for (size_t k = 0; k < outcome.violation->license_evidence.size(); ++k) {
          if (k) row += ",";
          row += "\"" + json_escape(outcome.violation->license_evidence[k]) + "\"";
        }
        row += "],\"provenance_ref\":\"" + json_escape(view.app->snippet_id) + "\"";
        row += ",\"source_license\":\"" + json_escape(source_license) + "\"";
        row += ",\"potential\":true}\n";
        violations_text += row;
      } else {
        passes_text += "{\"subject\":\"" + json_escape(subject) +
                       "\",\"direction\":\"REUSE_TO_QA\",\"pair\":" + pair_json(*view.pair) +
                       ",\"note\":\"" + (outcome.indeterminate ? "INDETERMINATE" : "") + "\"}\n";
      }
    }
  }
  write_file(options.out_dir / "violations.jsonl", violations_text);
  write_file(options.out_dir / "passes.jsonl", passes_text);

  // migration chains
  std::map<std::string, SnippetWhen> when;
  std::map<std::string, std::string> snippet_license;
  for (const CloneClass& cls : classes) {
    for (const std::string& member : cls.members) {
      auto it = snippet_of.find(member);
      if (it == snippet_of.end()) continue;
      SnippetWhen info;
      if (it->second->is_qa()) {
        info.is_post = true;
        info.date = it->second->created_at;
      } else {
        info.app_id = it->second->app().app_id;
        auto pit = provenance.find(member);
        if (pit != provenance.end() && pit->second.created_at) info.date = pit->second.created_at;
        snippet_license[member] =
            header_findings_of(it->second->app().app_id, it->second->app().path).front().license_id;
      }
      when[member] = std::move(info);
    }
  }
  std::vector<MigrationChain> migrations = detect_migrations(classes, when, snippet_license);
  result.migrations = static_cast<int64_t>(migrations.size());
  std::string migrations_text;
  for (const MigrationChain& chain : migrations) {
    std::string row = "{\"class_id\":\"" + chain.class_id + "\"";
    row += ",\"source\":{\"snippet\":\"" + json_escape(chain.source_snippet) + "\",\"app\":\"" +
           json_escape(chain.source_app) + "\",\"date\":\"" + format_timestamp(chain.source_date) +
           "\"}";
    row += ",\"via\":{\"snippet\":\"" + json_escape(chain.via_snippet) + "\",\"date\":\"" +
           format_timestamp(chain.via_date) + "\"}";
    row += ",\"destination\":{\"snippet\":\"" + json_escape(chain.destination_snippet) +
           "\",\"app\":\"" + json_escape(chain.destination_app) + "\",\"date\":\"" +
           format_timestamp(chain.destination_date) + "\"}";
    row += ",\"duration_days\":" + std::to_string(chain.duration_days);
    row += ",\"source_license\":\"" + json_escape(chain.source_license) + "\"";
    row += ",\"destination_license\":\"" + json_escape(chain.destination_license) + "\"";
    row += std::string(",\"consistent\":") + (chain.consistent ? "true" : "false") + "}\n";
    migrations_text += row;
  }
  write_file(options.out_dir / "migrations.jsonl", migrations_text);

  // lifespans: representative of each class against every release of each
  // app owning a member
  std::map<std::string, std::vector<ReleaseFiles>> release_files;
  auto release_files_of = [&](const std::string& app_id) -> const std::vector<ReleaseFiles>& {
    auto it = release_files.find(app_id);
    if (it != release_files.end()) return it->second;
    std::vector<ReleaseFiles> prepared;
    for (const ReleaseInfo& rel : app_data.at(app_id).releases) {
      AppRelease release = scan_release(rel.tree, app_id, rel.release_id, rel.release_date,
                                        extensions, header_lines);
      ReleaseFiles rf;
      rf.release_id = rel.release_id;
      rf.release_date = rel.release_date;
      for (const FileRecord& f : release.files) {
        rf.files.push_back(normalize(f.text, config.normalization_level));
      }
      prepared.push_back(std::move(rf));
    }
    return release_files[app_id] = std::move(prepared);
  };

  std::string lifespans_text;
  for (const CloneClass& cls : classes) {
    std::set<std::string> apps;
    for (const std::string& member : cls.members) {
      auto it = snippet_of.find(member);
      if (it != snippet_of.end() && !it->second->is_qa()) apps.insert(it->second->app().app_id);
    }
    auto rep_it = snippet_of.find(cls.representative);
    if (rep_it == snippet_of.end()) continue;
    std::vector<std::string> rep_lines =
        normalize(rep_it->second->raw_text, config.normalization_level);
    for (const std::string& app_id : apps) {
      LifespanRecord record =
          track_lifespan(cls.class_id, app_id, rep_lines, release_files_of(app_id), config);
      ++result.lifespans;
      std::string row = "{\"class_id\":\"" + record.class_id + "\",\"app_id\":\"" +
                        json_escape(record.app_id) + "\"";
      if (record.first_release) row += ",\"first_release\":\"" + json_escape(*record.first_release) + "\"";
      if (record.last_release) row += ",\"last_release\":\"" + json_escape(*record.last_release) + "\"";
      row += ",\"release_count\":" + std::to_string(record.release_count);
      row += ",\"days\":" + std::to_string(record.days);
      row += std::string(",\"still_present\":") + (record.still_present ? "true" : "false");
      row += std::string(",\"needs_review\":") + (record.needs_review ? "true" : "false") + "}\n";
      lifespans_text += row;
    }
  }
  write_file(options.out_dir / "lifespans.jsonl", lifespans_text);

  // refreshed provenance with directions and overlap rates folded in
  std::string enriched;
  for (const auto& [id, record] : provenance) {
    enriched += provenance_row(record);
    enriched.pop_back();  // strip the closing brace to append fields
    if (record.overlap_rate) {
      enriched += ",\"overlap_rate\":\"" + format_decimal(*record.overlap_rate, 2) + "\"";
    }
    enriched += "}\n";
  }
  write_file(options.out_dir / "provenance.jsonl", enriched);

  ordered_json stats;
  stats["pairs"] = result.pairs;
  stats["from_qa"] = result.from_qa;
  stats["to_qa"] = result.to_qa;
  stats["ambiguous"] = result.ambiguous;
  stats["unresolved"] = result.unresolved;
  stats["violations_app_side"] = result.violations_app;
  stats["violations_post_side"] = result.violations_post;
  stats["violations_total"] = result.violations_app + result.violations_post;
  stats["classes"] = result.classes;
  stats["migrations"] = result.migrations;
  stats["lifespans"] = result.lifespans;
  stats["ambiguity_days"] = options.ambiguity_days;
  stats["site_domain"] = options.site_domain;
  stats["inconsistency_notes"] = inconsistency_notes;
  write_json(options.out_dir / "stats.json", stats);
  return result;
}

// ------------------------------------------------------------------- report

namespace {

double median_of(std::vector<int> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::vector<json> rows;
  if (!fs::exists(path)) return rows;
  const std::string content = read_file(path);
  for (std::string_view line : split_lines(content)) {
    if (trim(line).empty()) continue;
    rows.push_back(json::parse(line));
  }
  return rows;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ",";
    out += csv_escape(fields[i]);
  }
  out += "\n";
  return out;
}

}  // namespace

void run_report(const ReportOptions& options) {
  ordered_json report;
  report["schema_version"] = 1;

  json detect_manifest = json::parse(read_file(options.detect_dir / "manifest.json"));
  report["config"] = detect_manifest.at("config");
  json analyze_stats = json::parse(read_file(options.analysis_dir / "stats.json"));
  report["config"]["ambiguity_days"] = analyze_stats.at("ambiguity_days");
  report["config"]["site_domain"] = analyze_stats.at("site_domain");

  ordered_json corpus;
  corpus["qa"] = json::parse(read_file(options.qa_corpus / "stats.json"));
  corpus["app"] = json::parse(read_file(options.app_corpus / "stats.json"));
  corpus["detect"] = detect_manifest.at("corpus");
  report["corpus"] = std::move(corpus);

  auto directions = read_jsonl(options.analysis_dir / "directions.jsonl");
  auto classes = read_jsonl(options.analysis_dir / "classes.jsonl");
  auto violations = read_jsonl(options.analysis_dir / "violations.jsonl");
  auto passes = read_jsonl(options.analysis_dir / "passes.jsonl");
  auto migrations = read_jsonl(options.analysis_dir / "migrations.jsonl");
  auto lifespans = read_jsonl(options.analysis_dir / "lifespans.jsonl");
  auto overlaps = read_jsonl(options.analysis_dir / "overlaps.jsonl");

  // snippet sizes per direction, and per-post reuse multiplicity
  std::unordered_map<std::string, int> line_count;
  for (const json& row : read_jsonl(options.qa_corpus / "index.jsonl")) {
    line_count[row.at("snippet_id").get<std::string>()] = row.value("line_count", 0);
  }
  for (const json& row : read_jsonl(options.app_corpus / "index.jsonl")) {
    line_count[row.at("snippet_id").get<std::string>()] = row.value("line_count", 0);
  }

  std::set<std::string> from_qa_app_snippets, to_qa_post_snippets;
  std::map<int64_t, std::set<std::string>> per_post;
  for (const json& row : directions) {
    std::string direction = row.at("direction").get<std::string>();
    if (direction == "REUSE_FROM_QA") {
      from_qa_app_snippets.insert(row.at("app_snippet").get<std::string>());
      per_post[row.at("post_id").get<int64_t>()].insert(row.at("app_snippet").get<std::string>());
    } else if (direction == "REUSE_TO_QA") {
      to_qa_post_snippets.insert(row.at("qa_snippet").get<std::string>());
    }
  }
  auto size_stats = [&](const std::set<std::string>& ids) {
    std::vector<int> sizes;
    int over50 = 0;
    for (const auto& id : ids) {
      auto it = line_count.find(id);
      if (it == line_count.end()) continue;
      sizes.push_back(it->second);
      if (it->second > 50) ++over50;
    }
    ordered_json out;
    out["count"] = sizes.size();
    out["median_lines"] = median_of(sizes);
    out["over_50_lines"] = over50;
    return out;
  };

  ordered_json clones;
  clones["pair_count"] = detect_manifest.at("pair_count");
  clones["class_count"] = classes.size();
  clones["reused_app_snippets"] = size_stats(from_qa_app_snippets);
  clones["reused_post_snippets"] = size_stats(to_qa_post_snippets);
  {
    ordered_json multiplicity = ordered_json::array();
    std::vector<int> counts;
    for (const auto& [post_id, ids] : per_post) {
      multiplicity.push_back({{"post_id", post_id}, {"app_snippets", ids.size()}});
      counts.push_back(static_cast<int>(ids.size()));
    }
    ordered_json n_android;
    n_android["per_post"] = std::move(multiplicity);
    n_android["median"] = median_of(counts);
    n_android["max"] = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    clones["per_post_reuse"] = std::move(n_android);
  }
  report["clones"] = std::move(clones);

  ordered_json direction_counts;
  direction_counts["from_qa"] = analyze_stats.at("from_qa");
  direction_counts["to_qa"] = analyze_stats.at("to_qa");
  direction_counts["ambiguous"] = analyze_stats.at("ambiguous");
  direction_counts["unresolved"] = analyze_stats.at("unresolved");
  report["directions"] = std::move(direction_counts);

  {
    std::vector<int> rates_x100;
    int absent = 0, zero = 0;
    for (const json& row : overlaps) {
      if (row.at("overlap_rate").is_null()) {
        ++absent;
        continue;
      }
      double rate = std::stod(row.at("overlap_rate").get<std::string>());
      if (rate == 0.0) ++zero;
      rates_x100.push_back(static_cast<int>(std::lround(rate * 100)));
    }
    ordered_json overlap;
    overlap["with_ranges"] = rates_x100.size();
    overlap["absent"] = absent;
    overlap["zero"] = zero;
    overlap["median_percent"] = format_decimal(median_of(rates_x100) / 100.0, 2);
    report["overlap"] = std::move(overlap);
  }

  ordered_json violation_summary;
  violation_summary["app_side"] = analyze_stats.at("violations_app_side");
  violation_summary["post_side"] = analyze_stats.at("violations_post_side");
  violation_summary["total"] = analyze_stats.at("violations_total");
  report["violation_summary"] = std::move(violation_summary);
  report["violations"] = violations;
  report["passes"] = passes;
  report["migrations"] = migrations;
  {
    std::vector<int> durations;
    for (const json& m : migrations) durations.push_back(m.at("duration_days").get<int>());
    ordered_json med;
    med["count"] = migrations.size();
    med["median_days"] = median_of(durations);
    report["migration_summary"] = std::move(med);
  }
  report["lifespans"] = lifespans;
  {
    std::vector<int> day_values, release_values;
    for (const json& l : lifespans) {
      if (l.value("needs_review", false)) continue;
      day_values.push_back(l.at("days").get<int>());
      release_values.push_back(l.at("release_count").get<int>());
    }
    ordered_json med;
    med["count"] = lifespans.size();
    med["median_days"] = median_of(day_values);
    med["median_releases"] = median_of(release_values);
    report["lifespan_summary"] = std::move(med);
  }

  fs::create_directories(options.out_dir);
  write_json(options.out_dir / "report.json", report);

  if (!options.csv_bundle) return;
  fs::path csv_dir = options.out_dir / "csv";
  fs::create_directories(csv_dir);

  {
    std::string out = csv_line({"left", "right", "similarity", "direction"});
    for (const json& row : directions) {
      char sim[32];
      std::snprintf(sim, sizeof(sim), "%.6f", row.at("similarity").get<double>());
      out += csv_line({row.at("left").get<std::string>(), row.at("right").get<std::string>(), sim,
                       row.at("direction").get<std::string>()});
    }
    write_file(csv_dir / "pairs.csv", out);
  }
  {
    std::string out = csv_line({"class_id", "representative", "member_count", "members"});
    for (const json& row : classes) {
      std::string members;
      for (const auto& m : row.at("members")) {
        if (!members.empty()) members += ";";
        members += m.get<std::string>();
      }
      out += csv_line({row.at("class_id").get<std::string>(),
                       row.at("representative").get<std::string>(),
                       std::to_string(row.at("members").size()), members});
    }
    write_file(csv_dir / "classes.csv", out);
  }
  {
    std::string out =
        csv_line({"subject", "direction", "rules", "pair_left", "pair_right", "potential"});
    for (const json& row : violations) {
      std::string rules;
      for (const auto& r : row.at("rules")) {
        if (!rules.empty()) rules += ";";
        rules += r.get<std::string>();
      }
      out += csv_line({row.at("subject").get<std::string>(), row.at("direction").get<std::string>(),
                       rules, row.at("pair").at("left").get<std::string>(),
                       row.at("pair").at("right").get<std::string>(), "true"});
    }
    write_file(csv_dir / "violations.csv", out);
  }
  {
    std::string out = csv_line({"subject", "direction", "note", "pair_left", "pair_right"});
    for (const json& row : passes) {
      out += csv_line({row.at("subject").get<std::string>(), row.at("direction").get<std::string>(),
                       row.value("note", ""), row.at("pair").at("left").get<std::string>(),
                       row.at("pair").at("right").get<std::string>()});
    }
    write_file(csv_dir / "passes.csv", out);
  }
  {
    std::string out = csv_line({"class_id", "source_app", "source_date", "via_date",
                                "destination_app", "destination_date", "duration_days",
                                "source_license", "destination_license", "consistent"});
    for (const json& row : migrations) {
      out += csv_line({row.at("class_id").get<std::string>(),
                       row.at("source").at("app").get<std::string>(),
                       row.at("source").at("date").get<std::string>(),
                       row.at("via").at("date").get<std::string>(),
                       row.at("destination").at("app").get<std::string>(),
                       row.at("destination").at("date").get<std::string>(),
                       std::to_string(row.at("duration_days").get<int64_t>()),
                       row.at("source_license").get<std::string>(),
                       row.at("destination_license").get<std::string>(),
                       row.at("consistent").get<bool>() ? "true" : "false"});
    }
    write_file(csv_dir / "migrations.csv", out);
  }
  {
    std::string out = csv_line({"class_id", "app_id", "first_release", "last_release",
                                "release_count", "days", "still_present", "needs_review"});
    for (const json& row : lifespans) {
      out += csv_line({row.at("class_id").get<std::string>(), row.at("app_id").get<std::string>(),
                       row.value("first_release", ""), row.value("last_release", ""),
                       std::to_string(row.at("release_count").get<int>()),
                       std::to_string(row.at("days").get<int64_t>()),
                       row.at("still_present").get<bool>() ? "true" : "false",
                       row.at("needs_review").get<bool>() ? "true" : "false"});
    }
    write_file(csv_dir / "lifespans.csv", out);
  }
  {
    std::string out = csv_line({"snippet_id", "overlap_rate"});
    for (const json& row : overlaps) {
      out += csv_line({row.at("snippet_id").get<std::string>(),
                       row.at("overlap_rate").is_null() ? ""
                                                        : row.at("overlap_rate").get<std::string>()});
    }
    write_file(csv_dir / "overlaps.csv", out);
  }
}

// ----------------------------------------------------------------- pipeline

PipelineOutcome run_pipeline(const fs::path& manifest_path, const fs::path& out_dir, int workers) {
  json manifest = json::parse(read_file(manifest_path));
  fs::path base = fs::absolute(manifest_path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };
  const json config = manifest.value("config", json::object());

  CloneConfig clone_config;
  clone_config.min_lines = config.value("min_lines", 10);
  clone_config.similarity_threshold = config.value("threshold", 0.70);
  clone_config.normalization_level = norm_level_from(config.value("normalization", "TYPE2"));
  clone_config.shard_size_a = config.value("shard_size_qa", 2000);
  clone_config.shard_size_b = config.value("shard_size_app", 500);
  clone_config.enable_pruning = config.value("pruning", true);

  IngestQaOptions qa;
  qa.dump_path = resolve(manifest.at("posts_xml").get<std::string>());
  qa.out_dir = out_dir / "qa";
  if (manifest.contains("tags")) {
    qa.tags.clear();
    for (const auto& t : manifest.at("tags")) qa.tags.push_back(t.get<std::string>());
  }
  if (manifest.contains("date_ceiling")) {
    qa.date_ceiling = parse_timestamp(manifest.at("date_ceiling").get<std::string>());
  }
  qa.min_lines = clone_config.min_lines;
  qa.inherit_tags = config.value("inherit_tags", false);
  run_ingest_qa(qa);

  IngestAppOptions app;
  app.manifest_path = resolve(manifest.at("release_manifest").get<std::string>());
  app.out_dir = out_dir / "app";
  if (config.contains("extensions")) {
    app.extensions.clear();
    for (const auto& e : config.at("extensions")) app.extensions.insert(e.get<std::string>());
  }
  app.min_lines = clone_config.min_lines;
  app.normalization_level = clone_config.normalization_level;
  app.header_lines = config.value("header_lines", 60);
  run_ingest_app(app);

  DetectOptions detect;
  detect.qa_corpus = qa.out_dir;
  detect.app_corpus = app.out_dir;
  detect.out_dir = out_dir / "detect";
  detect.config = clone_config;
  detect.workers = workers;
  DetectResult detect_result = run_detect(detect);

  AttributeOptions attribute;
  attribute.app_corpus = app.out_dir;
  attribute.detect_dir = detect.out_dir;
  attribute.out_dir = out_dir / "attr";
  attribute.match_fraction = config.value("match_fraction", 0.9);
  run_attribute(attribute);

  AnalyzeOptions analyze;
  analyze.qa_corpus = qa.out_dir;
  analyze.app_corpus = app.out_dir;
  analyze.detect_dir = detect.out_dir;
  analyze.attr_dir = attribute.out_dir;
  analyze.out_dir = out_dir / "analysis";
  if (manifest.contains("inconsistencies_csv")) {
    analyze.inconsistencies_csv = resolve(manifest.at("inconsistencies_csv").get<std::string>());
  }
  analyze.catalog_path = resolve(manifest.at("catalog").get<std::string>());
  analyze.ambiguity_days = config.value("ambiguity_days", 2);
  analyze.site_domain = config.value("site_domain", "stackoverflow.com");
  run_analyze(analyze);

  ReportOptions report;
  report.qa_corpus = qa.out_dir;
  report.app_corpus = app.out_dir;
  report.detect_dir = detect.out_dir;
  report.attr_dir = attribute.out_dir;
  report.analysis_dir = analyze.out_dir;
  report.out_dir = out_dir / "report";
  run_report(report);

  PipelineOutcome outcome;
  outcome.incomplete_shards = !detect_result.complete();
  return outcome;
}

}  // namespace codeprov
